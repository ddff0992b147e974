"""Bloom-compressed certificate revocation lists.

Thin re-export of the native module: filter optimization (solve_fo,
solve_relaxed), the Bloom filter itself, wire sizes and compression gain,
and the deterministic broadcast simulator (run_sim).
"""

try:
    from ._c2rl import *  # noqa: F401,F403
    from ._c2rl import __doc__ as _native_doc  # noqa: F401
except ImportError:  # local build tree: the extension sits on sys.path
    from _c2rl import *  # noqa: F401,F403

__version__ = "0.1.0"
