#include "c2rl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "c2rl/bloom.hpp"

namespace c2rl {

namespace {

constexpr double kBracketLo = 1.0;
constexpr double kBracketHi = 1e3;
constexpr double kTolerance = 1e-9;
constexpr int kMaxIterations = 200;

void require_delta(double delta_hat) {
  if (!(delta_hat > 0.0) || !(delta_hat < 1.0)) {
    throw std::invalid_argument("delta_hat must lie in (0, 1)");
  }
}

}  // namespace

double m_of_k(double k_tilde, const FoProblem& problem) {
  require_delta(problem.delta_hat);
  if (!(k_tilde >= 1.0)) {
    throw std::invalid_argument("m_of_k: k_tilde must be >= 1");
  }
  // T = 1 - delta_hat^(1/k); both steps via expm1 so tiny T and tiny
  // 1 - T^(1/(kn)) keep full precision.
  const double t = -std::expm1(std::log(problem.delta_hat) / k_tilde);
  const double denom =
      -std::expm1(std::log(t) / (k_tilde * static_cast<double>(problem.n)));
  return 1.0 / denom;
}

double root_equation(double k_tilde, double delta_hat) {
  const double log_delta = std::log(delta_hat);
  const double x = std::exp(log_delta / k_tilde);  // delta_hat^(1/k)
  const double t = 1.0 - x;
  return x * log_delta - k_tilde * t * std::log(t);
}

RelaxedSolution solve_relaxed(const FoProblem& problem) {
  require_delta(problem.delta_hat);

  double lo = kBracketLo;
  double hi = kBracketHi;
  const double f_lo = root_equation(lo, problem.delta_hat);
  const double f_hi = root_equation(hi, problem.delta_hat);

  double k_tilde;
  if (f_lo == 0.0) {
    k_tilde = lo;
  } else if (f_hi == 0.0) {
    k_tilde = hi;
  } else if (std::signbit(f_lo) != std::signbit(f_hi)) {
    double f_left = f_lo;
    for (int i = 0; i < kMaxIterations && hi - lo > kTolerance; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = root_equation(mid, problem.delta_hat);
      if (f_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if (std::signbit(f_mid) == std::signbit(f_left)) {
        lo = mid;
        f_left = f_mid;
      } else {
        hi = mid;
      }
    }
    k_tilde = 0.5 * (lo + hi);
  } else {
    // No sign change in the bracket (delta_hat above ~0.5): the envelope
    // m~(k~) is monotone there, so the better boundary is the optimum.
    const double m_lo = m_of_k(lo, problem);
    const double m_hi = m_of_k(hi, problem);
    if (!std::isfinite(m_lo) && !std::isfinite(m_hi)) {
      throw InfeasibleError("solve_relaxed: no root bracket and no finite boundary");
    }
    k_tilde = (std::isfinite(m_lo) && (!std::isfinite(m_hi) || m_lo <= m_hi)) ? lo : hi;
  }
  return RelaxedSolution{.m_tilde = m_of_k(k_tilde, problem), .k_tilde = k_tilde};
}

FoSolution solve_fo(const FoProblem& problem) {
  require_delta(problem.delta_hat);
  if (problem.n < 1) {
    throw std::invalid_argument("solve_fo: n must be >= 1");
  }

  const RelaxedSolution relaxed = solve_relaxed(problem);
  const double n = static_cast<double>(problem.n);

  const std::uint64_t k_floor =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(relaxed.k_tilde)));
  const std::uint64_t k_ceil =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(relaxed.k_tilde)));
  const std::uint64_t m_start =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(relaxed.m_tilde)));
  const std::uint64_t m_cap = std::max<std::uint64_t>(
      64, static_cast<std::uint64_t>(16.0 * relaxed.m_tilde));

  // Integer repair: scan m upward per candidate k; a candidate that blows
  // past the cap is dropped so comparisons stay total.
  std::optional<FoSolution> best;
  const std::uint64_t candidates[2] = {k_floor, k_ceil};
  for (int i = 0; i < 2; ++i) {
    if (i == 1 && candidates[1] == candidates[0]) {
      break;  // integral k_tilde: one candidate
    }
    const std::uint64_t k = candidates[i];
    std::uint64_t m = m_start;
    bool feasible = true;
    while (false_positive_prob(static_cast<double>(m), static_cast<double>(k), n) >
           problem.delta_hat) {
      ++m;
      if (m > m_cap) {
        feasible = false;
        break;
      }
    }
    if (!feasible) {
      continue;
    }
    const bool better = !best.has_value() || m < best->m_star ||
                        (m == best->m_star && k < best->k_star);
    if (better) {
      best = FoSolution{
          .m_star = m,
          .k_star = static_cast<std::uint32_t>(k),
          .m_tilde_star = relaxed.m_tilde,
          .k_tilde_star = relaxed.k_tilde,
          .delta_at_solution =
              false_positive_prob(static_cast<double>(m), static_cast<double>(k), n),
      };
    }
  }
  if (!best.has_value()) {
    throw InfeasibleError("solve_fo: both integer candidates exceeded the scan cap");
  }
  return *best;
}

double optimal_k_reference(double delta_hat) {
  require_delta(delta_hat);
  return std::log(1.0 / delta_hat) / std::log(2.0);
}

}  // namespace c2rl
