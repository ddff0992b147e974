#pragma once

#include <cstdint>
#include <stdexcept>

namespace c2rl {

// Raised when the filter optimization cannot produce a feasible (m, k).
// Cannot trigger for practical inputs; it turns pathological parameter
// combinations into a diagnostic instead of a runaway scan.
class InfeasibleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An instance of the filter optimization: n elements to store, target
// false-positive probability delta_hat in (0, 1).
struct FoProblem {
  std::uint64_t n = 1;
  double delta_hat = 1e-3;
};

// Optimum of the real-valued relaxation: the (m~, k~) minimizing m~
// subject to delta(m~, k~) <= delta_hat.
struct RelaxedSolution {
  double m_tilde = 0.0;
  double k_tilde = 0.0;
};

// Integer solution, plus the relaxed optimum it was repaired from and the
// false-positive probability actually achieved.
struct FoSolution {
  std::uint64_t m_star = 0;
  std::uint32_t k_star = 0;
  double m_tilde_star = 0.0;
  double k_tilde_star = 0.0;
  double delta_at_solution = 0.0;

  [[nodiscard]] std::uint64_t payload_bytes() const { return (m_star + 7) / 8; }
};

// The filter size m~(k~) that meets delta_hat with equality for a given
// real hash count: [1 - (1 - delta_hat^(1/k~))^(1/(k~ n))]^-1.
//
// Mind the positive exponent delta_hat^(1/k~). This expression is easy to
// mis-derive with delta_hat^(-1/k~), which makes the inner base negative
// for every delta_hat < 1; the positive sign is the algebraic inversion
// of the false-positive formula and matches T = 1 - d^(1/k~) in the
// stationarity equation below. Rejects k_tilde < 1.
double m_of_k(double k_tilde, const FoProblem& problem);

// Residual of the stationarity equation d^(1/k~) ln d - k~ T ln T, with
// T = 1 - d^(1/k~). Its root over k~ is the relaxed optimum k~*.
double root_equation(double k_tilde, double delta_hat);

// Bisection on root_equation over [1, 1e3] to absolute tolerance 1e-9
// (iteration cap 200), then m~* = m_of_k(k~*). When the residual has no
// sign change in the bracket the boundary minimizing m_of_k is taken;
// if both boundary evaluations are non-finite, throws InfeasibleError.
RelaxedSolution solve_relaxed(const FoProblem& problem);

// Integer repair of the relaxed optimum: for k in {floor(k~*), ceil(k~*)}
// (clamped to >= 1), scan m upward from floor(m~*) until the constraint
// holds, then keep the candidate with the smallest m, ties broken by the
// smaller k. The scan aborts a candidate once m exceeds 16 * m~*.
FoSolution solve_fo(const FoProblem& problem);

// ln(1/delta_hat) / ln 2 -- the closed form the root of root_equation
// collapses to (substitute x = delta_hat^(1/k~); the root sits at
// x = 1/2). Exists as an independent cross-check for solve_relaxed.
double optimal_k_reference(double delta_hat);

}  // namespace c2rl
