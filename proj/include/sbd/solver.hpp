#ifndef SBD_SOLVER_HPP
#define SBD_SOLVER_HPP

#include <memory>
#include <utility>
#include <vector>

#include "sbd/operators.hpp"

namespace sbd {

struct SolverConfig {
  Real rho = 1.0;
  Real tol_abs = 1e-10;
  Real tol_rel = 1e-8;
  int max_iter = 20000;
  Real over_relaxation = 1.0;  // in [1.0, 1.8]
  bool adaptive_rho = false;   // ratio test, factor 2, bounds [1e-4, 1e4]
  bool record_residuals = false;
};

struct SolveResult {
  LiftedMatrix X_hat;
  Real objective = 0.0;        // ||X_hat||_{2,1}
  Real primal_residual = 0.0;
  Real dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  Real feasibility_gap = 0.0;  // ||L(X_hat) - y||_2, or its excess over eta
  std::vector<std::pair<Real, Real>> residual_history;  // (primal, dual)
};

Real l21_norm(const CMat& X);

// Proximal operator of tau * ||.||_{2,1}: column j -> max(0, 1 - tau/||x_j||) x_j.
CMat block_soft_threshold(const CMat& X, Real tau);

// Shareable N x N factorization of I + L L^* (and of L L^* for the final
// feasibility correction); build once per operator and reuse across solves.
class GramCache {
 public:
  explicit GramCache(const MeasurementOperator& op);
  const Eigen::LLT<CMat>& shifted() const { return shifted_; }
  const Eigen::LDLT<CMat>& plain() const { return plain_; }

 private:
  Eigen::LLT<CMat> shifted_;
  Eigen::LDLT<CMat> plain_;
};

// minimize ||X||_{2,1} subject to y = L(X)
SolveResult solve_noiseless(const CVec& y, const MeasurementOperator& op,
                            const SolverConfig& cfg = {},
                            const GramCache* cache = nullptr);

// minimize ||X||_{2,1} subject to ||y - L(X)||_2 <= eta
SolveResult solve_noisy(const CVec& y, const MeasurementOperator& op, Real eta,
                        const SolverConfig& cfg = {},
                        const GramCache* cache = nullptr);

// minimize (1/2)||L(X) - y||_2^2 + lambda ||X||_{2,1}
SolveResult solve_regularized(const CVec& y, const MeasurementOperator& op,
                              Real lambda, const SolverConfig& cfg = {},
                              const GramCache* cache = nullptr);

// Same splitting with an entrywise l1 prox; recovers a lifted matrix under a
// shared modulation assumption. Used as the comparison baseline in the DOA
// demo.
SolveResult solve_noisy_l1(const CVec& y, const MeasurementOperator& op,
                           Real eta, const SolverConfig& cfg = {},
                           const GramCache* cache = nullptr);

}  // namespace sbd

#endif  // SBD_SOLVER_HPP
