#include "sbd/solver.hpp"

#include <cmath>

namespace sbd {

Real l21_norm(const CMat& X) {
  return X.colwise().norm().sum();
}

CMat block_soft_threshold(const CMat& X, Real tau) {
  if (tau <= 0.0) {
    throw std::invalid_argument("block_soft_threshold: tau must be positive");
  }
  CMat out(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const Real norm = X.col(j).norm();
    if (norm <= tau) {
      out.col(j).setZero();
    } else {
      out.col(j) = (1.0 - tau / norm) * X.col(j);
    }
  }
  return out;
}

namespace {

// Entrywise complex soft threshold, prox of tau * ||vec(.)||_1.
CMat entrywise_soft_threshold(const CMat& X, Real tau) {
  return X.unaryExpr([tau](Complex x) {
    const Real a = std::abs(x);
    return a <= tau ? Complex(0, 0) : x * ((a - tau) / a);
  });
}

}  // namespace

GramCache::GramCache(const MeasurementOperator& op) {
  const CMat gram = op.gram();
  shifted_ = Eigen::LLT<CMat>(CMat::Identity(op.n(), op.n()) + gram);
  plain_ = Eigen::LDLT<CMat>(gram);
}

namespace {

struct ConstrainedProblem {
  const CVec& y;
  const MeasurementOperator& op;
  Real eta;            // < 0 means equality-constrained (noiseless)
  bool entrywise_l1;   // baseline prox variant
};

// Three-block splitting on (X, Z, r) with constraints X = Z and
// L(X) - r = y; Z carries the prox, r the eta-ball projection (pinned to 0
// in the noiseless case). The X-update solves (I + L*L) X = W through the
// N x N factorization of I + L L*.
SolveResult admm_constrained(const ConstrainedProblem& prob,
                             const SolverConfig& cfg, const GramCache* cache) {
  const auto& op = prob.op;
  const auto& y = prob.y;
  const int N = op.n(), M = op.m(), K = op.k();
  const bool noiseless = prob.eta < 0.0;
  const Real eta = noiseless ? 0.0 : prob.eta;
  const Real y_norm = y.norm();

  SolveResult res;
  // zero measurements (or an eta-ball containing them): X = 0 is optimal
  if (y_norm == 0.0 || (!noiseless && eta >= y_norm)) {
    res.X_hat = CMat::Zero(K, M);
    res.converged = true;
    res.feasibility_gap = noiseless ? y_norm : 0.0;
    return res;
  }

  std::unique_ptr<GramCache> owned;
  if (!cache) {
    owned = std::make_unique<GramCache>(op);
    cache = owned.get();
  }

  Real rho = cfg.rho;
  const Real alpha = cfg.over_relaxation;
  CMat X = CMat::Zero(K, M), Z = X, U = X;
  CVec r = CVec::Zero(N), v = CVec::Zero(N);
  const Real dim_pri = std::sqrt(static_cast<Real>(K) * M + N);
  const Real dim_dual = std::sqrt(static_cast<Real>(K) * M);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    // X-update: min 1/2||X-(Z-U)||^2 + 1/2||L(X)-(y+r-v)||^2
    const CMat W = (Z - U) + op.adjoint(y + r - v);
    X = W - op.adjoint(cache->shifted().solve(op.forward(W)));
    const CVec LX = op.forward(X);

    const CMat X_mix = alpha * X + (1.0 - alpha) * Z;
    const CVec LX_mix = alpha * LX + (1.0 - alpha) * (r + y);

    const CMat Z_prev = std::move(Z);
    Z = prob.entrywise_l1
            ? entrywise_soft_threshold(X_mix + U, 1.0 / rho)
            : block_soft_threshold(X_mix + U, 1.0 / rho);

    const CVec r_prev = r;
    if (!noiseless) {
      r = LX_mix - y + v;
      const Real rn = r.norm();
      if (rn > eta) r *= eta / rn;
    }

    U += X_mix - Z;
    v += LX_mix - r - y;

    const Real pri = std::sqrt((X - Z).squaredNorm() + (LX - r - y).squaredNorm());
    const Real dual =
        rho * ((Z - Z_prev) + op.adjoint(r - r_prev)).norm();
    res.iterations = it;
    if (cfg.record_residuals) res.residual_history.emplace_back(pri, dual);

    const Real scale_pri =
        std::max({std::sqrt(X.squaredNorm() + LX.squaredNorm()),
                  std::sqrt(Z.squaredNorm() + r.squaredNorm()), y_norm});
    const Real scale_dual = rho * (U + op.adjoint(v)).norm();
    const Real eps_pri = dim_pri * cfg.tol_abs + cfg.tol_rel * scale_pri;
    const Real eps_dual = dim_dual * cfg.tol_abs + cfg.tol_rel * scale_dual;
    res.primal_residual = pri;
    res.dual_residual = dual;
    if (pri <= eps_pri && dual <= eps_dual) {
      res.converged = true;
      break;
    }

    if (cfg.adaptive_rho && it % 10 == 0) {
      if (pri > 10.0 * dual && rho < 1e4) {
        rho *= 2.0;
        U /= 2.0;
        v /= 2.0;
      } else if (dual > 10.0 * pri && rho > 1e-4) {
        rho /= 2.0;
        U *= 2.0;
        v *= 2.0;
      }
    }
  }

  // Final least-norm feasibility correction through L L*.
  CVec d = y - op.forward(Z);
  if (noiseless) {
    Z += op.adjoint(cache->plain().solve(d));
    res.feasibility_gap = (y - op.forward(Z)).norm();
  } else {
    const Real dn = d.norm();
    if (dn > eta) {
      Z += op.adjoint(cache->plain().solve(d * (1.0 - eta / dn)));
    }
    res.feasibility_gap = std::max(0.0, (y - op.forward(Z)).norm() - eta);
  }
  res.X_hat = std::move(Z);
  res.objective = l21_norm(res.X_hat);
  return res;
}

}  // namespace

SolveResult solve_noiseless(const CVec& y, const MeasurementOperator& op,
                            const SolverConfig& cfg, const GramCache* cache) {
  if (y.size() != op.n()) throw DimensionError("solve_noiseless: y length != N");
  return admm_constrained({y, op, -1.0, false}, cfg, cache);
}

SolveResult solve_noisy(const CVec& y, const MeasurementOperator& op, Real eta,
                        const SolverConfig& cfg, const GramCache* cache) {
  if (y.size() != op.n()) throw DimensionError("solve_noisy: y length != N");
  if (eta < 0.0) throw std::invalid_argument("solve_noisy: eta < 0");
  return admm_constrained({y, op, eta, false}, cfg, cache);
}

SolveResult solve_noisy_l1(const CVec& y, const MeasurementOperator& op,
                           Real eta, const SolverConfig& cfg,
                           const GramCache* cache) {
  if (y.size() != op.n()) throw DimensionError("solve_noisy_l1: y length != N");
  if (eta < 0.0) throw std::invalid_argument("solve_noisy_l1: eta < 0");
  return admm_constrained({y, op, eta, true}, cfg, cache);
}

SolveResult solve_regularized(const CVec& y, const MeasurementOperator& op,
                              Real lambda, const SolverConfig& cfg,
                              const GramCache* cache) {
  if (y.size() != op.n()) throw DimensionError("solve_regularized: y length != N");
  if (lambda <= 0.0) throw std::invalid_argument("solve_regularized: lambda <= 0");
  const int N = op.n(), M = op.m(), K = op.k();

  const Real rho = cfg.rho;
  std::unique_ptr<Eigen::LLT<CMat>> owned;
  const Eigen::LLT<CMat>* shifted = nullptr;
  if (cache && rho == 1.0) {
    shifted = &cache->shifted();
  } else {
    owned = std::make_unique<Eigen::LLT<CMat>>(
        rho * CMat::Identity(N, N) + op.gram());
    shifted = owned.get();
  }

  const CMat Lstar_y = op.adjoint(y);
  SolveResult res;
  CMat X = CMat::Zero(K, M), Z = X, U = X;
  const Real dim = std::sqrt(static_cast<Real>(K) * M);
  const Real alpha = cfg.over_relaxation;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    // X-update: (L*L + rho I) X = L*(y) + rho (Z - U), by Woodbury
    const CMat W = Lstar_y + rho * (Z - U);
    X = (W - op.adjoint(shifted->solve(op.forward(W)))) / rho;

    const CMat X_mix = alpha * X + (1.0 - alpha) * Z;
    const CMat Z_prev = std::move(Z);
    Z = block_soft_threshold(X_mix + U, lambda / rho);
    U += X_mix - Z;

    const Real pri = (X - Z).norm();
    const Real dual = rho * (Z - Z_prev).norm();
    res.iterations = it;
    if (cfg.record_residuals) res.residual_history.emplace_back(pri, dual);
    const Real eps_pri =
        dim * cfg.tol_abs + cfg.tol_rel * std::max(X.norm(), Z.norm());
    const Real eps_dual = dim * cfg.tol_abs + cfg.tol_rel * rho * U.norm();
    res.primal_residual = pri;
    res.dual_residual = dual;
    if (pri <= eps_pri && dual <= eps_dual) {
      res.converged = true;
      break;
    }
  }

  res.X_hat = std::move(Z);
  res.objective = l21_norm(res.X_hat);
  res.feasibility_gap = (y - op.forward(res.X_hat)).norm();
  return res;
}

}  // namespace sbd
