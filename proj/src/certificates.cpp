#include "sbd/certificates.hpp"

#include <cmath>

#include "sbd/rng.hpp"

namespace sbd {

Real isometry_constant(const CMat& phi_t_compact) {
  const Eigen::Index d = phi_t_compact.cols();
  if (d == 0) return 0.0;
  const CMat dev =
      phi_t_compact.adjoint() * phi_t_compact - CMat::Identity(d, d);
  Eigen::SelfAdjointEigenSolver<CMat> eig(dev, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// N x KJ compact restriction assembled directly from A and B.
CMat phi_compact(const MeasurementOperator& op, const SupportSet& T) {
  const int K = op.k();
  CMat phi(op.n(), static_cast<Eigen::Index>(K) * T.size());
  Eigen::Index pos = 0;
  for (int j : T.indices()) {
    for (int i = 0; i < K; ++i) {
      phi.col(pos++) = op.B().col(i).cwiseProduct(op.A().col(j));
    }
  }
  return phi;
}

}  // namespace

LsCertificate ls_certificate(const MeasurementOperator& op, const SupportSet& T,
                             const CMat& sign_x0t) {
  if (sign_x0t.rows() != op.k() || sign_x0t.cols() != T.size()) {
    throw DimensionError("ls_certificate: sign matrix must be K x |T|");
  }
  LsCertificate cert;
  if (T.empty()) {
    cert.Y = CMat::Zero(op.k(), op.m());
    cert.p = CVec::Zero(op.n());
    return cert;
  }
  const CMat phi = phi_compact(op, T);
  const Eigen::Index d = phi.cols();
  const CMat gram = phi.adjoint() * phi;
  // the construction only needs an invertible Gram; delta >= 1 can stem from
  // the top eigenvalue alone while the Gram stays well conditioned
  const Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "ls_certificate: restricted Gram is not positive definite");
  }
  const CVec sign_vec =
      Eigen::Map<const CVec>(sign_x0t.data(), sign_x0t.size());
  cert.p = phi * llt.solve(sign_vec);
  (void)d;
  cert.Y = op.adjoint(cert.p);
  return cert;
}

std::vector<std::vector<int>> golfing_partition(int n, int p,
                                                const SubspaceBasis& basis,
                                                std::uint64_t seed,
                                                int max_attempts) {
  if (p <= 0 || n % p != 0) {
    throw std::invalid_argument("golfing_partition: P must divide N");
  }
  const int q = n / p;
  const int k = basis.k();
  const Real bound = static_cast<Real>(q) / (4.0 * n);
  const CMat bh = basis.entries().adjoint();  // columns are b'_l
  Rng rng(seed);
  Real best_dev = std::numeric_limits<Real>::infinity();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::vector<int> perm = rng.permutation(n);
    std::vector<std::vector<int>> partition(static_cast<size_t>(p));
    Real max_dev = 0.0;
    for (int s = 0; s < p; ++s) {
      auto& subset = partition[static_cast<size_t>(s)];
      subset.assign(perm.begin() + static_cast<std::ptrdiff_t>(s) * q,
                    perm.begin() + static_cast<std::ptrdiff_t>(s + 1) * q);
      CMat bp = CMat::Zero(k, k);
      for (int l : subset) {
        bp += bh.col(l) * bh.col(l).adjoint();
      }
      const CMat dev = bp - (static_cast<Real>(q) / n) * CMat::Identity(k, k);
      Eigen::SelfAdjointEigenSolver<CMat> eig(dev, Eigen::EigenvaluesOnly);
      max_dev = std::max(max_dev, eig.eigenvalues().cwiseAbs().maxCoeff());
    }
    best_dev = std::min(best_dev, max_dev);
    if (max_dev < bound) {
      return partition;
    }
  }
  throw std::runtime_error(
      "golfing_partition: no partition met the spectral condition in " +
      std::to_string(max_attempts) + " attempts (best deviation " +
      std::to_string(best_dev) + ", bound " + std::to_string(bound) + ")");
}

GolfingState golfing_certificate(const MeasurementOperator& op,
                                 const SupportSet& T, const CMat& sign_x0t,
                                 int p, std::uint64_t seed) {
  if (sign_x0t.rows() != op.k() || sign_x0t.cols() != T.size()) {
    throw DimensionError("golfing_certificate: sign matrix must be K x |T|");
  }
  GolfingState state;
  state.partition = golfing_partition(op.n(), p, op.basis(), seed);
  const int K = op.k(), M = op.m(), N = op.n();
  const int q = N / p;
  state.Y = CMat::Zero(K, M);
  if (T.empty()) {
    return state;
  }

  CMat w_full = CMat::Zero(K, M);  // Y_{p,T} - sign(X0_T), embedded
  for (int t = 0; t < T.size(); ++t) {
    w_full.col(T[t]) = -sign_x0t.col(t);
  }
  const Real scale = static_cast<Real>(N) / q;
  for (const auto& subset : state.partition) {
    // Y_p = Y_{p-1} - (N/Q) L_p^* L_p (W_{p-1})
    CVec lw = CVec::Zero(N);
    for (int l : subset) {
      lw(l) = (op.B().row(l) * w_full * op.A().row(l).transpose())(0, 0);
    }
    state.Y -= scale * op.adjoint(lw);
    CMat w_compact(K, T.size());
    for (int t = 0; t < T.size(); ++t) {
      const int j = T[t];
      w_full.col(j) = state.Y.col(j) - sign_x0t.col(t);
      w_compact.col(t) = w_full.col(j);
    }
    state.iterates.push_back(w_compact);
    state.w_norms.push_back(w_compact.norm());
  }
  return state;
}

Real beta_crosscorrelation(const MeasurementOperator& op, const SupportSet& T) {
  const CMat phi_t = phi_compact(op, T);
  Real beta = 0.0;
  const int K = op.k();
  for (int i : T.complement(op.m())) {
    CMat block(op.n(), K);
    for (int r = 0; r < K; ++r) {
      block.col(r) = op.B().col(r).cwiseProduct(op.A().col(i));
    }
    const CMat cross = phi_t.adjoint() * block;
    Eigen::JacobiSVD<CMat> svd(cross);
    beta = std::max(beta, svd.singularValues()(0));
  }
  return beta;
}

CertificateReport verify_certificate(const CMat& Y, const CVec& p,
                                     const SupportSet& T, const CMat& sign_x0t,
                                     Real gamma, Real delta, Real beta) {
  CertificateReport rep;
  rep.gamma = gamma;
  rep.delta = delta;
  rep.beta = beta;

  Real res_sq = 0.0;
  for (int t = 0; t < T.size(); ++t) {
    res_sq += (Y.col(T[t]) - sign_x0t.col(t)).squaredNorm();
  }
  rep.cert_residual = std::sqrt(res_sq);

  rep.theta = 0.0;
  for (int i : T.complement(static_cast<int>(Y.cols()))) {
    rep.theta = std::max(rep.theta, Y.col(i).norm());
  }

  rep.tau = T.empty() ? 0.0 : p.norm() / std::sqrt(static_cast<Real>(T.size()));
  rep.rho = rep.theta + beta / (4.0 * std::sqrt(2.0) * gamma * (1.0 - delta));

  rep.pass_cert_residual =
      rep.cert_residual <= 1.0 / (4.0 * std::sqrt(2.0) * gamma);
  rep.pass_theta = rep.theta <= 0.5;
  rep.pass_delta = rep.delta <= 0.5;
  rep.pass_inexact_duality =
      rep.pass_cert_residual && rep.pass_theta && rep.pass_delta;
  rep.pass_noisy_condition = rep.rho < 1.0;
  return rep;
}

NoisyConstants noisy_error_constants(Real delta, Real theta, Real beta,
                                     Real gamma, Real tau) {
  const Real rho = theta + beta / (4.0 * std::sqrt(2.0) * gamma * (1.0 - delta));
  if (rho >= 1.0) {
    throw std::domain_error("noisy_error_constants: rho >= 1");
  }
  const Real mu = std::sqrt(1.0 + delta) / (1.0 - delta);
  const Real root8 = 2.0 * std::sqrt(2.0);
  NoisyConstants c;
  c.C1 = 2.0 * mu + mu / (root8 * gamma * (1.0 - rho)) +
         beta * mu / (root8 * gamma * (1.0 - delta) * (1.0 - rho));
  c.C2 = 2.0 * tau / (1.0 - rho) +
         2.0 * beta * tau / ((1.0 - delta) * (1.0 - rho));
  return c;
}

Real gaussian_gamma_bound(int n, int m, Real alpha) {
  return std::sqrt(m * std::log(static_cast<Real>(m) * n / 2.0) +
                   alpha * std::log(static_cast<Real>(n)));
}

Real fourier_gamma_bound(int m, int k) {
  return std::sqrt(2.0 * m * std::log(2.0 * static_cast<Real>(k) * m) +
                   2.0 * m + 1.0);
}

int default_golfing_depth(int j, Real gamma) {
  return static_cast<int>(std::ceil(
      std::log(4.0 * std::sqrt(2.0 * j) * gamma) / std::log(2.0)));
}

}  // namespace sbd
