#include "sbd/operators.hpp"

#include <cmath>

#include "sbd/rng.hpp"

namespace sbd {

MeasurementOperator::MeasurementOperator(Dictionary dictionary,
                                         SubspaceBasis basis)
    : dictionary_(std::move(dictionary)), basis_(std::move(basis)) {
  if (dictionary_.entries.rows() != basis_.entries().rows()) {
    throw DimensionError("MeasurementOperator: A and B row counts differ");
  }
}

CVec MeasurementOperator::forward(const CMat& X) const {
  if (X.rows() != k() || X.cols() != m()) {
    throw DimensionError("forward: X must be K x M");
  }
  // y(n) = b'_n^H X a'_n = sum_m (B X)(n, m) A(n, m)
  return (B() * X).cwiseProduct(A()).rowwise().sum();
}

CMat MeasurementOperator::adjoint(const CVec& y) const {
  if (y.size() != n()) {
    throw DimensionError("adjoint: y must have length N");
  }
  return B().adjoint() * (y.asDiagonal() * A().conjugate());
}

CVec MeasurementOperator::forward_on_support(const CMat& X,
                                             const SupportSet& T) const {
  if (X.rows() != k() || X.cols() != m()) {
    throw DimensionError("forward_on_support: X must be K x M");
  }
  CVec y = CVec::Zero(n());
  for (int j : T.indices()) {
    y += (B() * X.col(j)).cwiseProduct(A().col(j));
  }
  return y;
}

CMat MeasurementOperator::adjoint_on_support(const CVec& y,
                                             const SupportSet& T) const {
  if (y.size() != n()) {
    throw DimensionError("adjoint_on_support: y must have length N");
  }
  CMat out = CMat::Zero(k(), m());
  const CVec scaled = y;
  for (int j : T.indices()) {
    out.col(j) = B().adjoint() * scaled.cwiseProduct(A().col(j).conjugate());
  }
  return out;
}

CMat MeasurementOperator::gram() const {
  return (A() * A().adjoint()).cwiseProduct(B() * B().adjoint());
}

CMat assemble_phi(const MeasurementOperator& op) {
  const int N = op.n(), M = op.m(), K = op.k();
  constexpr std::int64_t kMaxEntries = std::int64_t{1} << 27;
  if (static_cast<std::int64_t>(N) * K * M > kMaxEntries) {
    throw std::length_error("assemble_phi: K*M*N exceeds dense size budget");
  }
  CMat phi(N, static_cast<Eigen::Index>(K) * M);
  for (int j = 0; j < M; ++j) {
    for (int i = 0; i < K; ++i) {
      phi.col(static_cast<Eigen::Index>(j) * K + i) =
          op.B().col(i).cwiseProduct(op.A().col(j));
    }
  }
  return phi;
}

PhiRestriction restrict_support(const CMat& phi, const SupportSet& T, int k) {
  const Eigen::Index km = phi.cols();
  if (km % k != 0) {
    throw DimensionError("restrict_support: Phi column count not divisible by K");
  }
  PhiRestriction out;
  out.phi_full = CMat::Zero(phi.rows(), km);
  out.phi_compact = CMat(phi.rows(), static_cast<Eigen::Index>(k) * T.size());
  Eigen::Index pos = 0;
  for (int j : T.indices()) {
    const Eigen::Index block = static_cast<Eigen::Index>(j) * k;
    out.phi_full.middleCols(block, k) = phi.middleCols(block, k);
    out.phi_compact.middleCols(pos, k) = phi.middleCols(block, k);
    pos += k;
  }
  return out;
}

CVec vec_on_support(const CMat& X, const SupportSet& T) {
  const int k = static_cast<int>(X.rows());
  CVec v(static_cast<Eigen::Index>(k) * T.size());
  Eigen::Index pos = 0;
  for (int j : T.indices()) {
    v.segment(pos, k) = X.col(j);
    pos += k;
  }
  return v;
}

CMat lift_to_G(const CMat& X, const Dictionary& dictionary) {
  if (X.cols() != dictionary.entries.cols()) {
    throw DimensionError("lift_to_G: X column count must equal M");
  }
  return X * dictionary.entries.conjugate().adjoint();
}

NormEstimate operator_norm_estimate(const MeasurementOperator& op, Real tol,
                                    int max_iter, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x6f706e6f726dULL));
  CMat v(op.k(), op.m());
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      v(i, j) = rng.complex_normal();
    }
  }
  v /= v.norm();

  NormEstimate est;
  Real lambda_prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    CMat w = op.adjoint(op.forward(v));
    const Real lambda = w.norm();
    est.iterations = it;
    if (lambda == 0.0) {
      est.value = 0.0;
      est.converged = true;
      return est;
    }
    v = w / lambda;
    est.value = std::sqrt(lambda);
    if (it > 1 && std::abs(lambda - lambda_prev) <= tol * lambda) {
      est.converged = true;
      return est;
    }
    lambda_prev = lambda;
  }
  est.converged = false;
  return est;
}

}  // namespace sbd
