#include "sbd/extraction.hpp"

#include <cmath>

namespace sbd {

SupportSet extract_support(const LiftedMatrix& X_hat, Real threshold) {
  if (threshold <= 0.0) {
    throw std::invalid_argument("extract_support: threshold must be positive");
  }
  const int m = static_cast<int>(X_hat.cols());
  const RVec norms = X_hat.colwise().norm();
  const Real top = norms.size() > 0 ? norms.maxCoeff() : 0.0;
  std::vector<int> idx;
  if (top > 0.0) {
    for (int j = 0; j < m; ++j) {
      if (norms(j) > threshold * top) idx.push_back(j);
    }
  }
  return SupportSet(std::move(idx), m);
}

RecoveredModel extract_parameters(const LiftedMatrix& X_hat,
                                  const SubspaceBasis& basis, Real threshold,
                                  bool canonical_phase) {
  if (X_hat.rows() != basis.k()) {
    throw DimensionError("extract_parameters: X rows != basis columns");
  }
  RecoveredModel model;
  model.support = extract_support(X_hat, threshold);
  const int j = model.support.size();
  model.amplitudes = RVec(j);
  model.waveforms = CMat(X_hat.rows(), j);
  model.modulations = CMat(basis.n(), j);
  for (int t = 0; t < j; ++t) {
    const CVec x = X_hat.col(model.support[t]);
    const Real c = x.norm();
    CVec h = x / c;
    if (canonical_phase) {
      Eigen::Index top;
      h.cwiseAbs().maxCoeff(&top);
      const Complex pivot = h(top);
      h *= std::abs(pivot) / pivot;
    }
    model.amplitudes(t) = c;
    model.waveforms.col(t) = h;
    model.modulations.col(t) = basis.entries() * h;
  }
  return model;
}

}  // namespace sbd
