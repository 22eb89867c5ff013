#include "sbd/ensembles.hpp"

#include <cmath>

#include "sbd/operators.hpp"
#include "sbd/rng.hpp"

namespace sbd {

namespace {

Complex unit_phase(Real angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

Dictionary gaussian_dictionary(int n, int m, std::uint64_t seed) {
  if (n >= m) {
    throw DimensionError("gaussian_dictionary: requires N < M");
  }
  Rng rng(seed);
  CMat a(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      a(i, j) = Complex(rng.normal(), 0.0);
    }
  }
  return {std::move(a), EnsembleTag::kGaussian};
}

Dictionary fourier_dictionary(int n, int m, std::uint64_t seed) {
  if (n >= m) {
    throw DimensionError("fourier_dictionary: requires N < M");
  }
  Rng rng(seed);
  CMat a(n, m);
  const Real step = -2.0 * M_PI / static_cast<Real>(m);
  for (int i = 0; i < n; ++i) {
    const auto row = static_cast<Real>(rng.below(static_cast<std::uint64_t>(m)));
    for (int j = 0; j < m; ++j) {
      a(i, j) = unit_phase(step * row * static_cast<Real>(j));
    }
  }
  return {std::move(a), EnsembleTag::kFourier};
}

SubspaceBasis dft_subspace(int n, int k) {
  if (k >= n) {
    throw DimensionError("dft_subspace: requires K < N");
  }
  CMat b(n, k);
  const Real step = -2.0 * M_PI / static_cast<Real>(n);
  const Real scale = 1.0 / std::sqrt(static_cast<Real>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      b(i, j) = scale * unit_phase(step * static_cast<Real>(i) * static_cast<Real>(j));
    }
  }
  return SubspaceBasis(std::move(b));
}

Dictionary ula_manifold(int n, const std::vector<Real>& angles_deg) {
  CMat a(n, static_cast<Eigen::Index>(angles_deg.size()));
  for (size_t j = 0; j < angles_deg.size(); ++j) {
    const Real phase = M_PI * std::cos(angles_deg[j] * M_PI / 180.0);
    for (int r = 0; r < n; ++r) {
      a(r, static_cast<Eigen::Index>(j)) = unit_phase(static_cast<Real>(r) * phase);
    }
  }
  return {std::move(a), EnsembleTag::kExplicit};
}

GroundTruth random_ground_truth(int m, int k, int j, std::uint64_t seed) {
  if (j > m) {
    throw DimensionError("random_ground_truth: requires J <= M");
  }
  Rng rng(seed);
  GroundTruth gt;
  gt.support = SupportSet(rng.sample_without_replacement(m, j), m);
  gt.amplitudes = RVec(j);
  gt.waveforms = CMat(k, j);
  gt.X0 = CMat::Zero(k, m);
  for (int t = 0; t < j; ++t) {
    gt.amplitudes(t) = std::abs(rng.normal());
    CVec h(k);
    for (int i = 0; i < k; ++i) {
      h(i) = rng.complex_normal();
    }
    h /= h.norm();
    gt.waveforms.col(t) = h;
    gt.X0.col(gt.support[t]) = gt.amplitudes(t) * h;
  }
  return gt;
}

CVec synthesize_measurements(const GroundTruth& gt, const Dictionary& dict,
                             const SubspaceBasis& basis) {
  if (dict.entries.rows() != basis.entries().rows() ||
      gt.X0.cols() != dict.entries.cols() ||
      gt.waveforms.rows() != basis.entries().cols()) {
    throw DimensionError("synthesize_measurements: inconsistent dimensions");
  }
  CVec y = CVec::Zero(dict.entries.rows());
  for (int t = 0; t < gt.support.size(); ++t) {
    const CVec modulation = basis.entries() * gt.waveforms.col(t);
    y += gt.amplitudes(t) *
         modulation.cwiseProduct(dict.entries.col(gt.support[t]));
  }
  return y;
}

NoisyMeasurements add_noise(const CVec& y, const NoiseSpec& spec,
                            std::uint64_t seed) {
  if (spec.eta.has_value() == spec.target_nsr_db.has_value()) {
    throw std::invalid_argument(
        "add_noise: exactly one of eta / target_nsr_db must be set");
  }
  Real eta;
  if (spec.eta) {
    eta = *spec.eta;
    if (eta < 0.0) throw std::invalid_argument("add_noise: eta < 0");
  } else {
    if (spec.x0_frobenius <= 0.0) {
      throw std::invalid_argument("add_noise: target_nsr_db needs x0_frobenius");
    }
    eta = std::pow(10.0, *spec.target_nsr_db / 20.0) * spec.x0_frobenius;
  }
  if (eta == 0.0) {
    return {y, 0.0};
  }
  Rng rng(seed);
  CVec noise(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    noise(i) = rng.complex_normal();
  }
  noise *= eta / noise.norm();
  return {y + noise, eta};
}

}  // namespace sbd
