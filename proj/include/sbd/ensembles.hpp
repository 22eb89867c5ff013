#ifndef SBD_ENSEMBLES_HPP
#define SBD_ENSEMBLES_HPP

#include <cstdint>
#include <optional>

#include "sbd/types.hpp"

namespace sbd {

// Real N x M matrix with i.i.d. standard normal entries; requires N < M.
Dictionary gaussian_dictionary(int n, int m, std::uint64_t seed);

// N rows drawn uniformly with replacement from the unnormalized M x M DFT
// matrix F (F^H F = M I); requires N < M.
Dictionary fourier_dictionary(int n, int m, std::uint64_t seed);

// First K columns of F_N / sqrt(N); mu_max = 1. Requires K < N.
SubspaceBasis dft_subspace(int n, int k);

// a(theta)_r = exp(i r pi cos(theta)) for a half-wavelength uniform linear
// array; one column per grid angle (degrees).
Dictionary ula_manifold(int n, const std::vector<Real>& angles_deg);

struct GroundTruth {
  SupportSet support;     // |T| = J
  RVec amplitudes;        // c_j > 0, aligned with support order
  CMat waveforms;         // K x J, unit-norm columns, aligned with support
  LiftedMatrix X0;        // K x M, column j = c_j h_j on T, zero off T
};

// Uniform support of size J; h_j complex standard normal then normalized;
// c_j = |standard normal| (folded so the nonzero coefficients are positive).
GroundTruth random_ground_truth(int m, int k, int j, std::uint64_t seed);

// y = sum_j c_j diag(B h_j) a_j; equals forward(X0) up to roundoff.
CVec synthesize_measurements(const GroundTruth& gt, const Dictionary& dict,
                             const SubspaceBasis& basis);

// Exactly one of eta / target_nsr_db drives the noise scale. target_nsr_db
// is 20 log10(||n||_2 / ||X0||_F) and needs x0_frobenius.
struct NoiseSpec {
  std::optional<Real> eta;
  std::optional<Real> target_nsr_db;
  Real x0_frobenius = 0.0;
};

struct NoisyMeasurements {
  CVec y;
  Real eta_actual = 0.0;
};

// n has i.i.d. standard-normal real and imaginary parts, rescaled to the
// requested l2 budget.
NoisyMeasurements add_noise(const CVec& y, const NoiseSpec& spec,
                            std::uint64_t seed);

}  // namespace sbd

#endif  // SBD_ENSEMBLES_HPP
