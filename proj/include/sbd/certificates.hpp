#ifndef SBD_CERTIFICATES_HPP
#define SBD_CERTIFICATES_HPP

#include <cstdint>
#include <vector>

#include "sbd/operators.hpp"

namespace sbd {

// Verified sufficient-condition quantities for exact and stable recovery.
struct CertificateReport {
  Real delta = 0.0;          // ||Phi_T^H Phi_T - I_T||
  Real gamma = 0.0;          // operator-norm bound used
  Real theta = 0.0;          // ||Y_{T^C}||_{2,inf}
  Real cert_residual = 0.0;  // ||Y_T - sign(X0_T)||_F
  Real beta = 0.0;           // max cross-block correlation
  Real tau = 0.0;            // ||p||_2 / sqrt(J)
  Real rho = 0.0;            // theta + beta / (4 sqrt(2) gamma (1 - delta))
  bool pass_cert_residual = false;  // <= 1/(4 sqrt(2) gamma)
  bool pass_theta = false;          // <= 1/2
  bool pass_delta = false;          // <= 1/2
  bool pass_inexact_duality = false;  // all three above
  bool pass_noisy_condition = false;  // rho < 1
};

// ||Phi_T^H Phi_T - I||, largest eigenvalue magnitude of the compact Gram
// deviation.
Real isometry_constant(const CMat& phi_t_compact);

struct LsCertificate {
  CMat Y;  // K x M, Y_T = sign(X0_T) by construction
  CVec p;  // length N
};

// Least-squares certificate p = Phi_T (Phi_T^H Phi_T)^{-1} vec(sign(X0_T)),
// Y = L^*(p). sign_x0t is K x J, columns aligned with T. Requires delta < 1.
LsCertificate ls_certificate(const MeasurementOperator& op, const SupportSet& T,
                             const CMat& sign_x0t);

// Random equal-size partition of [0, N) into P subsets, resampled until
// max_p ||B_p - (Q/N) I_K|| < Q/(4N) with B_p = sum_{l in Gamma_p} b'_l b'^H_l.
std::vector<std::vector<int>> golfing_partition(int n, int p,
                                                const SubspaceBasis& basis,
                                                std::uint64_t seed,
                                                int max_attempts = 200);

struct GolfingState {
  std::vector<std::vector<int>> partition;
  CMat Y;                         // K x M, final candidate certificate Y_P
  std::vector<CMat> iterates;     // W_p = Y_{p,T} - sign(X0_T), compact K x J
  std::vector<Real> w_norms;      // ||W_p||_F per iteration
};

// Y_p = Y_{p-1} - (N/Q) L_p^* L_p (Y_{p-1,T} - sign(X0_T)), Y_0 = 0.
GolfingState golfing_certificate(const MeasurementOperator& op,
                                 const SupportSet& T, const CMat& sign_x0t,
                                 int p, std::uint64_t seed);

// max over i in T^C of || Phi_T^H [phi_{1,i} ... phi_{K,i}] ||.
Real beta_crosscorrelation(const MeasurementOperator& op, const SupportSet& T);

CertificateReport verify_certificate(const CMat& Y, const CVec& p,
                                     const SupportSet& T, const CMat& sign_x0t,
                                     Real gamma, Real delta, Real beta);

struct NoisyConstants {
  Real C1 = 0.0;
  Real C2 = 0.0;
};

// mu = sqrt(1+delta)/(1-delta);
// C1 = 2 mu + mu/(2 sqrt2 gamma (1-rho)) + beta mu/(2 sqrt2 gamma (1-delta)(1-rho));
// C2 = 2 tau/(1-rho) + 2 beta tau/((1-delta)(1-rho)). Requires rho < 1.
NoisyConstants noisy_error_constants(Real delta, Real theta, Real beta,
                                     Real gamma, Real tau);

// High-probability operator-norm bounds.
Real gaussian_gamma_bound(int n, int m, Real alpha = 2.0);
Real fourier_gamma_bound(int m, int k);

// Smallest golfing depth meeting ||W_P||_F <= 1/(4 sqrt2 gamma):
// ceil(log(4 sqrt(2 J) gamma) / log 2).
int default_golfing_depth(int j, Real gamma);

}  // namespace sbd

#endif  // SBD_CERTIFICATES_HPP
