#ifndef SBD_EXTRACTION_HPP
#define SBD_EXTRACTION_HPP

#include "sbd/types.hpp"

namespace sbd {

// Application-level parameters read off a solved lifted matrix: column j of
// X splits as c_j h_j with c_j = ||x_j||, and the modulation it induces is
// diag(B h_j).
struct RecoveredModel {
  SupportSet support;
  RVec amplitudes;    // c_j, aligned with support order
  CMat waveforms;     // K x J unit columns, aligned with support
  CMat modulations;   // N x J, column j = B h_j (diagonal of D_j)
};

// { j : ||x_j||_2 > threshold * max_i ||x_i||_2 }. Relative to the largest
// column norm so the rule is scale-free; empty X yields the empty set.
SupportSet extract_support(const LiftedMatrix& X_hat, Real threshold = 1e-3);

// c_j = ||x_j||, h_j = x_j / c_j on the extracted support. With
// canonical_phase, each h_j is rotated so its largest-magnitude entry is
// real positive (the model is phase-ambiguous per column).
RecoveredModel extract_parameters(const LiftedMatrix& X_hat,
                                  const SubspaceBasis& basis,
                                  Real threshold = 1e-3,
                                  bool canonical_phase = false);

}  // namespace sbd

#endif  // SBD_EXTRACTION_HPP
