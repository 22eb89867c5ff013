#ifndef SBD_OPERATORS_HPP
#define SBD_OPERATORS_HPP

#include "sbd/types.hpp"

namespace sbd {

// Structured measurement operator y(n) = b'_n^H X a'_n, where b'_n and a'_n
// are the n-th columns of B^H and A^T. Immutable after construction; safe
// for concurrent read-only use.
class MeasurementOperator {
 public:
  MeasurementOperator(Dictionary dictionary, SubspaceBasis basis);

  int n() const { return static_cast<int>(dictionary_.entries.rows()); }
  int m() const { return static_cast<int>(dictionary_.entries.cols()); }
  int k() const { return static_cast<int>(basis_.entries().cols()); }

  const Dictionary& dictionary() const { return dictionary_; }
  const SubspaceBasis& basis() const { return basis_; }
  const CMat& A() const { return dictionary_.entries; }
  const CMat& B() const { return basis_.entries(); }

  // y(n) = b'_n^H X a'_n
  CVec forward(const CMat& X) const;
  // sum_l y_l b'_l a'_l^H
  CMat adjoint(const CVec& y) const;
  // Forward restricted to the support: columns of X outside T are ignored.
  CVec forward_on_support(const CMat& X, const SupportSet& T) const;
  CMat adjoint_on_support(const CVec& y, const SupportSet& T) const;

  // L L^* as an N x N matrix: (A A^H) .* (B B^H) elementwise.
  CMat gram() const;

 private:
  Dictionary dictionary_;
  SubspaceBasis basis_;
};

// Dense Phi in C^{N x KM} with columns phi_{i,j} = diag(b_i) a_j ordered
// waveform-index fast, atom-index slow. vec(X) uses column-major stacking
// of X so that Phi * vec(X) = forward(X).
CMat assemble_phi(const MeasurementOperator& op);

struct PhiRestriction {
  CMat phi_full;     // N x KM, columns outside T's K-blocks zeroed
  CMat phi_compact;  // N x KJ, zero blocks dropped, block order preserved
};

PhiRestriction restrict_support(const CMat& phi, const SupportSet& T, int k);

// Stacks the columns of X indexed by T into a KJ vector (block order of T).
CVec vec_on_support(const CMat& X, const SupportSet& T);

// G = X conj(A)^H, so that <G, b'_n e_n^H> = b'_n^H X a'_n.
CMat lift_to_G(const CMat& X, const Dictionary& dictionary);

struct NormEstimate {
  Real value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value of Phi via power iteration on L^* L, with a seeded
// random start vector.
NormEstimate operator_norm_estimate(const MeasurementOperator& op,
                                    Real tol = 1e-8, int max_iter = 5000,
                                    std::uint64_t seed = 0);

}  // namespace sbd

#endif  // SBD_OPERATORS_HPP
