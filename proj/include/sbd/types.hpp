#ifndef SBD_TYPES_HPP
#define SBD_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbd {

using Real = double;
using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// A lifted unknown X = [c_1 h_1 ... c_M h_M] is stored as a plain K x M
// complex matrix; the c/h factorization is only an interpretation applied
// at extraction time.
using LiftedMatrix = CMat;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Sorted, duplicate-free set of column indices (0-based) into [0, M).
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(std::vector<int> indices, int num_columns);

  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  bool contains(int j) const;
  const std::vector<int>& indices() const { return indices_; }
  int operator[](int i) const { return indices_[static_cast<size_t>(i)]; }
  std::vector<int> complement(int num_columns) const;

  bool operator==(const SupportSet& other) const {
    return indices_ == other.indices_;
  }

 private:
  std::vector<int> indices_;
};

enum class EnsembleTag { kGaussian, kFourier, kExplicit };

std::string to_string(EnsembleTag tag);
EnsembleTag ensemble_from_string(const std::string& name);

// Known overcomplete atom matrix A (N x M).
struct Dictionary {
  CMat entries;
  EnsembleTag ensemble_tag = EnsembleTag::kExplicit;

  int n() const { return static_cast<int>(entries.rows()); }
  int m() const { return static_cast<int>(entries.cols()); }
};

// Known modulation subspace B (N x K, orthonormal columns).
class SubspaceBasis {
 public:
  // Rejects input whose Gram deviates from I_K by more than 1e-12.
  explicit SubspaceBasis(CMat entries);

  const CMat& entries() const { return entries_; }
  Real mu_max() const { return mu_max_; }
  int n() const { return static_cast<int>(entries_.rows()); }
  int k() const { return static_cast<int>(entries_.cols()); }

 private:
  CMat entries_;
  Real mu_max_ = 0.0;
};

// max_{i,j} sqrt(N) |B_ij|
Real coherence(const CMat& basis_entries);

}  // namespace sbd

#endif  // SBD_TYPES_HPP
