#include "sbd/types.hpp"

#include <algorithm>
#include <cmath>

namespace sbd {

SupportSet::SupportSet(std::vector<int> indices, int num_columns)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("SupportSet: duplicate column index");
  }
  if (!indices_.empty() &&
      (indices_.front() < 0 || indices_.back() >= num_columns)) {
    throw std::out_of_range("SupportSet: column index outside [0, M)");
  }
}

bool SupportSet::contains(int j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

std::vector<int> SupportSet::complement(int num_columns) const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(num_columns) - indices_.size());
  size_t pos = 0;
  for (int j = 0; j < num_columns; ++j) {
    if (pos < indices_.size() && indices_[pos] == j) {
      ++pos;
    } else {
      out.push_back(j);
    }
  }
  return out;
}

std::string to_string(EnsembleTag tag) {
  switch (tag) {
    case EnsembleTag::kGaussian: return "gaussian";
    case EnsembleTag::kFourier: return "fourier";
    case EnsembleTag::kExplicit: return "explicit";
  }
  return "explicit";
}

EnsembleTag ensemble_from_string(const std::string& name) {
  if (name == "gaussian") return EnsembleTag::kGaussian;
  if (name == "fourier") return EnsembleTag::kFourier;
  if (name == "explicit") return EnsembleTag::kExplicit;
  throw std::invalid_argument("unknown ensemble tag: " + name);
}

Real coherence(const CMat& basis_entries) {
  const Real root_n = std::sqrt(static_cast<Real>(basis_entries.rows()));
  return root_n * basis_entries.cwiseAbs().maxCoeff();
}

SubspaceBasis::SubspaceBasis(CMat entries) : entries_(std::move(entries)) {
  if (entries_.rows() < entries_.cols()) {
    throw DimensionError("SubspaceBasis: need N >= K");
  }
  const int k = static_cast<int>(entries_.cols());
  const CMat gram = entries_.adjoint() * entries_;
  const Real dev = (gram - CMat::Identity(k, k)).operatorNorm();
  if (dev > 1e-12) {
    throw std::invalid_argument(
        "SubspaceBasis: columns not orthonormal (||B^H B - I|| = " +
        std::to_string(dev) + ")");
  }
  mu_max_ = coherence(entries_);
}

}  // namespace sbd
