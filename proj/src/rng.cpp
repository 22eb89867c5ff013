#include "sbd/rng.hpp"

#include <numeric>

namespace sbd {

std::vector<int> Rng::sample_without_replacement(int population, int count) {
  if (count > population) {
    throw std::invalid_argument("sample_without_replacement: count > population");
  }
  // partial Fisher-Yates
  std::vector<int> pool(static_cast<size_t>(population));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<int>(below(static_cast<std::uint64_t>(population - i)));
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    out.push_back(pool[static_cast<size_t>(i)]);
  }
  return out;
}

std::vector<int> Rng::permutation(int n) {
  return sample_without_replacement(n, n);
}

}  // namespace sbd
