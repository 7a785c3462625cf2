#include "impsense/balance.hpp"

namespace impsense::balance {

std::vector<Eigen::Index> random_undersample(Eigen::Index n, Eigen::Index target_count, std::uint64_t seed) {
  if (target_count < 0 || target_count > n) throw DataError("undersample target exceeds population size");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first target_count slots are a uniform sample.
  for (Eigen::Index i = 0; i < target_count; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(target_count));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace impsense::balance
