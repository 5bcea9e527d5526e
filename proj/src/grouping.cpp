#include "dapien/grouping.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "dapien/error.hpp"

namespace dapien {

std::string bit_key(const BitVector& x) {
  std::string key(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) key[i] = '1';
  }
  return key;
}

GroupedDataset group_by_unique_input(std::span<const Sample> samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptyDataset, "no samples to group");
  GroupedDataset grouped;
  grouped.d = samples.front().x.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.x.size() != grouped.d) {
      throw Error(ErrorKind::RaggedFeatures, "sample " + std::to_string(i) + " has " +
                                                 std::to_string(s.x.size()) + " features, expected " +
                                                 std::to_string(grouped.d));
    }
    for (auto bit : s.x) {
      if (bit > 1) throw Error(ErrorKind::DomainError, "sample " + std::to_string(i) + " is not binary");
    }
    if (!std::isfinite(s.y)) {
      throw Error(ErrorKind::InvalidTarget, "sample " + std::to_string(i) + " has a non-finite target");
    }
    auto [it, inserted] = index.try_emplace(bit_key(s.x), grouped.groups.size());
    if (inserted) grouped.groups.push_back({s.x, {}});
    grouped.groups[it->second].ys.push_back(s.y);
  }
  return grouped;
}

DistDataset build_dist_dataset(const GroupedDataset& grouped, DistFamily family) {
  DistDataset dist;
  dist.family = family;
  dist.rows.reserve(grouped.groups.size());
  for (const Group& g : grouped.groups) {
    try {
      if (family == DistFamily::Gaussian) {
        dist.rows.push_back({g.x, fit_gaussian(g.ys)});
      } else {
        dist.rows.push_back({g.x, fit_gamma(g.ys)});
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "group x=" + bit_key(g.x) + ": " + e.what());
    }
  }
  return dist;
}

double mean_group_size(const GroupedDataset& grouped) {
  if (grouped.groups.empty()) return 0.0;
  std::size_t total = 0;
  for (const Group& g : grouped.groups) total += g.ys.size();
  return static_cast<double>(total) / static_cast<double>(grouped.groups.size());
}

}  // namespace dapien
