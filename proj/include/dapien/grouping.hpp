#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dapien/distributions.hpp"
#include "dapien/types.hpp"

namespace dapien {

/// All observed targets for one distinct input vector.
struct Group {
  BitVector x;
  std::vector<double> ys;
};

/// Groups are kept in first-appearance order of their input vector.
struct GroupedDataset {
  std::vector<Group> groups;
  std::size_t d = 0;
};

struct DistRow {
  BitVector x;
  DistParams theta;
};

struct DistDataset {
  std::vector<DistRow> rows;
  DistFamily family = DistFamily::Gaussian;
};

/// Throws EmptyDataset, RaggedFeatures, DomainError (non-binary feature) or
/// InvalidTarget (non-finite y).
GroupedDataset group_by_unique_input(std::span<const Sample> samples);

/// Fits the family to every group. Fit errors are rethrown with the
/// offending input vector in the message; the error kind is preserved.
DistDataset build_dist_dataset(const GroupedDataset& grouped, DistFamily family);

double mean_group_size(const GroupedDataset& grouped);

}  // namespace dapien
