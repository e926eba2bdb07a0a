#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "s3a/matrix.hpp"

namespace s3a {

/// One (class, subclass) block of sample columns, indices ascending.
struct Group {
  int class_label = 0;
  int subclass_label = 0;
  std::vector<std::size_t> indices;

  bool operator==(const Group&) const = default;
};

/// Class -> subclass -> sample-column hierarchy over a batch.
///
/// Subclass labels form one vocabulary shared by every class, so each class
/// has the same number of subclass slots. Slots with no samples are kept in
/// empty_slots() and contribute nothing to grouped penalties.
class GroupPartition {
 public:
  GroupPartition() = default;

  std::size_t sample_count() const noexcept { return class_labels_.size(); }
  std::size_t class_count() const noexcept { return class_count_; }
  const std::vector<std::size_t>& subclass_counts() const noexcept { return subclass_counts_; }
  const std::vector<Group>& groups() const noexcept { return groups_; }
  const std::vector<std::pair<int, int>>& empty_slots() const noexcept { return empty_slots_; }
  const std::vector<int>& class_labels() const noexcept { return class_labels_; }
  const std::vector<int>& subclass_labels() const noexcept { return subclass_labels_; }

  /// Collapses every subclass into its class: one group per class.
  GroupPartition class_level() const;

  /// Partition of the batch whose column k is this batch's column order[k].
  GroupPartition permuted(std::span<const std::size_t> order) const;

  bool operator==(const GroupPartition&) const = default;

  friend GroupPartition build_partition(std::span<const int> class_labels,
                                        std::span<const int> subclass_labels);

 private:
  std::vector<int> class_labels_;
  std::vector<int> subclass_labels_;
  std::size_t class_count_ = 0;
  std::vector<std::size_t> subclass_counts_;
  std::vector<Group> groups_;
  std::vector<std::pair<int, int>> empty_slots_;
};

/// Throws InvalidLabels on length mismatch or negative labels, EmptyBatch when n = 0.
GroupPartition build_partition(std::span<const int> class_labels,
                               std::span<const int> subclass_labels);

/// Gathers the given columns in order. Throws IndexError, or EmptyBatch for no indices.
Matrix slice_columns(const Matrix& m, std::span<const std::size_t> indices);

}  // namespace s3a
