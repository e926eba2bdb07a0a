#include "s3a/partition.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "s3a/error.hpp"

namespace s3a {

GroupPartition build_partition(std::span<const int> class_labels,
                               std::span<const int> subclass_labels) {
  if (class_labels.size() != subclass_labels.size()) {
    throw Error(Errc::InvalidLabels, "label lists differ in length: " +
                                         std::to_string(class_labels.size()) + " vs " +
                                         std::to_string(subclass_labels.size()));
  }
  if (class_labels.empty()) throw Error(Errc::EmptyBatch, "cannot partition an empty batch");

  GroupPartition p;
  p.class_labels_.assign(class_labels.begin(), class_labels.end());
  p.subclass_labels_.assign(subclass_labels.begin(), subclass_labels.end());

  int max_class = 0;
  int max_sub = 0;
  std::map<std::pair<int, int>, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < class_labels.size(); ++i) {
    const int c = class_labels[i];
    const int s = subclass_labels[i];
    if (c < 0 || s < 0) {
      throw Error(Errc::InvalidLabels, "negative label at sample " + std::to_string(i));
    }
    max_class = std::max(max_class, c);
    max_sub = std::max(max_sub, s);
    buckets[{c, s}].push_back(i);
  }

  p.class_count_ = static_cast<std::size_t>(max_class) + 1;
  p.subclass_counts_.assign(p.class_count_, static_cast<std::size_t>(max_sub) + 1);
  for (int c = 0; c <= max_class; ++c) {
    for (int s = 0; s <= max_sub; ++s) {
      auto it = buckets.find({c, s});
      if (it == buckets.end()) {
        p.empty_slots_.emplace_back(c, s);
      } else {
        p.groups_.push_back(Group{c, s, std::move(it->second)});
      }
    }
  }
  return p;
}

GroupPartition GroupPartition::class_level() const {
  std::vector<int> zeros(class_labels_.size(), 0);
  return build_partition(class_labels_, zeros);
}

GroupPartition GroupPartition::permuted(std::span<const std::size_t> order) const {
  if (order.size() != sample_count()) {
    throw Error(Errc::InvalidLabels, "permutation length does not match batch size");
  }
  std::vector<int> cls(order.size());
  std::vector<int> sub(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= sample_count()) {
      throw Error(Errc::IndexError, "permutation entry out of range");
    }
    cls[k] = class_labels_[order[k]];
    sub[k] = subclass_labels_[order[k]];
  }
  return build_partition(cls, sub);
}

Matrix slice_columns(const Matrix& m, std::span<const std::size_t> indices) {
  if (indices.empty()) throw Error(Errc::EmptyBatch, "slice_columns: no indices");
  Matrix out(m.rows(), indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= m.cols()) {
      throw Error(Errc::IndexError, "column " + std::to_string(indices[k]) + " out of range [0, " +
                                        std::to_string(m.cols()) + ")");
    }
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto src = m.row(r);
    auto dst = out.row(r);
    for (std::size_t k = 0; k < indices.size(); ++k) dst[k] = src[indices[k]];
  }
  return out;
}

}  // namespace s3a
