#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chainml/errors.hpp"

namespace chainml {

// Class id in [0, num_classes). Range checks happen where a model knows its
// class count.
using Label = std::uint32_t;

// Sparse binary feature vector: the strictly increasing ids of the active
// features.
class FeatureVector {
 public:
  FeatureVector() = default;

  explicit FeatureVector(std::vector<std::uint32_t> active_indices)
      : indices_(std::move(active_indices)) {
    for (std::size_t i = 1; i < indices_.size(); ++i) {
      if (indices_[i - 1] >= indices_[i])
        fail(ErrorCode::InvalidArgument, "feature indices must be strictly increasing");
    }
  }

  const std::vector<std::uint32_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  void check_bounds(std::uint32_t feature_count) const {
    if (!indices_.empty() && indices_.back() >= feature_count)
      fail(ErrorCode::FeatureOutOfRange,
           "index " + std::to_string(indices_.back()) + " >= " + std::to_string(feature_count));
  }

  friend bool operator==(const FeatureVector& a, const FeatureVector& b) = default;

 private:
  std::vector<std::uint32_t> indices_;
};

struct LabeledSample {
  FeatureVector x;
  Label y = 0;

  friend bool operator==(const LabeledSample& a, const LabeledSample& b) = default;
};

using LabeledDataset = std::vector<LabeledSample>;

// Canonical sample line: space-separated sorted active indices, ';', label.
// These exact bytes are what dataset files contain and what commitment
// digests are computed over, so the format never changes.
inline std::string sample_line(const LabeledSample& s) {
  std::string out;
  for (std::size_t i = 0; i < s.x.indices().size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(s.x.indices()[i]);
  }
  out.push_back(';');
  out += std::to_string(s.y);
  return out;
}

inline LabeledSample parse_sample_line(std::string_view line) {
  const auto sep = line.rfind(';');
  if (sep == std::string_view::npos) fail(ErrorCode::ParseError, "sample line missing ';'");
  std::vector<std::uint32_t> idx;
  std::size_t i = 0;
  while (i < sep) {
    if (line[i] == ' ') {
      ++i;
      continue;
    }
    std::uint64_t v = 0;
    const std::size_t start = i;
    while (i < sep && line[i] >= '0' && line[i] <= '9') v = v * 10 + (line[i++] - '0');
    if (i == start || v > 0xFFFFFFFFull)
      fail(ErrorCode::ParseError, "bad feature index in sample line");
    idx.push_back(static_cast<std::uint32_t>(v));
  }
  std::uint64_t label = 0;
  std::size_t j = sep + 1;
  if (j == line.size()) fail(ErrorCode::ParseError, "sample line missing label");
  for (; j < line.size(); ++j) {
    if (line[j] < '0' || line[j] > '9') fail(ErrorCode::ParseError, "bad label in sample line");
    label = label * 10 + (line[j] - '0');
  }
  return LabeledSample{FeatureVector(std::move(idx)), static_cast<Label>(label)};
}

// One '\n'-terminated line per sample; hashed as exact bytes by commitments.
inline std::string serialize_samples(const LabeledDataset& d) {
  std::string out;
  for (const auto& s : d) {
    out += sample_line(s);
    out.push_back('\n');
  }
  return out;
}

inline LabeledDataset parse_samples(std::string_view text) {
  LabeledDataset out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    if (!line.empty()) out.push_back(parse_sample_line(line));
    pos = nl + 1;
  }
  return out;
}

}  // namespace chainml
