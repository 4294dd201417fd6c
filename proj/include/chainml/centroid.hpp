#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chainml/feature_vector.hpp"
#include "chainml/fixed_point.hpp"
#include "chainml/perceptron.hpp"

namespace chainml {

// Nearest-centroid classifier over sparse binary features. Each class keeps
// the running mean of its samples; prediction picks the class whose centroid
// has the smallest squared Euclidean distance to the input. Distances only
// need the union of the input's active ids and the centroid's stored ids,
// every other coordinate contributes zero.
class CentroidModel {
 public:
  CentroidModel(std::uint32_t feature_count, std::uint32_t num_classes)
      : feature_count_(feature_count), classes_(num_classes) {
    if (feature_count_ == 0) fail(ErrorCode::InvalidArgument, "feature count must be positive");
    if (num_classes < 2) fail(ErrorCode::InvalidArgument, "need at least two classes");
  }

  std::uint32_t feature_count() const { return feature_count_; }
  std::uint32_t num_classes() const { return static_cast<std::uint32_t>(classes_.size()); }
  std::uint64_t version() const { return version_; }
  std::uint64_t sample_count(Label c) const { return classes_.at(c).count; }

  FixedPoint centroid(Label c, std::uint32_t id) const {
    const auto& m = classes_.at(c).centroid;
    const auto it = m.find(id);
    return it == m.end() ? FixedPoint::zero() : it->second;
  }

  FixedPoint squared_distance(Label c, const FeatureVector& x) const {
    x.check_bounds(feature_count_);
    std::set<std::uint32_t> ids(x.indices().begin(), x.indices().end());
    for (const auto& [id, _] : classes_.at(c).centroid) ids.insert(id);
    FixedPoint acc = FixedPoint::zero();
    auto next_active = x.indices().begin();
    for (const auto id : ids) {
      while (next_active != x.indices().end() && *next_active < id) ++next_active;
      const bool active = next_active != x.indices().end() && *next_active == id;
      const FixedPoint diff = (active ? FixedPoint::one() : FixedPoint::zero()) - centroid(c, id);
      acc += diff * diff;
    }
    return acc;
  }

  // Ties break to the lowest class id.
  Label predict(const FeatureVector& x) const {
    Label best = 0;
    FixedPoint best_dist = squared_distance(0, x);
    for (Label c = 1; c < num_classes(); ++c) {
      const FixedPoint d = squared_distance(c, x);
      if (d < best_dist) {
        best_dist = d;
        best = c;
      }
    }
    return best;
  }

  // Always folds the sample into class y's running mean:
  //   c <- (c*n + x) / (n+1),  n <- n+1
  // evaluated per coordinate in exact integer arithmetic with one rounding.
  UpdateResult update(const FeatureVector& x, Label y) {
    if (y >= num_classes()) fail(ErrorCode::InvalidArgument, "label out of range");
    x.check_bounds(feature_count_);
    auto& cls = classes_[y];
    const std::uint64_t n = cls.count;
    std::set<std::uint32_t> ids(x.indices().begin(), x.indices().end());
    for (const auto& [id, _] : cls.centroid) ids.insert(id);
    for (const auto id : ids) {
      const bool active =
          std::binary_search(x.indices().begin(), x.indices().end(), id);
      const FixedPoint numer =
          centroid(y, id) * FixedPoint::from_int(static_cast<std::int64_t>(n)) +
          (active ? FixedPoint::one() : FixedPoint::zero());
      const FixedPoint mean = numer / FixedPoint::from_int(static_cast<std::int64_t>(n) + 1);
      if (mean == FixedPoint::zero())
        cls.centroid.erase(id);
      else
        cls.centroid[id] = mean;
    }
    cls.count = n + 1;
    ++version_;
    return {true, version_};
  }

  void set_centroid(Label c, std::uint32_t id, FixedPoint v) {
    if (id >= feature_count_) fail(ErrorCode::FeatureOutOfRange, "centroid index");
    if (v == FixedPoint::zero())
      classes_.at(c).centroid.erase(id);
    else
      classes_.at(c).centroid[id] = v;
  }

  void set_sample_count(Label c, std::uint64_t n) { classes_.at(c).count = n; }
  void set_version(std::uint64_t v) { version_ = v; }

  std::string serialize() const {
    std::string out;
    out += "model=centroid\n";
    out += "features=" + std::to_string(feature_count_) + "\n";
    out += "classes=" + std::to_string(num_classes()) + "\n";
    out += "version=" + std::to_string(version_) + "\n";
    for (std::uint32_t c = 0; c < num_classes(); ++c)
      out += "n." + std::to_string(c) + "=" + std::to_string(classes_[c].count) + "\n";
    for (std::uint32_t c = 0; c < num_classes(); ++c) {
      for (const auto& [id, v] : classes_[c].centroid)
        out += "c." + std::to_string(c) + "." + std::to_string(id) + "=" +
               std::to_string(v.mantissa()) + "\n";
    }
    return out;
  }

  friend bool operator==(const CentroidModel& a, const CentroidModel& b) = default;

 private:
  struct ClassState {
    std::map<std::uint32_t, FixedPoint> centroid;
    std::uint64_t count = 0;

    friend bool operator==(const ClassState& a, const ClassState& b) = default;
  };

  std::uint32_t feature_count_;
  std::vector<ClassState> classes_;
  std::uint64_t version_ = 0;
};

}  // namespace chainml
