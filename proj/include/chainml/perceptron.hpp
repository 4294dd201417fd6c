#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "chainml/feature_vector.hpp"
#include "chainml/fixed_point.hpp"

namespace chainml {

struct UpdateResult {
  bool changed = false;
  std::uint64_t version = 0;
};

// Binary single-layer perceptron over sparse binary features. Weights are
// stored sparsely (absent id == zero weight, zero mantissas are never kept)
// so the state has exactly one representation. Mistake-driven: the weights
// move only when the prediction disagrees with the label.
class PerceptronModel {
 public:
  static constexpr std::uint32_t kNumClasses = 2;

  explicit PerceptronModel(std::uint32_t feature_count,
                           FixedPoint learning_rate = FixedPoint::one())
      : feature_count_(feature_count), learning_rate_(learning_rate) {
    if (feature_count_ == 0) fail(ErrorCode::InvalidArgument, "feature count must be positive");
    if (learning_rate_ <= FixedPoint::zero())
      fail(ErrorCode::InvalidArgument, "learning rate must be positive");
  }

  std::uint32_t feature_count() const { return feature_count_; }
  std::uint32_t num_classes() const { return kNumClasses; }
  std::uint64_t version() const { return version_; }
  FixedPoint learning_rate() const { return learning_rate_; }
  FixedPoint bias() const { return bias_; }

  FixedPoint weight(std::uint32_t id) const {
    const auto it = weights_.find(id);
    return it == weights_.end() ? FixedPoint::zero() : it->second;
  }

  FixedPoint score(const FeatureVector& x) const {
    x.check_bounds(feature_count_);
    FixedPoint acc = bias_;
    for (const auto id : x.indices()) acc += weight(id);
    return acc;
  }

  // Class 1 iff the score is strictly positive; the tie at exactly zero
  // breaks to the lowest class id.
  Label predict(const FeatureVector& x) const {
    return score(x) > FixedPoint::zero() ? 1 : 0;
  }

  UpdateResult update(const FeatureVector& x, Label y) {
    if (y >= kNumClasses) fail(ErrorCode::InvalidArgument, "label out of range");
    if (predict(x) == y) return {false, version_};
    const FixedPoint step = (y == 1) ? learning_rate_ : -learning_rate_;
    for (const auto id : x.indices()) set_weight(id, weight(id) + step);
    bias_ += step;
    ++version_;
    return {true, version_};
  }

  void set_weight(std::uint32_t id, FixedPoint w) {
    if (id >= feature_count_) fail(ErrorCode::FeatureOutOfRange, "weight index");
    if (w == FixedPoint::zero())
      weights_.erase(id);
    else
      weights_[id] = w;
  }

  void set_bias(FixedPoint b) { bias_ = b; }
  void set_version(std::uint64_t v) { version_ = v; }

  // Canonical sorted key/value text; bit-identical state implies
  // bit-identical serialization and vice versa.
  std::string serialize() const {
    std::string out;
    out += "model=perceptron\n";
    out += "features=" + std::to_string(feature_count_) + "\n";
    out += "lr=" + std::to_string(learning_rate_.mantissa()) + "\n";
    out += "bias=" + std::to_string(bias_.mantissa()) + "\n";
    out += "version=" + std::to_string(version_) + "\n";
    for (const auto& [id, w] : weights_)
      out += "w." + std::to_string(id) + "=" + std::to_string(w.mantissa()) + "\n";
    return out;
  }

  friend bool operator==(const PerceptronModel& a, const PerceptronModel& b) = default;

 private:
  std::uint32_t feature_count_;
  FixedPoint learning_rate_;
  FixedPoint bias_;
  std::map<std::uint32_t, FixedPoint> weights_;
  std::uint64_t version_ = 0;
};

}  // namespace chainml
