#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "chainml/errors.hpp"
#include "chainml/feature_vector.hpp"
#include "chainml/fixed_point.hpp"
#include "chainml/rng.hpp"

namespace chainml {

// Two-class sparse-binary generator. Each class owns a small characteristic
// index subset; a sample of class c activates each of c's indices with
// probability 1-noise and each of the other class's indices with probability
// noise. Everything else stays inactive, so samples stay sparse regardless
// of the feature count. noise=0 gives linearly separable data, noise=0.5
// makes the classes indistinguishable.
struct SyntheticSpec {
  std::uint32_t num_features = 1000;
  std::uint32_t train_size = 2000;
  std::uint32_t test_size = 500;
  FixedPoint noise;  // probability in [0,1]
  std::uint32_t active_per_class = 10;

  void validate() const {
    if (num_features < 2) fail(ErrorCode::InvalidArgument, "need at least 2 features");
    if (train_size == 0 && test_size == 0) fail(ErrorCode::InvalidArgument, "zero samples");
    if (noise < FixedPoint::zero() || noise > FixedPoint::one())
      fail(ErrorCode::InvalidArgument, "noise must be in [0,1]");
    if (active_per_class == 0 || 2ull * active_per_class > num_features)
      fail(ErrorCode::InvalidArgument, "characteristic subsets must fit the feature count");
  }
};

struct SplitDataset {
  LabeledDataset train;
  LabeledDataset test;
};

namespace detail {

// Bernoulli draw at 9-decimal resolution.
inline bool coin(Xoshiro256& rng, FixedPoint p) {
  return static_cast<std::int64_t>(rng.bounded(FixedPoint::kScale)) < p.mantissa();
}

inline LabeledSample synth_sample(const SyntheticSpec& spec, Xoshiro256& rng, Label cls) {
  std::vector<std::uint32_t> idx;
  // class 0 owns [0, k), class 1 owns [k, 2k)
  const std::uint32_t k = spec.active_per_class;
  for (std::uint32_t i = 0; i < 2 * k; ++i) {
    const bool own = (i < k) == (cls == 0);
    const FixedPoint p = own ? FixedPoint::one() - spec.noise : spec.noise;
    if (coin(rng, p)) idx.push_back(i);
  }
  return LabeledSample{FeatureVector(std::move(idx)), cls};
}

}  // namespace detail

// Deterministic for a given (spec, seed): same seed, byte-identical data.
// Labels alternate 0,1,0,1,... so both splits stay balanced.
inline SplitDataset generate_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Xoshiro256 rng(seed);
  SplitDataset out;
  out.train.reserve(spec.train_size);
  out.test.reserve(spec.test_size);
  for (std::uint32_t i = 0; i < spec.train_size; ++i)
    out.train.push_back(detail::synth_sample(spec, rng, i % 2));
  for (std::uint32_t i = 0; i < spec.test_size; ++i)
    out.test.push_back(detail::synth_sample(spec, rng, i % 2));
  return out;
}

inline void save_samples(const std::string& path, const LabeledDataset& d) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::InvalidArgument, "cannot write " + path);
  os << serialize_samples(d);
}

inline LabeledDataset load_samples(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::InvalidArgument, "cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_samples(text);
}

}  // namespace chainml
