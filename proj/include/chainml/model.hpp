#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "chainml/centroid.hpp"
#include "chainml/feature_vector.hpp"
#include "chainml/perceptron.hpp"

namespace chainml {

using Model = std::variant<PerceptronModel, CentroidModel>;

inline Label predict(const Model& m, const FeatureVector& x) {
  return std::visit([&](const auto& model) { return model.predict(x); }, m);
}

inline UpdateResult update(Model& m, const FeatureVector& x, Label y) {
  return std::visit([&](auto& model) { return model.update(x, y); }, m);
}

inline std::uint64_t model_version(const Model& m) {
  return std::visit([](const auto& model) { return model.version(); }, m);
}

inline std::uint32_t model_feature_count(const Model& m) {
  return std::visit([](const auto& model) { return model.feature_count(); }, m);
}

inline std::uint32_t model_num_classes(const Model& m) {
  return std::visit([](const auto& model) { return model.num_classes(); }, m);
}

inline std::string serialize(const Model& m) {
  return std::visit([](const auto& model) { return model.serialize(); }, m);
}

// 0-1 loss: misclassified / |D|, clipped to [0,1]. The quotient is already
// in range; the clip stays as a guard because reward code depends on it.
inline FixedPoint evaluate_loss(const Model& m, const LabeledDataset& d) {
  if (d.empty()) fail(ErrorCode::InvalidArgument, "loss over empty dataset");
  std::int64_t wrong = 0;
  for (const auto& s : d)
    if (predict(m, s.x) != s.y) ++wrong;
  FixedPoint loss = FixedPoint::from_ratio(wrong, static_cast<std::int64_t>(d.size()));
  if (loss < FixedPoint::zero()) loss = FixedPoint::zero();
  if (loss > FixedPoint::one()) loss = FixedPoint::one();
  return loss;
}

namespace detail {

inline std::int64_t parse_i64(std::string_view v) {
  bool neg = false;
  std::size_t i = 0;
  if (i < v.size() && v[i] == '-') {
    neg = true;
    ++i;
  }
  if (i == v.size()) fail(ErrorCode::ParseError, "expected integer");
  unsigned long long acc = 0;
  for (; i < v.size(); ++i) {
    if (v[i] < '0' || v[i] > '9') fail(ErrorCode::ParseError, "expected integer");
    acc = acc * 10 + static_cast<unsigned long long>(v[i] - '0');
    if (acc > (1ull << 63)) fail(ErrorCode::Overflow, "integer too large");
  }
  if (!neg && acc == (1ull << 63)) fail(ErrorCode::Overflow, "integer too large");
  return neg ? -static_cast<std::int64_t>(acc) : static_cast<std::int64_t>(acc);
}

inline std::uint64_t parse_u64(std::string_view v) {
  if (v.empty()) fail(ErrorCode::ParseError, "expected integer");
  unsigned __int128 acc = 0;
  for (const char c : v) {
    if (c < '0' || c > '9') fail(ErrorCode::ParseError, "expected non-negative integer");
    acc = acc * 10 + static_cast<unsigned>(c - '0');
    if (acc > ~0ull) fail(ErrorCode::Overflow, "integer too large");
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace detail

// Parses the canonical key/value text produced by serialize().
inline Model deserialize_model(std::string_view text) {
  std::uint32_t features = 0, classes = 0;
  std::int64_t lr = 0, bias = 0;
  std::uint64_t version = 0;
  bool perceptron = false, seen_model = false;
  std::vector<std::pair<std::string, std::string>> entries;

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::ParseError, "model line missing '='");
    const auto key = line.substr(0, eq);
    const auto val = line.substr(eq + 1);
    if (key == "model") {
      seen_model = true;
      perceptron = val == "perceptron";
      if (!perceptron && val != "centroid")
        fail(ErrorCode::ParseError, "unknown model kind: " + std::string(val));
    } else if (key == "features") {
      features = static_cast<std::uint32_t>(detail::parse_u64(val));
    } else if (key == "classes") {
      classes = static_cast<std::uint32_t>(detail::parse_u64(val));
    } else if (key == "lr") {
      lr = detail::parse_i64(val);
    } else if (key == "bias") {
      bias = detail::parse_i64(val);
    } else if (key == "version") {
      version = detail::parse_u64(val);
    } else {
      entries.emplace_back(std::string(key), std::string(val));
    }
  }
  if (!seen_model) fail(ErrorCode::ParseError, "missing model kind");

  if (perceptron) {
    PerceptronModel m(features, FixedPoint::from_mantissa(lr));
    m.set_bias(FixedPoint::from_mantissa(bias));
    m.set_version(version);
    for (const auto& [key, val] : entries) {
      if (key.rfind("w.", 0) != 0) fail(ErrorCode::ParseError, "unknown model key: " + key);
      m.set_weight(static_cast<std::uint32_t>(detail::parse_u64(key.substr(2))),
                   FixedPoint::from_mantissa(detail::parse_i64(val)));
    }
    return m;
  }

  CentroidModel m(features, classes);
  m.set_version(version);
  for (const auto& [key, val] : entries) {
    if (key.rfind("n.", 0) == 0) {
      m.set_sample_count(static_cast<Label>(detail::parse_u64(key.substr(2))),
                         detail::parse_u64(val));
    } else if (key.rfind("c.", 0) == 0) {
      const auto dot = key.find('.', 2);
      if (dot == std::string::npos) fail(ErrorCode::ParseError, "bad centroid key: " + key);
      m.set_centroid(static_cast<Label>(detail::parse_u64(key.substr(2, dot - 2))),
                     static_cast<std::uint32_t>(detail::parse_u64(key.substr(dot + 1))),
                     FixedPoint::from_mantissa(detail::parse_i64(val)));
    } else {
      fail(ErrorCode::ParseError, "unknown model key: " + key);
    }
  }
  return m;
}

}  // namespace chainml
