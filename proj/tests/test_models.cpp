#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "chainml/dataset.hpp"
#include "chainml/model.hpp"

using namespace chainml;

namespace {

// Double-precision reference perceptron, written independently of the
// fixed-point implementation.
struct FloatPerceptron {
  std::vector<double> w;
  double bias = 0.0;
  double lr;

  FloatPerceptron(std::size_t n, double rate) : w(n, 0.0), lr(rate) {}

  int predict(const FeatureVector& x) const {
    double acc = bias;
    for (const auto id : x.indices()) acc += w[id];
    return acc > 0.0 ? 1 : 0;
  }

  void update(const FeatureVector& x, Label y) {
    if (predict(x) == static_cast<int>(y)) return;
    const double step = y == 1 ? lr : -lr;
    for (const auto id : x.indices()) w[id] += step;
    bias += step;
  }
};

// Dense brute-force nearest-centroid oracle over every feature coordinate.
Label brute_force_centroid_label(const std::vector<std::vector<double>>& centroids,
                                 const FeatureVector& x, std::size_t features) {
  Label best = 0;
  double best_dist = 0;
  for (Label c = 0; c < centroids.size(); ++c) {
    double dist = 0;
    for (std::size_t i = 0; i < features; ++i) {
      const bool active =
          std::binary_search(x.indices().begin(), x.indices().end(), static_cast<std::uint32_t>(i));
      const double diff = (active ? 1.0 : 0.0) - centroids[c][i];
      dist += diff * diff;
    }
    if (c == 0 || dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

FeatureVector fv(std::vector<std::uint32_t> v) { return FeatureVector(std::move(v)); }

}  // namespace

TEST_CASE("perceptron predict basics") {
  PerceptronModel m(4);
  m.set_weight(0, FixedPoint::one());
  CHECK(m.predict(fv({0})) == 1);
  CHECK(m.predict(fv({1})) == 0);  // zero score ties to class 0
  CHECK(m.predict(fv({})) == 0);
  m.set_weight(1, -FixedPoint::one());
  CHECK(m.predict(fv({0, 1})) == 0);  // exact zero again
  CHECK_THROWS_AS(m.predict(fv({7})), ChainError);
}

TEST_CASE("perceptron update only on mistakes") {
  PerceptronModel m(4, FixedPoint::one());
  m.set_weight(0, FixedPoint::one());
  const std::string before = m.serialize();
  const auto res = m.update(fv({0}), 1);  // already correct
  CHECK_FALSE(res.changed);
  CHECK(m.serialize() == before);
  CHECK(m.version() == 0);
}

TEST_CASE("perceptron mistake step") {
  PerceptronModel m(5, FixedPoint::from_ratio(1, 2));
  const auto res = m.update(fv({1, 3}), 1);  // predicts 0, wrong
  CHECK(res.changed);
  CHECK(m.weight(1).mantissa() == 500'000'000);
  CHECK(m.weight(3).mantissa() == 500'000'000);
  CHECK(m.weight(0).mantissa() == 0);
  CHECK(m.bias().mantissa() == 500'000'000);
  CHECK(m.version() == 1);

  const auto res2 = m.update(fv({}), 0);  // bias 0.5 > 0 predicts 1, wrong
  CHECK(res2.changed);
  CHECK(m.bias().mantissa() == 0);
  CHECK(m.version() == 2);
}

TEST_CASE("mistake-driven property") {
  std::mt19937_64 rng(101);
  PerceptronModel m(30, FixedPoint::from_ratio(1, 4));
  for (int i = 0; i < 500; ++i) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t f = 0; f < 30; ++f)
      if (rng() % 4 == 0) idx.push_back(f);
    const FeatureVector x(std::move(idx));
    const Label y = rng() % 2;
    const bool agreed = m.predict(x) == y;
    const std::uint64_t v = m.version();
    const auto res = m.update(x, y);
    CHECK(res.changed == !agreed);
    CHECK(m.version() == (agreed ? v : v + 1));
  }
}

TEST_CASE("centroid predict matches the brute-force oracle") {
  // c0 at the origin, c1 all-ones over 10 features, x with 8 active
  CentroidModel m(10, 2);
  std::vector<std::vector<double>> dense(2, std::vector<double>(10, 0.0));
  for (std::uint32_t i = 0; i < 10; ++i) {
    m.set_centroid(1, i, FixedPoint::one());
    dense[1][i] = 1.0;
  }
  const auto x = fv({0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(brute_force_centroid_label(dense, x, 10) == 1);
  CHECK(m.predict(x) == 1);

  // randomized agreement, away from floating-point ties
  std::mt19937_64 rng(131);
  CentroidModel r(12, 3);
  std::vector<std::vector<double>> rdense(3, std::vector<double>(12, 0.0));
  for (Label c = 0; c < 3; ++c) {
    for (std::uint32_t i = 0; i < 12; ++i) {
      const auto m1000 = static_cast<std::int64_t>(rng() % 1000);
      r.set_centroid(c, i, FixedPoint::from_ratio(m1000, 1000));
      rdense[c][i] = static_cast<double>(m1000) / 1000.0;
    }
  }
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t f = 0; f < 12; ++f)
      if (rng() % 3 == 0) idx.push_back(f);
    const FeatureVector x2(std::move(idx));
    CHECK(r.predict(x2) == brute_force_centroid_label(rdense, x2, 12));
  }
}

TEST_CASE("centroid ties break to the lowest class") {
  CentroidModel m(4, 2);  // both centroids at the origin
  CHECK(m.predict(fv({0})) == 0);
}

TEST_CASE("centroid running mean") {
  CentroidModel m(4, 2);
  m.update(fv({0}), 1);
  CHECK(m.centroid(1, 0).mantissa() == 1'000'000'000);
  CHECK(m.sample_count(1) == 1);
  const auto res = m.update(fv({}), 1);
  CHECK(res.changed);
  CHECK(m.centroid(1, 0).mantissa() == 500'000'000);
  CHECK(m.sample_count(1) == 2);
  CHECK(m.sample_count(0) == 0);
}

TEST_CASE("centroid incremental mean tracks the batch mean") {
  std::mt19937_64 rng(149);
  const std::uint32_t features = 16;
  CentroidModel m(features, 2);
  std::vector<std::uint64_t> count(features, 0);
  std::uint64_t n = 0;
  for (int t = 0; t < 400; ++t) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t f = 0; f < features; ++f)
      if (rng() % 3 == 0) idx.push_back(f);
    for (const auto f : idx) ++count[f];
    ++n;
    m.update(FeatureVector(std::move(idx)), 0);
  }
  REQUIRE(m.sample_count(0) == n);
  for (std::uint32_t f = 0; f < features; ++f) {
    const auto exact = FixedPoint::from_ratio(static_cast<std::int64_t>(count[f]),
                                              static_cast<std::int64_t>(n));
    const auto got = m.centroid(0, f);
    const auto drift = std::llabs(got.mantissa() - exact.mantissa());
    CHECK(drift <= static_cast<std::int64_t>(n));
  }
}

TEST_CASE("fixed-point perceptron tracks the float oracle") {
  SyntheticSpec spec;
  spec.num_features = 40;
  spec.train_size = 600;
  spec.test_size = 0;
  spec.noise = FixedPoint::zero();
  spec.active_per_class = 8;
  const auto data = generate_synthetic_dataset(spec, 7);

  // 0.1 is inexact in binary floating point, so the two models only stay in
  // lockstep because the data's margins dominate the representation error.
  PerceptronModel fixed(spec.num_features, FixedPoint::from_ratio(1, 10));
  FloatPerceptron reference(spec.num_features, 0.1);
  for (const auto& s : data.train) {
    CHECK(fixed.predict(s.x) == static_cast<Label>(reference.predict(s.x)));
    fixed.update(s.x, s.y);
    reference.update(s.x, s.y);
  }
}

TEST_CASE("noise-free synthetic data is learned perfectly after one pass") {
  SyntheticSpec spec;
  spec.num_features = 100;
  spec.train_size = 400;
  spec.test_size = 200;
  spec.noise = FixedPoint::zero();
  spec.active_per_class = 10;
  const auto data = generate_synthetic_dataset(spec, 3);

  Model m = PerceptronModel(spec.num_features);
  for (const auto& s : data.train) update(m, s.x, s.y);
  CHECK(evaluate_loss(m, data.test).mantissa() == 0);

  FloatPerceptron reference(spec.num_features, 1.0);
  for (const auto& s : data.train) reference.update(s.x, s.y);
  for (const auto& s : data.test) CHECK(reference.predict(s.x) == static_cast<int>(s.y));
}

TEST_CASE("evaluate_loss") {
  PerceptronModel p(4);
  p.set_weight(0, FixedPoint::one());
  p.set_weight(1, -FixedPoint::one());

  LabeledDataset all_right = {{fv({0}), 1}, {fv({1}), 0}, {fv({}), 0}};
  CHECK(evaluate_loss(Model(p), all_right).mantissa() == 0);

  LabeledDataset all_wrong = {{fv({0}), 0}, {fv({1}), 1}, {fv({0, 2}), 0}, {fv({}), 1}};
  CHECK(evaluate_loss(Model(p), all_wrong).mantissa() == 1'000'000'000);

  LabeledDataset one_of_three = {{fv({0}), 1}, {fv({1}), 0}, {fv({1}), 1}};
  CHECK(evaluate_loss(Model(p), one_of_three).mantissa() == 333'333'333);

  CHECK_THROWS_AS(evaluate_loss(Model(p), LabeledDataset{}), ChainError);

  // a centroid model memorizes its single sample
  CentroidModel c(4, 2);
  c.update(fv({1, 2}), 1);
  c.update(fv({0}), 0);
  LabeledDataset mem = {{fv({1, 2}), 1}};
  CHECK(evaluate_loss(Model(c), mem).mantissa() == 0);
}

TEST_CASE("model serialization round-trips bit-exactly") {
  std::mt19937_64 rng(163);
  for (int t = 0; t < 50; ++t) {
    PerceptronModel p(64, FixedPoint::from_ratio(1, 1 + static_cast<std::int64_t>(rng() % 9)));
    for (int i = 0; i < 20; ++i)
      p.set_weight(static_cast<std::uint32_t>(rng() % 64),
                   FixedPoint::from_mantissa(static_cast<std::int64_t>(rng() % 2000) - 1000));
    p.set_bias(FixedPoint::from_mantissa(static_cast<std::int64_t>(rng() % 2000) - 1000));
    p.set_version(rng() % 100);
    const Model restored = deserialize_model(p.serialize());
    CHECK(serialize(restored) == p.serialize());
    CHECK(std::get<PerceptronModel>(restored) == p);
  }
  for (int t = 0; t < 50; ++t) {
    CentroidModel c(32, 2 + static_cast<std::uint32_t>(rng() % 3));
    for (int i = 0; i < 30; ++i) {
      std::vector<std::uint32_t> idx;
      for (std::uint32_t f = 0; f < 32; ++f)
        if (rng() % 4 == 0) idx.push_back(f);
      c.update(FeatureVector(std::move(idx)), static_cast<Label>(rng() % c.num_classes()));
    }
    const Model restored = deserialize_model(c.serialize());
    CHECK(serialize(restored) == c.serialize());
    CHECK(std::get<CentroidModel>(restored) == c);
  }
}
