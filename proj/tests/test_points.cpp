#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "chainml/points.hpp"

using namespace chainml;

namespace {
const Address kAlice = Address::from_index(40);
const Address kBob = Address::from_index(41);

FeatureVector fv(std::vector<std::uint32_t> v) { return FeatureVector(std::move(v)); }

// Independent check over raw timestamps: are there >= 4 consecutive 7-day
// windows containing a contribution?
bool streak_oracle(const std::vector<Timestamp>& times) {
  std::set<std::uint64_t> windows;
  for (const auto t : times) windows.insert(t / kWeek);
  std::uint64_t run = 0;
  std::uint64_t prev = 0;
  bool first = true;
  std::uint64_t best = 0;
  for (const auto w : windows) {
    run = (!first && w == prev + 1) ? run + 1 : 1;
    best = std::max(best, run);
    prev = w;
    first = false;
  }
  return best >= 4;
}
}  // namespace

TEST_CASE("milestone badges appear exactly once at the thresholds") {
  PointsLedger pl;
  std::uint64_t milestone10_awards = 0;
  for (int i = 1; i <= 120; ++i) {
    const auto award = pl.on_contribution(kAlice, fv({0}), 0, 0);
    CHECK(award.points_awarded == 1);
    for (const auto b : award.new_badges) {
      if (b == Badge::Milestone1) CHECK(i == 1);
      if (b == Badge::Milestone10) {
        CHECK(i == 10);
        ++milestone10_awards;
      }
      if (b == Badge::Milestone100) CHECK(i == 100);
    }
  }
  CHECK(milestone10_awards == 1);
  CHECK(pl.points(kAlice) == 120);
  CHECK(pl.badges(kAlice).count(Badge::Milestone100) == 1);
}

TEST_CASE("label spread badge on the second distinct label") {
  PointsLedger pl;
  auto a1 = pl.on_contribution(kAlice, fv({0}), 1, 0);
  for (const auto b : a1.new_badges) CHECK(b != Badge::LabelSpread);
  auto a2 = pl.on_contribution(kAlice, fv({1}), 1, 10);
  for (const auto b : a2.new_badges) CHECK(b != Badge::LabelSpread);
  auto a3 = pl.on_contribution(kAlice, fv({2}), 0, 20);
  CHECK(std::count(a3.new_badges.begin(), a3.new_badges.end(), Badge::LabelSpread) == 1);
}

TEST_CASE("streak badge needs four consecutive weekly windows") {
  const Timestamp day = 86'400;

  PointsLedger earned;
  const std::vector<Timestamp> hit = {0, 7 * day, 14 * day, 21 * day};
  CHECK(streak_oracle(hit));
  bool got = false;
  for (const auto t : hit) {
    const auto award = earned.on_contribution(kAlice, fv({0}), 0, t);
    got |= std::count(award.new_badges.begin(), award.new_badges.end(), Badge::Streak) > 0;
  }
  CHECK(got);

  PointsLedger skipped;
  const std::vector<Timestamp> miss = {0, 7 * day, 21 * day, 28 * day};
  CHECK_FALSE(streak_oracle(miss));
  for (const auto t : miss) skipped.on_contribution(kBob, fv({0}), 0, t);
  CHECK(skipped.badges(kBob).count(Badge::Streak) == 0);
}

TEST_CASE("streak matches the window oracle on random schedules") {
  std::mt19937_64 rng(317);
  for (int trial = 0; trial < 200; ++trial) {
    PointsLedger pl;
    std::vector<Timestamp> times;
    Timestamp t = 0;
    const int n = 3 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      t += rng() % (10 * 86'400);
      times.push_back(t);
      pl.on_contribution(kAlice, fv({0}), 0, t);
    }
    CHECK((pl.badges(kAlice).count(Badge::Streak) == 1) == streak_oracle(times));
  }
}

TEST_CASE("points are monotone and recomputable from the record") {
  std::mt19937_64 rng(331);
  PointsLedger incremental;
  struct Rec {
    Label y;
    Timestamp t;
  };
  std::vector<Rec> record;
  std::uint64_t last_points = 0;
  std::set<Badge> last_badges;
  Timestamp t = 0;
  for (int i = 0; i < 300; ++i) {
    t += rng() % 86'400;
    const Label y = rng() % 3;
    record.push_back({y, t});
    incremental.on_contribution(kAlice, fv({0}), y, t);

    CHECK(incremental.points(kAlice) >= last_points);
    const auto badges = incremental.badges(kAlice);
    CHECK(std::includes(badges.begin(), badges.end(), last_badges.begin(), last_badges.end()));
    last_points = incremental.points(kAlice);
    last_badges = badges;
  }

  PointsLedger replayed;
  for (const auto& r : record) replayed.on_contribution(kAlice, fv({0}), r.y, r.t);
  CHECK(replayed.points(kAlice) == incremental.points(kAlice));
  CHECK(replayed.badges(kAlice) == incremental.badges(kAlice));
}

TEST_CASE("refund credits flow into the same tally") {
  PointsLedger pl;
  pl.on_contribution(kAlice, fv({0}), 0, 0);
  pl.add_refund_point(kAlice);
  CHECK(pl.points(kAlice) == 2);
  CHECK(pl.contribution_count(kAlice) == 1);
}
