#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "chainml/data_handler.hpp"

using namespace chainml;

namespace {
const Address kOwner = Address::from_index(2);
const Address kAlice = Address::from_index(30);
const Address kBob = Address::from_index(31);
const Address kCarol = Address::from_index(32);

FeatureVector fv(std::vector<std::uint32_t> v) { return FeatureVector(std::move(v)); }
}  // namespace

TEST_CASE("contributions get monotone ids and full claimable deposits") {
  DataHandler dh(kOwner);
  const auto id0 = dh.store_contribution(kOwner, fv({1, 2}), 1, kAlice, 100, 5);
  const auto id1 = dh.store_contribution(kOwner, fv({3}), 0, kBob, 40, 6);
  CHECK(id0 == 0);
  CHECK(id1 == 1);
  CHECK(dh.contribution(0).remaining_claimable == dh.contribution(0).deposit);
  CHECK_FALSE(dh.contribution(0).refunded);
  CHECK(dh.contribution(0).claimants.empty());

  CHECK_THROWS_AS(dh.store_contribution(kAlice, fv({}), 0, kAlice, 1, 7), ChainError);
}

TEST_CASE("refund marks and tallies") {
  DataHandler dh(kOwner);
  dh.store_contribution(kOwner, fv({1}), 1, kAlice, 100, 0);
  CHECK(dh.refunded_count(kAlice) == 0);
  CHECK(dh.mark_refunded(kOwner, 0) == 100);
  CHECK(dh.refunded_count(kAlice) == 1);
  CHECK(dh.total_refunded_count() == 1);
  CHECK(dh.contribution(0).remaining_claimable == 0);
  CHECK(dh.contribution(0).refunded);
  CHECK_THROWS_AS(dh.mark_refunded(kOwner, 0), ChainError);
}

TEST_CASE("claims deduct and exclude repeat claimants") {
  DataHandler dh(kOwner);
  dh.store_contribution(kOwner, fv({1}), 1, kAlice, 40, 0);
  CHECK_THROWS_AS(dh.deduct_claimable(kOwner, 0, 10, kAlice), ChainError);  // own deposit
  dh.deduct_claimable(kOwner, 0, 40, kBob);
  CHECK(dh.contribution(0).remaining_claimable == 0);
  CHECK(dh.contribution(0).claimants.count(kBob) == 1);
  CHECK_THROWS_AS(dh.deduct_claimable(kOwner, 0, 1, kBob), ChainError);    // repeat claimant
  CHECK_THROWS_AS(dh.deduct_claimable(kOwner, 0, 1, kCarol), ChainError);  // over-claim
}

TEST_CASE("sweep zeroes the claimable remainder without a refund") {
  DataHandler dh(kOwner);
  dh.store_contribution(kOwner, fv({1}), 1, kAlice, 70, 0);
  dh.deduct_claimable(kOwner, 0, 30, kBob);
  CHECK(dh.sweep(kOwner, 0) == 40);
  CHECK(dh.refunded_count(kAlice) == 0);
  CHECK_THROWS_AS(dh.sweep(kOwner, 0), ChainError);
}

TEST_CASE("accounting closes and the refund tally matches a recount") {
  std::mt19937_64 rng(977);
  DataHandler dh(kOwner);
  const std::vector<Address> people = {kAlice, kBob, kCarol};
  Amount deposits_in = 0, paid_out = 0;

  for (int t = 0; t < 600; ++t) {
    const auto roll = rng() % 4;
    if (roll == 0 || dh.size() == 0) {
      const Amount d = rng() % 500 + 1;
      dh.store_contribution(kOwner, fv({static_cast<std::uint32_t>(t % 7)}),
                            static_cast<Label>(rng() % 2), people[rng() % 3], d, t);
      deposits_in += d;
      continue;
    }
    const std::uint64_t id = rng() % dh.size();
    const auto& c = dh.contribution(id);
    try {
      if (roll == 1) {
        paid_out += dh.mark_refunded(kOwner, id);
      } else if (roll == 2) {
        const Address claimant = people[rng() % 3];
        const Amount amt = std::min<Amount>(rng() % 200 + 1, c.remaining_claimable);
        if (amt == 0) continue;
        dh.deduct_claimable(kOwner, id, amt, claimant);
        paid_out += amt;
      } else {
        paid_out += dh.sweep(kOwner, id);
      }
    } catch (const ChainError&) {
    }
    REQUIRE(deposits_in == paid_out + dh.outstanding_claimable());
  }

  // recount n(c) from the stored records
  for (const auto& who : people) {
    std::uint64_t n = 0;
    for (const auto& c : dh.contributions())
      if (c.contributor == who && c.refunded) ++n;
    CHECK(dh.refunded_count(who) == n);
  }
}

TEST_CASE("csv export") {
  DataHandler dh(kOwner);
  dh.store_contribution(kOwner, fv({1, 4}), 1, kAlice, 100, 9);
  dh.mark_refunded(kOwner, 0);
  std::ostringstream os;
  dh.export_csv(os);
  const std::string expect =
      "id,contributor,label,submitted_at,deposit,remaining_claimable,refunded\n"
      "0," + kAlice.hex() + ",1,9,100,0,1\n";
  CHECK(os.str() == expect);
}
