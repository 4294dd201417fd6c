#pragma once

#include <cstdint>
#include <string>

#include "chainml/data_handler.hpp"
#include "chainml/feature_vector.hpp"
#include "chainml/ledger.hpp"
#include "chainml/model.hpp"
#include "chainml/points.hpp"

namespace chainml {

// Parameters of the deposit-refund-take mechanism. Times are seconds of
// simulated time, amounts are denomination units.
struct DrtConfig {
  Timestamp refund_wait = kWeek;            // t
  Timestamp creator_take_wait = 4 * kWeek;  // t_c
  Timestamp anyone_take_wait = 8 * kWeek;   // t_a
  std::uint64_t deposit_constant = 86'400ull * kUnit;  // c_d, Amount * seconds
  Amount minimum_deposit = kUnit;           // d_min
  Amount minimum_take_reward = kUnit / 10;  // epsilon

  void validate() const {
    if (!(anyone_take_wait >= creator_take_wait && creator_take_wait > refund_wait))
      fail(ErrorCode::InvalidArgument, "need t_a >= t_c > t");
    if (minimum_take_reward == 0) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (minimum_deposit < minimum_take_reward)
      fail(ErrorCode::InvalidArgument, "d_min must be at least epsilon");
  }
};

// Self-assessment mechanism: the deployed model validates new contributions.
// Deposits scale inversely with the time since the last update, refunds
// return the deposit once the model still agrees after the wait, previously
// refunded contributors take shares of bad deposits, and two timed tiers
// sweep whatever would otherwise stay locked up.
class DrtContract {
 public:
  DrtContract(Ledger& ledger, Address self, Address creator, DrtConfig cfg, Model initial_model)
      : ledger_(ledger),
        self_(self),
        creator_(creator),
        cfg_(cfg),
        model_(std::move(initial_model)),
        data_(self),
        last_update_time_(ledger.now()) {
    cfg_.validate();
    ledger_.charge_gas(creator_, ActionKind::Deploy);
    ledger_.record_checkpoint(model_version(model_), serialize(model_));
  }

  const DrtConfig& config() const { return cfg_; }
  const Model& model() const { return model_; }
  const DataHandler& data() const { return data_; }
  const PointsLedger& points() const { return points_; }
  const Address& creator() const { return creator_; }
  Timestamp last_update_time() const { return last_update_time_; }

  // d = max(d_min, c_d / max(1s, now - last_update_time)); integer floor,
  // clamped below by the 1-second gap.
  Amount required_deposit(Timestamp now) const {
    const Timestamp gap = now > last_update_time_ ? now - last_update_time_ : 0;
    const std::uint64_t scaled = cfg_.deposit_constant / (gap > 0 ? gap : 1);
    return scaled > cfg_.minimum_deposit ? scaled : cfg_.minimum_deposit;
  }

  // Exact duplicate (x, y) from the same contributor within the refund
  // window counts as spam.
  bool is_recent_duplicate(const Address& contributor, const FeatureVector& x, Label y,
                           Timestamp now) const {
    for (const auto& c : data_.contributions()) {
      if (c.contributor == contributor && c.y == y && c.x == x &&
          now < c.submitted_at + cfg_.refund_wait)
        return true;
    }
    return false;
  }

  std::uint64_t add_data(const Address& contributor, FeatureVector x, Label y,
                         Amount offered_deposit, Timestamp now) {
    x.check_bounds(model_feature_count(model_));
    if (y >= model_num_classes(model_)) fail(ErrorCode::InvalidArgument, "label out of range");
    if (is_recent_duplicate(contributor, x, y, now))
      fail(ErrorCode::DuplicateData, "same (x, y) within the refund window");
    const Amount required = required_deposit(now);
    if (offered_deposit < required)
      fail(ErrorCode::DepositTooLow,
           std::to_string(offered_deposit) + " < " + std::to_string(required));

    ledger_.to_escrow(contributor, offered_deposit);
    deposited_total_ += offered_deposit;
    const std::uint64_t id =
        data_.store_contribution(self_, std::move(x), y, contributor, offered_deposit, now);
    const Contribution& c = data_.contribution(id);
    const UpdateResult res = update(model_, c.x, y);
    last_update_time_ = now;
    if (res.changed) ledger_.record_checkpoint(res.version, serialize(model_));
    ledger_.charge_gas(contributor, res.changed ? ActionKind::AddDataWithUpdate
                                                : ActionKind::AddDataNoUpdate);
    ledger_.log_derived("drt_stored", {{"id", std::to_string(id)},
                                       {"who", contributor.hex()},
                                       {"deposit", std::to_string(offered_deposit)},
                                       {"changed", res.changed ? "1" : "0"}});
    return id;
  }

  // Refund eligibility: the original contributor, after the wait, while the
  // current model still agrees with the stored label.
  bool refund_open(const Address& caller, std::uint64_t id, Timestamp now) const {
    if (id >= data_.size()) return false;
    const Contribution& c = data_.contribution(id);
    return caller == c.contributor && !c.refunded && c.remaining_claimable > 0 &&
           now >= c.submitted_at + cfg_.refund_wait && predict(model_, c.x) == c.y;
  }

  Amount claim_refund(const Address& caller, std::uint64_t id, Timestamp now) {
    const Contribution& c = data_.contribution(id);
    if (caller != c.contributor) fail(ErrorCode::NotOwner, caller.hex());
    if (now < c.submitted_at + cfg_.refund_wait)
      fail(ErrorCode::TooEarly, "refund opens at " +
                                    std::to_string(c.submitted_at + cfg_.refund_wait));
    if (c.refunded) fail(ErrorCode::AlreadyRefunded, std::to_string(id));
    if (c.remaining_claimable == 0) fail(ErrorCode::NothingClaimable, std::to_string(id));
    if (predict(model_, c.x) != c.y) fail(ErrorCode::ModelDisagrees, std::to_string(id));

    const Amount paid = data_.mark_refunded(self_, id);
    refunded_total_ += paid;
    ledger_.from_escrow(caller, paid);
    points_.add_refund_point(caller);
    ledger_.charge_gas(caller, ActionKind::Other);
    ledger_.log_derived("drt_refund", {{"id", std::to_string(id)},
                                       {"who", caller.hex()},
                                       {"amount", std::to_string(paid)}});
    return paid;
  }

  // Take eligibility for an agent scanning the public dataset.
  bool take_open(const Address& reporter, std::uint64_t id) const {
    if (id >= data_.size()) return false;
    const Contribution& c = data_.contribution(id);
    return c.remaining_claimable >= cfg_.minimum_take_reward && reporter != c.contributor &&
           data_.refunded_count(reporter) > 0 && !c.claimants.count(reporter) &&
           predict(model_, c.x) != c.y;
  }

  // Reward share per the proportional rule, floored, clamped to
  // [epsilon, d_r]. n(c) is the claimant's refund tally and the denominator
  // is the global tally at call time.
  Amount take_reward(const Address& reporter, std::uint64_t id) const {
    const Contribution& c = data_.contribution(id);
    const std::uint64_t n_r = data_.refunded_count(reporter);
    const std::uint64_t n_total = data_.total_refunded_count();
    using u128 = unsigned __int128;
    const std::uint64_t share =
        n_total == 0 ? 0
                     : static_cast<std::uint64_t>(static_cast<u128>(c.deposit) * n_r / n_total);
    const Amount floored = share > cfg_.minimum_take_reward ? share : cfg_.minimum_take_reward;
    return floored < c.remaining_claimable ? floored : c.remaining_claimable;
  }

  Amount report_take(const Address& reporter, std::uint64_t id, Timestamp) {
    const Contribution& c = data_.contribution(id);
    if (predict(model_, c.x) == c.y) fail(ErrorCode::ModelAgrees, std::to_string(id));
    if (data_.refunded_count(reporter) == 0)
      fail(ErrorCode::NotYetRefundedReporter, reporter.hex());
    if (reporter == c.contributor) fail(ErrorCode::SelfReport, reporter.hex());
    if (c.claimants.count(reporter)) fail(ErrorCode::RepeatClaimant, reporter.hex());
    if (c.remaining_claimable == 0) fail(ErrorCode::NothingClaimable, std::to_string(id));
    // Dust below epsilon is left for the timed sweep so every take pays at
    // least the minimal reward.
    if (c.remaining_claimable < cfg_.minimum_take_reward)
      fail(ErrorCode::RewardBelowMinimum, std::to_string(c.remaining_claimable));

    const Amount reward = take_reward(reporter, id);
    data_.deduct_claimable(self_, id, reward, reporter);
    taken_total_ += reward;
    ledger_.from_escrow(reporter, reward);
    ledger_.charge_gas(reporter, ActionKind::Other);
    ledger_.log_derived("drt_take", {{"id", std::to_string(id)},
                                     {"who", reporter.hex()},
                                     {"amount", std::to_string(reward)}});
    return reward;
  }

  bool sweep_open(const Address& caller, std::uint64_t id, Timestamp now) const {
    if (id >= data_.size()) return false;
    const Contribution& c = data_.contribution(id);
    if (c.remaining_claimable == 0) return false;
    const Timestamp wait = caller == creator_ ? cfg_.creator_take_wait : cfg_.anyone_take_wait;
    return now >= c.submitted_at + wait;
  }

  // The creator may sweep a contribution's whole remaining deposit after
  // t_c; anyone may after t_a.
  Amount sweep_stale(const Address& caller, std::uint64_t id, Timestamp now) {
    const Contribution& c = data_.contribution(id);
    if (c.remaining_claimable == 0) fail(ErrorCode::NothingClaimable, std::to_string(id));
    const Timestamp wait = caller == creator_ ? cfg_.creator_take_wait : cfg_.anyone_take_wait;
    if (now < c.submitted_at + wait)
      fail(ErrorCode::TooEarly, "sweep opens at " + std::to_string(c.submitted_at + wait));

    const Amount paid = data_.sweep(self_, id);
    swept_total_ += paid;
    ledger_.from_escrow(caller, paid);
    ledger_.charge_gas(caller, ActionKind::Other);
    ledger_.log_derived("drt_sweep", {{"id", std::to_string(id)},
                                      {"who", caller.hex()},
                                      {"amount", std::to_string(paid)}});
    return paid;
  }

  // Restores the model to a checkpointed version. The restored state gets a
  // fresh version number so the checkpoint log stays strictly increasing;
  // nothing is erased.
  void rollback_to(std::uint64_t version) {
    if (version == model_version(model_)) return;
    const ModelCheckpoint& cp = ledger_.checkpoint(version);
    Model restored = deserialize_model(cp.state);
    const std::uint64_t fresh = ledger_.checkpoints().back().version + 1;
    std::visit([&](auto& m) { m.set_version(fresh); }, restored);
    model_ = std::move(restored);
    ledger_.record_checkpoint(fresh, serialize(model_));
    ledger_.charge_gas(creator_, ActionKind::Other);
    ledger_.log_derived("rollback", {{"to", std::to_string(version)},
                                     {"as", std::to_string(fresh)}});
  }

  // deposits in == refunds + takes + sweeps + sum of outstanding d_r
  bool escrow_closed() const {
    return deposited_total_ ==
           refunded_total_ + taken_total_ + swept_total_ + data_.outstanding_claimable();
  }

  Amount deposited_total() const { return deposited_total_; }
  Amount refunded_total() const { return refunded_total_; }
  Amount taken_total() const { return taken_total_; }
  Amount swept_total() const { return swept_total_; }

  std::string state_text() const {
    std::string out;
    out += "drt.last_update=" + std::to_string(last_update_time_) + "\n";
    out += "drt.deposited=" + std::to_string(deposited_total_) + "\n";
    out += "drt.refunded=" + std::to_string(refunded_total_) + "\n";
    out += "drt.taken=" + std::to_string(taken_total_) + "\n";
    out += "drt.swept=" + std::to_string(swept_total_) + "\n";
    out += "model:\n" + serialize(model_);
    out += data_.state_text();
    out += points_.state_text();
    return out;
  }

 private:
  Ledger& ledger_;
  Address self_;
  Address creator_;
  DrtConfig cfg_;
  Model model_;
  DataHandler data_;
  PointsLedger points_;
  Timestamp last_update_time_;
  Amount deposited_total_ = 0;
  Amount refunded_total_ = 0;
  Amount taken_total_ = 0;
  Amount swept_total_ = 0;
};

}  // namespace chainml
