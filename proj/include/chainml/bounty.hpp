#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chainml/data_handler.hpp"
#include "chainml/feature_vector.hpp"
#include "chainml/fixed_point.hpp"
#include "chainml/ledger.hpp"
#include "chainml/model.hpp"
#include "chainml/rng.hpp"

namespace chainml {

enum class BountyPhase { Commitment, Participation, Reward, Aborted, Settled };

inline const char* phase_name(BountyPhase p) {
  switch (p) {
    case BountyPhase::Commitment: return "commitment";
    case BountyPhase::Participation: return "participation";
    case BountyPhase::Reward: return "reward";
    case BountyPhase::Aborted: return "aborted";
    case BountyPhase::Settled: return "settled";
  }
  fail(ErrorCode::InvalidArgument, "unknown phase");
}

struct EndCondition {
  std::optional<Timestamp> deadline;  // participation closes once now >= deadline
  std::optional<std::uint64_t> max_participants;
};

struct ParticipantRecord {
  std::uint64_t index = 0;  // t, 1-based
  Address address;
  Amount stake = kUnit;
  std::uint64_t version_before = 0;
  std::uint64_t version_after = 0;
  FixedPoint final_balance;  // b_t, set at settlement
  Amount payout = 0;
};

// The reward loop, as a pure function of the loss sequence.
//
//   b_t = 1 for all t; S = (1..T)
//   repeat bounty_units times:
//     for each t in S in ascending order:
//       b_t += L(h_{t'}, D) - L(h_t, D)   with t' = t's predecessor in S, or 0
//     S = (t in S : b_t >= 1)
//
// losses[t] is L(h_t, D) for t = 0..T; the returned vector holds b_1..b_T.
// S is re-filtered only after a full pass; within a pass the predecessor is
// taken from the S that entered the pass.
inline std::vector<FixedPoint> bounty_balances(const std::vector<FixedPoint>& losses,
                                               std::uint64_t bounty_units) {
  if (losses.empty()) fail(ErrorCode::InvalidArgument, "need L(h_0)");
  const std::size_t participant_count = losses.size() - 1;
  std::vector<FixedPoint> balance(participant_count, FixedPoint::one());
  std::vector<std::uint64_t> in_play(participant_count);
  for (std::size_t t = 0; t < participant_count; ++t) in_play[t] = t + 1;

  for (std::uint64_t round = 0; round < bounty_units; ++round) {
    std::uint64_t prev = 0;  // h_0 when no predecessor remains in S
    for (const auto t : in_play) {
      balance[t - 1] += losses[prev] - losses[t];
      prev = t;
    }
    std::vector<std::uint64_t> kept;
    kept.reserve(in_play.size());
    for (const auto t : in_play)
      if (balance[t - 1] >= FixedPoint::one()) kept.push_back(t);
    in_play = std::move(kept);
  }
  return balance;
}

// Splits a test dataset into the fixed number of equal partitions the
// commitment scheme wants. Rejects datasets whose size is not divisible.
inline std::vector<LabeledDataset> split_partitions(const LabeledDataset& d,
                                                    std::uint32_t parts) {
  if (parts == 0 || d.size() % parts != 0)
    fail(ErrorCode::InvalidArgument,
         "dataset size " + std::to_string(d.size()) + " not divisible into " +
             std::to_string(parts) + " equal parts");
  const std::size_t per = d.size() / parts;
  std::vector<LabeledDataset> out(parts);
  for (std::uint32_t p = 0; p < parts; ++p)
    out[p] = LabeledDataset(d.begin() + p * per, d.begin() + (p + 1) * per);
  return out;
}

// Prediction-market style bounty round with three phases. The provider
// escrows B whole units and commits to 100 test-set partitions; a random 10
// are revealed up front, participants stake 1 unit per data submission, and
// after the end condition the remaining 90 partitions become the scoring
// dataset. A failed reveal aborts the round and the bounty stays in escrow
// for good.
class BountyContract {
 public:
  static constexpr std::uint32_t kPartitions = 100;
  static constexpr std::uint32_t kInitialReveal = 10;

  BountyContract(Ledger& ledger, Address self, Address provider, std::uint64_t bounty_units,
                 const std::vector<Digest>& partition_digests, EndCondition end,
                 Model initial_model, std::uint64_t scenario_seed)
      : ledger_(ledger),
        self_(self),
        provider_(provider),
        bounty_units_(bounty_units),
        end_(end),
        model_(std::move(initial_model)),
        data_(self) {
    if (bounty_units_ == 0) fail(ErrorCode::InvalidArgument, "bounty must be positive");
    if (partition_digests.size() != kPartitions)
      fail(ErrorCode::BadCommitmentCount, std::to_string(partition_digests.size()));
    if (!end_.deadline && !end_.max_participants)
      fail(ErrorCode::InvalidArgument, "an end condition is required");

    ledger_.to_escrow(provider_, bounty_units_ * kUnit);
    escrowed_ = bounty_units_ * kUnit;
    for (const auto& d : partition_digests) commitment_ids_.push_back(ledger_.add_commitment(d));

    // The chain has no randomness of its own; the selection PRNG is seeded
    // from the scenario seed XORed with a hash over all committed digests.
    Sha256 h;
    for (const auto& d : partition_digests) h.update(d.data(), d.size());
    Xoshiro256 rng(scenario_seed ^ digest_seed64(h.finish()));
    initial_indices_ = rng.sample_distinct(kInitialReveal, kPartitions);
    std::sort(initial_indices_.begin(), initial_indices_.end());

    snapshots_.push_back(model_);  // h_0
    ledger_.charge_gas(provider_, ActionKind::Deploy);
    ledger_.log_derived("bounty_open", {{"provider", provider_.hex()},
                                        {"bounty_units", std::to_string(bounty_units_)},
                                        {"initial_indices", join(initial_indices_)}});
  }

  const std::vector<std::uint32_t>& initial_reveal_indices() const { return initial_indices_; }
  BountyPhase phase() const { return phase_; }
  std::uint64_t participant_count() const { return participants_.size(); }
  const std::vector<ParticipantRecord>& participants() const { return participants_; }
  const Model& model() const { return model_; }
  const DataHandler& data() const { return data_; }
  Amount escrowed() const { return escrowed_; }
  Amount paid_out() const { return paid_out_; }
  Amount stuck() const { return escrowed_ - paid_out_; }

  bool end_condition_met(Timestamp now) const {
    if (end_.deadline && now >= *end_.deadline) return true;
    if (end_.max_participants && participants_.size() >= *end_.max_participants) return true;
    return false;
  }

  // Payloads in the order of initial_reveal_indices(). All must verify or
  // the round aborts with the bounty unrecoverable.
  void reveal_initial(const Address& caller, const std::vector<std::string>& payloads) {
    require_provider(caller);
    if (phase_ != BountyPhase::Commitment) fail(ErrorCode::WrongPhase, phase_name(phase_));
    if (payloads.size() != kInitialReveal)
      fail(ErrorCode::BadCommitmentCount, std::to_string(payloads.size()));
    ledger_.charge_gas(caller, ActionKind::Other);
    for (std::uint32_t k = 0; k < kInitialReveal; ++k) {
      if (!ledger_.verify_commitment(commitment_ids_[initial_indices_[k]], payloads[k])) {
        abort_round("initial reveal mismatch");
        return;
      }
    }
    phase_ = BountyPhase::Participation;
    ledger_.log_derived("bounty_phase", {{"phase", "participation"}});
  }

  ParticipantRecord participate(const Address& who, FeatureVector x, Label y, Timestamp now) {
    refresh(now);  // a met end condition moves the round to Reward first
    if (phase_ != BountyPhase::Participation) fail(ErrorCode::WrongPhase, phase_name(phase_));
    x.check_bounds(model_feature_count(model_));
    if (y >= model_num_classes(model_)) fail(ErrorCode::InvalidArgument, "label out of range");

    ledger_.to_escrow(who, kUnit);
    escrowed_ += kUnit;

    ParticipantRecord rec;
    rec.index = participants_.size() + 1;
    rec.address = who;
    rec.version_before = model_version(model_);
    data_.store_contribution(self_, x, y, who, kUnit, now);
    const UpdateResult res = update(model_, x, y);
    rec.version_after = res.version;
    snapshots_.push_back(model_);
    participants_.push_back(rec);

    ledger_.charge_gas(who, res.changed ? ActionKind::AddDataWithUpdate
                                        : ActionKind::AddDataNoUpdate);
    ledger_.log_derived("bounty_participate", {{"t", std::to_string(rec.index)},
                                               {"who", who.hex()},
                                               {"changed", res.changed ? "1" : "0"}});
    return participants_.back();
  }

  // Payloads for the 90 unselected partitions in ascending partition-index
  // order. Any mismatch aborts and returns every participant's stake.
  void reveal_final(const Address& caller, const std::vector<std::string>& payloads,
                    Timestamp now) {
    require_provider(caller);
    refresh(now);
    if (phase_ != BountyPhase::Reward) fail(ErrorCode::WrongPhase, phase_name(phase_));
    if (test_data_.has_value()) fail(ErrorCode::AlreadyRevealed, "final reveal");
    if (payloads.size() != kPartitions - kInitialReveal)
      fail(ErrorCode::BadCommitmentCount, std::to_string(payloads.size()));
    ledger_.charge_gas(caller, ActionKind::Other);

    LabeledDataset d;
    std::size_t k = 0;
    for (std::uint32_t p = 0; p < kPartitions; ++p) {
      if (std::binary_search(initial_indices_.begin(), initial_indices_.end(), p)) continue;
      if (!ledger_.verify_commitment(commitment_ids_[p], payloads[k])) {
        refund_stakes();
        abort_round("final reveal mismatch");
        return;
      }
      for (auto& s : parse_samples(payloads[k])) d.push_back(std::move(s));
      ++k;
    }
    if (d.empty()) fail(ErrorCode::InvalidArgument, "empty test dataset");
    test_data_ = std::move(d);
    ledger_.log_derived("bounty_phase", {{"phase", "reward_revealed"}});
  }

  // Runs the reward loop over the revealed dataset and pays everyone out.
  void settle(const Address& caller) {
    require_provider(caller);
    if (phase_ == BountyPhase::Settled) fail(ErrorCode::AlreadySettled, "bounty round");
    if (phase_ != BountyPhase::Reward || !test_data_.has_value())
      fail(ErrorCode::WrongPhase, phase_name(phase_));
    ledger_.charge_gas(caller, ActionKind::Other);

    std::vector<FixedPoint> losses;
    losses.reserve(snapshots_.size());
    for (const auto& m : snapshots_) losses.push_back(evaluate_loss(m, *test_data_));
    losses_ = losses;

    const std::vector<FixedPoint> balances = bounty_balances(losses, bounty_units_);
    for (std::size_t t = 0; t < participants_.size(); ++t) {
      auto& rec = participants_[t];
      rec.final_balance = balances[t];
      // The mantissa is already whole denomination units; round down anyway.
      const std::int64_t m = balances[t].mantissa();
      rec.payout = m > 0 ? static_cast<Amount>(m) : 0;
      ledger_.from_escrow(rec.address, rec.payout);
      paid_out_ += rec.payout;
      ledger_.log_derived("bounty_payout", {{"t", std::to_string(rec.index)},
                                            {"who", rec.address.hex()},
                                            {"amount", std::to_string(rec.payout)}});
    }
    phase_ = BountyPhase::Settled;
    ledger_.log_derived("bounty_phase", {{"phase", "settled"},
                                         {"stuck", std::to_string(stuck())}});
  }

  const std::vector<FixedPoint>& losses() const { return losses_; }
  const LabeledDataset& test_data() const { return *test_data_; }

  std::string state_text() const {
    std::string out;
    out += "bounty.phase=" + std::string(phase_name(phase_)) + "\n";
    out += "bounty.units=" + std::to_string(bounty_units_) + "\n";
    out += "bounty.escrowed=" + std::to_string(escrowed_) + "\n";
    out += "bounty.paid=" + std::to_string(paid_out_) + "\n";
    out += "bounty.participants=" + std::to_string(participants_.size()) + "\n";
    out += "model:\n" + serialize(model_);
    out += data_.state_text();
    return out;
  }

 private:
  void require_provider(const Address& caller) const {
    if (caller != provider_) fail(ErrorCode::NotOwner, caller.hex());
  }

  void refresh(Timestamp now) {
    if (phase_ == BountyPhase::Participation && end_condition_met(now)) {
      phase_ = BountyPhase::Reward;
      ledger_.log_derived("bounty_phase", {{"phase", "reward"}});
    }
  }

  void abort_round(const std::string& reason) {
    phase_ = BountyPhase::Aborted;
    ledger_.log_derived("bounty_abort", {{"reason", reason},
                                         {"stuck", std::to_string(stuck())}});
  }

  void refund_stakes() {
    for (const auto& rec : participants_) {
      ledger_.from_escrow(rec.address, rec.stake);
      paid_out_ += rec.stake;
    }
  }

  static std::string join(const std::vector<std::uint32_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(v[i]);
    }
    return out;
  }

  Ledger& ledger_;
  Address self_;
  Address provider_;
  std::uint64_t bounty_units_;
  EndCondition end_;
  Model model_;
  DataHandler data_;
  std::vector<std::size_t> commitment_ids_;
  std::vector<std::uint32_t> initial_indices_;
  std::vector<Model> snapshots_;  // h_0 .. h_T
  std::vector<ParticipantRecord> participants_;
  std::optional<LabeledDataset> test_data_;
  std::vector<FixedPoint> losses_;
  BountyPhase phase_ = BountyPhase::Commitment;
  Amount escrowed_ = 0;
  Amount paid_out_ = 0;
};

}  // namespace chainml
