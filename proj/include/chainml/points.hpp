#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chainml/data_handler.hpp"
#include "chainml/feature_vector.hpp"
#include "chainml/ledger.hpp"
#include "chainml/model.hpp"

namespace chainml {

enum class Badge {
  Milestone1,
  Milestone10,
  Milestone100,
  LabelSpread,  // submitted at least 2 distinct labels
  Streak,       // contributions in >= 4 consecutive 7-day windows
};

inline const char* badge_name(Badge b) {
  switch (b) {
    case Badge::Milestone1: return "milestone-1";
    case Badge::Milestone10: return "milestone-10";
    case Badge::Milestone100: return "milestone-100";
    case Badge::LabelSpread: return "label-spread";
    case Badge::Streak: return "streak";
  }
  fail(ErrorCode::InvalidArgument, "unknown badge");
}

struct PointsAward {
  std::uint64_t points_awarded = 0;
  std::vector<Badge> new_badges;
};

// Gamified, non-financial incentive bookkeeping: one point per accepted
// contribution, badges once per (address, rule).
class PointsLedger {
 public:
  // Called after the coordinator accepts a contribution.
  PointsAward on_contribution(const Address& contributor, const FeatureVector&, Label y,
                              Timestamp now) {
    auto& acc = accounts_[contributor];
    acc.points += 1;
    acc.contribution_count += 1;
    acc.labels_seen.insert(y);
    acc.weekly_windows.insert(now / kWeek);

    PointsAward award;
    award.points_awarded = 1;
    auto grant = [&](Badge b, bool earned) {
      if (earned && !acc.badges.count(b)) {
        acc.badges.insert(b);
        award.new_badges.push_back(b);
      }
    };
    grant(Badge::Milestone1, acc.contribution_count >= 1);
    grant(Badge::Milestone10, acc.contribution_count >= 10);
    grant(Badge::Milestone100, acc.contribution_count >= 100);
    grant(Badge::LabelSpread, acc.labels_seen.size() >= 2);
    grant(Badge::Streak, longest_window_run(acc.weekly_windows) >= 4);
    return award;
  }

  // Successful deposit refunds are recorded in the same tally.
  void add_refund_point(const Address& contributor) { accounts_[contributor].points += 1; }

  std::uint64_t points(const Address& a) const {
    const auto it = accounts_.find(a);
    return it == accounts_.end() ? 0 : it->second.points;
  }

  std::uint64_t contribution_count(const Address& a) const {
    const auto it = accounts_.find(a);
    return it == accounts_.end() ? 0 : it->second.contribution_count;
  }

  std::set<Badge> badges(const Address& a) const {
    const auto it = accounts_.find(a);
    return it == accounts_.end() ? std::set<Badge>{} : it->second.badges;
  }

  static std::uint64_t longest_window_run(const std::set<std::uint64_t>& windows) {
    std::uint64_t best = 0, run = 0, prev = 0;
    bool first = true;
    for (const auto w : windows) {
      run = (!first && w == prev + 1) ? run + 1 : 1;
      best = std::max(best, run);
      prev = w;
      first = false;
    }
    return best;
  }

  std::string state_text() const {
    std::string out;
    for (const auto& [a, acc] : accounts_) {
      out += "points." + a.hex() + "=" + std::to_string(acc.points) + "\n";
      out += "badges." + a.hex() + "=";
      bool firstb = true;
      for (const auto b : acc.badges) {
        if (!firstb) out += "+";
        firstb = false;
        out += badge_name(b);
      }
      out += "\n";
    }
    return out;
  }

 private:
  struct Account {
    std::uint64_t points = 0;
    std::uint64_t contribution_count = 0;
    std::set<Label> labels_seen;
    std::set<std::uint64_t> weekly_windows;
    std::set<Badge> badges;
  };

  std::map<Address, Account> accounts_;
};

// Coordinator for the no-deposit, points-and-badges mechanism. Contributions
// are always accepted: stored, trained on, and credited.
class GamifiedContract {
 public:
  GamifiedContract(Ledger& ledger, Address self, Address creator, Model initial_model)
      : ledger_(ledger), self_(self), model_(std::move(initial_model)), data_(self) {
    ledger_.charge_gas(creator, ActionKind::Deploy);
    ledger_.record_checkpoint(model_version(model_), serialize(model_));
  }

  PointsAward add_data(const Address& contributor, FeatureVector x, Label y, Timestamp now) {
    x.check_bounds(model_feature_count(model_));
    if (y >= model_num_classes(model_)) fail(ErrorCode::InvalidArgument, "label out of range");
    const std::uint64_t id = data_.store_contribution(self_, x, y, contributor, 0, now);
    const UpdateResult res = update(model_, data_.contribution(id).x, y);
    if (res.changed) ledger_.record_checkpoint(res.version, serialize(model_));
    ledger_.charge_gas(contributor, res.changed ? ActionKind::AddDataWithUpdate
                                                : ActionKind::AddDataNoUpdate);
    const PointsAward award = points_.on_contribution(contributor, data_.contribution(id).x, y, now);
    for (const auto b : award.new_badges)
      ledger_.log_derived("badge", {{"who", contributor.hex()}, {"badge", badge_name(b)}});
    return award;
  }

  const Model& model() const { return model_; }
  const DataHandler& data() const { return data_; }
  const PointsLedger& points() const { return points_; }

  std::string state_text() const {
    return "model:\n" + serialize(model_) + data_.state_text() + points_.state_text();
  }

 private:
  Ledger& ledger_;
  Address self_;
  Model model_;
  DataHandler data_;
  PointsLedger points_;
};

}  // namespace chainml
