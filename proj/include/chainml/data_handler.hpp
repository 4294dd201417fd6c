#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "chainml/feature_vector.hpp"
#include "chainml/ledger.hpp"

namespace chainml {

// One stored data submission plus its incentive metadata. d_r tracks the
// part of the deposit still claimable and can only shrink.
struct Contribution {
  std::uint64_t id = 0;
  FeatureVector x;
  Label y = 0;
  Address contributor;
  Timestamp submitted_at = 0;
  Amount deposit = 0;            // d
  Amount remaining_claimable = 0;  // d_r, 0 <= d_r <= d
  bool refunded = false;
  std::set<Address> claimants;
};

struct ContributorStats {
  std::uint64_t refunded_count = 0;  // n(c)
};

// Stores contributions and their metadata on behalf of a single coordinator
// contract; only that owner may write.
class DataHandler {
 public:
  explicit DataHandler(Address owner) : owner_(owner) {}

  const Address& owner() const { return owner_; }

  std::uint64_t store_contribution(const Address& caller, FeatureVector x, Label y,
                                   const Address& contributor, Amount deposit, Timestamp now) {
    require_owner(caller);
    Contribution c;
    c.id = contributions_.size();
    c.x = std::move(x);
    c.y = y;
    c.contributor = contributor;
    c.submitted_at = now;
    c.deposit = deposit;
    c.remaining_claimable = deposit;
    contributions_.push_back(std::move(c));
    return contributions_.back().id;
  }

  // Returns the amount refunded (the current d_r), zeroes d_r and bumps the
  // contributor's refund tally n(c).
  Amount mark_refunded(const Address& caller, std::uint64_t id) {
    require_owner(caller);
    Contribution& c = at(id);
    if (c.refunded) fail(ErrorCode::AlreadyRefunded, "contribution " + std::to_string(id));
    if (c.remaining_claimable == 0)
      fail(ErrorCode::NothingClaimable, "contribution " + std::to_string(id));
    const Amount paid = c.remaining_claimable;
    c.remaining_claimable = 0;
    c.refunded = true;
    ++stats_[c.contributor].refunded_count;
    ++total_refunded_count_;
    return paid;
  }

  void deduct_claimable(const Address& caller, std::uint64_t id, Amount amount,
                        const Address& claimant) {
    require_owner(caller);
    Contribution& c = at(id);
    if (claimant == c.contributor) fail(ErrorCode::SelfReport, claimant.hex());
    if (amount > c.remaining_claimable)
      fail(ErrorCode::OverClaim, std::to_string(amount) + " > d_r");
    if (c.claimants.count(claimant))
      fail(ErrorCode::RepeatClaimant, claimant.hex());
    c.remaining_claimable -= amount;
    c.claimants.insert(claimant);
  }

  // Lock-up sweep: zeroes d_r without touching the refund bookkeeping.
  Amount sweep(const Address& caller, std::uint64_t id) {
    require_owner(caller);
    Contribution& c = at(id);
    if (c.remaining_claimable == 0)
      fail(ErrorCode::NothingClaimable, "contribution " + std::to_string(id));
    const Amount paid = c.remaining_claimable;
    c.remaining_claimable = 0;
    return paid;
  }

  const Contribution& contribution(std::uint64_t id) const { return at(id); }
  std::uint64_t size() const { return contributions_.size(); }
  const std::vector<Contribution>& contributions() const { return contributions_; }

  std::uint64_t refunded_count(const Address& c) const {
    const auto it = stats_.find(c);
    return it == stats_.end() ? 0 : it->second.refunded_count;
  }

  // Global tally over all contributors ever refunded.
  std::uint64_t total_refunded_count() const { return total_refunded_count_; }

  Amount outstanding_claimable() const {
    Amount total = 0;
    for (const auto& c : contributions_) total += c.remaining_claimable;
    return total;
  }

  // The dataset is public; this dumps it.
  void export_csv(std::ostream& os) const {
    os << "id,contributor,label,submitted_at,deposit,remaining_claimable,refunded\n";
    for (const auto& c : contributions_) {
      os << c.id << ',' << c.contributor.hex() << ',' << c.y << ',' << c.submitted_at << ','
         << c.deposit << ',' << c.remaining_claimable << ',' << (c.refunded ? 1 : 0) << '\n';
    }
  }

  std::string state_text() const {
    std::string out;
    for (const auto& c : contributions_) {
      out += "contribution." + std::to_string(c.id) + "=" + c.contributor.hex() + ",";
      for (std::size_t i = 0; i < c.x.indices().size(); ++i) {
        if (i) out += "+";
        out += std::to_string(c.x.indices()[i]);
      }
      out += "," + std::to_string(c.y) + "," + std::to_string(c.submitted_at) + "," +
             std::to_string(c.deposit) + "," + std::to_string(c.remaining_claimable) + "," +
             (c.refunded ? "1" : "0") + ",";
      bool first = true;
      for (const auto& a : c.claimants) {
        if (!first) out += "+";
        first = false;
        out += a.hex();
      }
      out += "\n";
    }
    for (const auto& [a, s] : stats_)
      out += "refunds." + a.hex() + "=" + std::to_string(s.refunded_count) + "\n";
    return out;
  }

 private:
  void require_owner(const Address& caller) const {
    if (caller != owner_) fail(ErrorCode::NotOwner, caller.hex());
  }

  Contribution& at(std::uint64_t id) {
    if (id >= contributions_.size())
      fail(ErrorCode::InvalidArgument, "no contribution " + std::to_string(id));
    return contributions_[id];
  }

  const Contribution& at(std::uint64_t id) const {
    if (id >= contributions_.size())
      fail(ErrorCode::InvalidArgument, "no contribution " + std::to_string(id));
    return contributions_[id];
  }

  Address owner_;
  std::vector<Contribution> contributions_;
  std::map<Address, ContributorStats> stats_;
  std::uint64_t total_refunded_count_ = 0;
};

}  // namespace chainml
