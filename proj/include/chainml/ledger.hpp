#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainml/errors.hpp"
#include "chainml/fixed_point.hpp"
#include "chainml/sha256.hpp"

namespace chainml {

// Currency in the smallest denomination. One whole unit of currency is
// 10^9 denomination units, matching the fixed-point scale, so unit-valued
// fixed-point balances convert to denomination units without loss.
using Amount = std::uint64_t;
constexpr Amount kUnit = 1'000'000'000;

// Seconds since scenario genesis.
using Timestamp = std::uint64_t;
constexpr Timestamp kWeek = 7 * 24 * 3600;

using Gas = std::uint64_t;

struct Address {
  std::array<std::uint8_t, 20> bytes{};

  static Address from_index(std::uint64_t k) {
    Address a;
    for (int i = 0; i < 8; ++i)
      a.bytes[12 + i] = static_cast<std::uint8_t>(k >> (56 - 8 * i));
    return a;
  }

  std::string hex() const {
    static const char* k = "0123456789abcdef";
    std::string out;
    out.reserve(40);
    for (auto b : bytes) {
      out.push_back(k[b >> 4]);
      out.push_back(k[b & 0xf]);
    }
    return out;
  }

  static Address parse_hex(std::string_view s) {
    if (s.size() != 40) fail(ErrorCode::ParseError, "address must be 40 hex chars");
    auto nib = [](char c) -> std::uint8_t {
      if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
      if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
      fail(ErrorCode::ParseError, "bad hex digit in address");
    };
    Address a;
    for (int i = 0; i < 20; ++i)
      a.bytes[i] = static_cast<std::uint8_t>((nib(s[2 * i]) << 4) | nib(s[2 * i + 1]));
    return a;
  }

  friend auto operator<=>(const Address& a, const Address& b) = default;
};

// Per-action gas constants. Gas is metered and reported, not debited from
// balances; the constants calibrate simulated cost, they are not prices.
struct GasSchedule {
  Gas deploy = 3'845'840;
  Gas add_data_no_update = 177'693;
  Gas add_data_with_update = 249'037;
  Gas other_tx = 60'000;
};

enum class ActionKind { Deploy, AddDataNoUpdate, AddDataWithUpdate, Other };

inline const char* action_name(ActionKind k) {
  switch (k) {
    case ActionKind::Deploy: return "deploy";
    case ActionKind::AddDataNoUpdate: return "add_data_no_update";
    case ActionKind::AddDataWithUpdate: return "add_data_with_update";
    case ActionKind::Other: return "other_tx";
  }
  fail(ErrorCode::InvalidArgument, "unknown action kind");
}

struct Commitment {
  Digest digest{};
  std::optional<std::string> revealed;
};

struct ModelCheckpoint {
  std::uint64_t version = 0;
  std::string state;
  Timestamp block_time = 0;
};

// One log record. kind plus ordered key=value fields; values must not
// contain spaces, '|' or newlines (the writers only emit numbers, hex and
// comma-joined index lists).
struct Event {
  std::uint64_t seq = 0;
  Timestamp time = 0;
  bool input = false;  // true for exogenous transactions, false for derived records
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;

  std::string to_line() const {
    std::string out = input ? "tx " : "ev ";
    out += std::to_string(seq);
    out += ' ';
    out += std::to_string(time);
    out += ' ';
    out += kind;
    for (const auto& [k, v] : fields) {
      out += ' ';
      out += k;
      out += '=';
      out += v;
    }
    return out;
  }
};

// The simulated chain substrate: accounts, escrow, a deterministic clock,
// gas tallies, commitment records, model checkpoints and the append-only
// event log. Single-threaded by construction; every mutation happens through
// one of these methods in program order.
class Ledger {
 public:
  explicit Ledger(GasSchedule schedule = {}) : gas_schedule_(schedule) {}

  // --- accounts ------------------------------------------------------------

  // Genesis-only supply creation.
  void mint(const Address& to, Amount amount) {
    balances_[to] += amount;
    supply_ += amount;
    log_derived("mint", {{"to", to.hex()}, {"amount", std::to_string(amount)}});
  }

  Amount balance(const Address& a) const {
    const auto it = balances_.find(a);
    return it == balances_.end() ? 0 : it->second;
  }

  Amount escrow() const { return escrow_; }
  Amount total_supply() const { return supply_; }

  void transfer(const Address& from, const Address& to, Amount amount) {
    require_balance(from, amount);
    balances_[from] -= amount;
    balances_[to] += amount;
    log_derived("transfer", {{"from", from.hex()},
                             {"to", to.hex()},
                             {"amount", std::to_string(amount)}});
  }

  void to_escrow(const Address& from, Amount amount) {
    require_balance(from, amount);
    balances_[from] -= amount;
    escrow_ += amount;
    log_derived("escrow_in", {{"from", from.hex()}, {"amount", std::to_string(amount)}});
  }

  void from_escrow(const Address& to, Amount amount) {
    if (escrow_ < amount) fail(ErrorCode::InsufficientBalance, "escrow underflow");
    escrow_ -= amount;
    balances_[to] += amount;
    log_derived("escrow_out", {{"to", to.hex()}, {"amount", std::to_string(amount)}});
  }

  bool conserved() const {
    Amount total = escrow_;
    for (const auto& [_, b] : balances_) total += b;
    return total == supply_;
  }

  // --- clock ---------------------------------------------------------------

  Timestamp now() const { return now_; }

  Timestamp advance_time(Timestamp delta) {
    now_ += delta;
    return now_;
  }

  // Replay jumps the clock straight to each recorded transaction time.
  void set_time(Timestamp t) {
    if (t < now_) fail(ErrorCode::InvalidArgument, "clock may not go backwards");
    now_ = t;
  }

  // --- gas -----------------------------------------------------------------

  Gas charge_gas(const Address& caller, ActionKind kind) {
    const Gas cost = gas_cost(kind);
    gas_used_[caller] += cost;
    gas_total_ += cost;
    log_derived("gas", {{"caller", caller.hex()},
                        {"action", action_name(kind)},
                        {"amount", std::to_string(cost)}});
    return cost;
  }

  Gas gas_cost(ActionKind kind) const {
    switch (kind) {
      case ActionKind::Deploy: return gas_schedule_.deploy;
      case ActionKind::AddDataNoUpdate: return gas_schedule_.add_data_no_update;
      case ActionKind::AddDataWithUpdate: return gas_schedule_.add_data_with_update;
      case ActionKind::Other: return gas_schedule_.other_tx;
    }
    fail(ErrorCode::InvalidArgument, "unknown action kind");
  }

  Gas gas_used(const Address& a) const {
    const auto it = gas_used_.find(a);
    return it == gas_used_.end() ? 0 : it->second;
  }

  Gas gas_total() const { return gas_total_; }

  // --- commitments ---------------------------------------------------------

  std::size_t add_commitment(const Digest& digest) {
    commitments_.push_back(Commitment{digest, std::nullopt});
    return commitments_.size() - 1;
  }

  const Commitment& commitment(std::size_t id) const { return commitments_.at(id); }

  // True (and records the payload) iff sha256(payload) matches the digest.
  // A failed reveal leaves the commitment open; a second reveal of an
  // already-revealed commitment is an error.
  bool verify_commitment(std::size_t id, const std::string& payload) {
    auto& c = commitments_.at(id);
    if (c.revealed.has_value()) fail(ErrorCode::AlreadyRevealed, "commitment " + std::to_string(id));
    if (sha256(payload) != c.digest) return false;
    c.revealed = payload;
    return true;
  }

  // --- model checkpoints ---------------------------------------------------

  void record_checkpoint(std::uint64_t version, std::string state) {
    if (!checkpoints_.empty() && checkpoints_.back().version >= version)
      fail(ErrorCode::InvalidArgument, "checkpoint versions must increase");
    checkpoints_.push_back(ModelCheckpoint{version, std::move(state), now_});
    log_derived("checkpoint", {{"version", std::to_string(version)}});
  }

  const ModelCheckpoint& checkpoint(std::uint64_t version) const {
    for (const auto& c : checkpoints_)
      if (c.version == version) return c;
    fail(ErrorCode::UnknownVersion, std::to_string(version));
  }

  bool has_checkpoint(std::uint64_t version) const {
    for (const auto& c : checkpoints_)
      if (c.version == version) return true;
    return false;
  }

  const std::vector<ModelCheckpoint>& checkpoints() const { return checkpoints_; }

  // --- event log -----------------------------------------------------------

  using Fields = std::vector<std::pair<std::string, std::string>>;

  std::uint64_t log_tx(const std::string& kind, Fields fields) {
    return log(true, kind, std::move(fields));
  }

  std::uint64_t log_derived(const std::string& kind, Fields fields) {
    return log(false, kind, std::move(fields));
  }

  const std::vector<Event>& events() const { return events_; }

  // Canonical text of everything the ledger owns; feeds the state digest.
  std::string state_text() const {
    std::string out;
    out += "now=" + std::to_string(now_) + "\n";
    out += "supply=" + std::to_string(supply_) + "\n";
    out += "escrow=" + std::to_string(escrow_) + "\n";
    for (const auto& [a, b] : balances_)
      out += "balance." + a.hex() + "=" + std::to_string(b) + "\n";
    out += "gas.total=" + std::to_string(gas_total_) + "\n";
    for (const auto& [a, g] : gas_used_)
      out += "gas." + a.hex() + "=" + std::to_string(g) + "\n";
    for (std::size_t i = 0; i < commitments_.size(); ++i) {
      out += "commitment." + std::to_string(i) + "=" + chainml::hex(commitments_[i].digest);
      out += commitments_[i].revealed.has_value() ? ",revealed\n" : ",open\n";
    }
    for (const auto& c : checkpoints_)
      out += "checkpoint." + std::to_string(c.version) + "=" + chainml::hex(sha256(c.state)) +
             "," + std::to_string(c.block_time) + "\n";
    return out;
  }

 private:
  void require_balance(const Address& a, Amount amount) const {
    if (balance(a) < amount)
      fail(ErrorCode::InsufficientBalance,
           a.hex() + " has " + std::to_string(balance(a)) + ", needs " + std::to_string(amount));
  }

  std::uint64_t log(bool input, const std::string& kind, Fields fields) {
    Event e;
    e.seq = next_seq_++;
    e.time = now_;
    e.input = input;
    e.kind = kind;
    e.fields = std::move(fields);
    events_.push_back(std::move(e));
    return events_.back().seq;
  }

  GasSchedule gas_schedule_;
  std::map<Address, Amount> balances_;
  Amount escrow_ = 0;
  Amount supply_ = 0;
  Timestamp now_ = 0;
  std::map<Address, Gas> gas_used_;
  Gas gas_total_ = 0;
  std::vector<Commitment> commitments_;
  std::vector<ModelCheckpoint> checkpoints_;
  std::vector<Event> events_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace chainml
