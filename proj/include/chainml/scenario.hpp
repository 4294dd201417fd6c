#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainml/dataset.hpp"
#include "chainml/drt.hpp"
#include "chainml/errors.hpp"
#include "chainml/fixed_point.hpp"
#include "chainml/ledger.hpp"

namespace chainml {

// --- flat key/value text ----------------------------------------------------

using KeyValues = std::map<std::string, std::string>;

// "key=value" lines; '#' starts a comment, blank lines ignored.
inline KeyValues parse_kv_text(std::string_view text) {
  KeyValues out;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
    out[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  return out;
}

inline std::string format_kv(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

namespace detail {

inline std::uint64_t kv_u64(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) fail(ErrorCode::ParseError, "missing key: " + key);
  return parse_u64(it->second);
}

inline std::uint64_t kv_u64_or(const KeyValues& kv, const std::string& key, std::uint64_t dflt) {
  const auto it = kv.find(key);
  return it == kv.end() ? dflt : parse_u64(it->second);
}

inline FixedPoint kv_fp_or(const KeyValues& kv, const std::string& key, FixedPoint dflt) {
  const auto it = kv.find(key);
  return it == kv.end() ? dflt : FixedPoint::parse(it->second);
}

inline bool kv_bool_or(const KeyValues& kv, const std::string& key, bool dflt) {
  const auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  if (it->second == "1" || it->second == "true") return true;
  if (it->second == "0" || it->second == "false") return false;
  fail(ErrorCode::ParseError, key + ": expected 0/1");
}

inline std::string kv_str_or(const KeyValues& kv, const std::string& key,
                             const std::string& dflt) {
  const auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

}  // namespace detail

// --- scenario model ----------------------------------------------------------

enum class MechanismKind { Points, Drt, Bounty };
enum class ModelKind { Perceptron, Centroid };

struct AgentPolicy {
  enum class Kind { Honest, Malicious, Inactive };

  Kind kind = Kind::Honest;
  FixedPoint label_flip_rate;  // probability in [0,1]
  Timestamp submission_interval = 86'400;
  // Gross deposit/stake spend cap; enforced for malicious agents only.
  Amount deposit_budget = ~0ull;
  bool reports_bad_data = true;
  bool claims_refunds = true;

  void validate() const {
    if (label_flip_rate < FixedPoint::zero() || label_flip_rate > FixedPoint::one())
      fail(ErrorCode::InvalidArgument, "label_flip_rate must be in [0,1]");
    if (submission_interval == 0)
      fail(ErrorCode::InvalidArgument, "submission_interval must be positive");
  }
};

inline const char* agent_kind_name(AgentPolicy::Kind k) {
  switch (k) {
    case AgentPolicy::Kind::Honest: return "honest";
    case AgentPolicy::Kind::Malicious: return "malicious";
    case AgentPolicy::Kind::Inactive: return "inactive";
  }
  fail(ErrorCode::InvalidArgument, "unknown agent kind");
}

struct AgentSpec {
  Address address;
  AgentPolicy policy;
  Amount starting_balance = 0;
};

struct DatasetConfig {
  SyntheticSpec synth;
  std::string csv_path;  // when set, samples come from this file instead

  void validate() const {
    if (csv_path.empty()) {
      synth.validate();
    } else {
      if (synth.num_features < 2) fail(ErrorCode::InvalidArgument, "need at least 2 features");
      if (synth.train_size == 0 && synth.test_size == 0)
        fail(ErrorCode::InvalidArgument, "zero samples");
    }
  }
};

struct BountyScenarioConfig {
  std::uint64_t amount_units = 10;  // B
  std::optional<Timestamp> deadline;
  std::optional<std::uint64_t> max_participants;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  DatasetConfig dataset;
  FixedPoint initial_train_fraction = FixedPoint::from_ratio(8, 100);
  MechanismKind mechanism = MechanismKind::Drt;
  DrtConfig drt;
  BountyScenarioConfig bounty;
  ModelKind model = ModelKind::Perceptron;
  FixedPoint learning_rate = FixedPoint::one();
  std::uint32_t num_classes = 2;
  Amount creator_balance = 0;
  std::vector<AgentSpec> agents;
  Timestamp duration = 60 * 86'400;
  Timestamp metrics_interval = 86'400;
  Timestamp step = 3'600;

  // Deterministic default address layout: the creator is account 1, the
  // contract account 2, agents count up from 100.
  static Address creator_address() { return Address::from_index(1); }
  static Address contract_address() { return Address::from_index(2); }
  static Address default_agent_address(std::size_t i) {
    return Address::from_index(100 + i);
  }

  void validate() const {
    if (initial_train_fraction <= FixedPoint::zero() ||
        initial_train_fraction >= FixedPoint::one())
      fail(ErrorCode::InvalidArgument, "initial_train_fraction must be in (0,1)");
    if (agents.empty()) fail(ErrorCode::InvalidArgument, "at least one agent is required");
    if (step == 0) fail(ErrorCode::InvalidArgument, "step must be positive");
    if (metrics_interval == 0 || metrics_interval % step != 0)
      fail(ErrorCode::InvalidArgument, "metrics_interval must be a multiple of step");
    if (duration == 0 || duration % metrics_interval != 0)
      fail(ErrorCode::InvalidArgument, "duration must be a multiple of metrics_interval");
    dataset.validate();
    for (const auto& a : agents) a.policy.validate();
    if (mechanism == MechanismKind::Drt) drt.validate();
    if (mechanism == MechanismKind::Bounty) {
      if (bounty.amount_units == 0) fail(ErrorCode::InvalidArgument, "bounty must be positive");
      if (!bounty.deadline && !bounty.max_participants)
        fail(ErrorCode::InvalidArgument, "bounty needs an end condition");
      if (dataset.synth.test_size % 100 != 0)
        fail(ErrorCode::InvalidArgument, "bounty test set must divide into 100 equal parts");
    }
    if (model == ModelKind::Perceptron && num_classes != 2)
      fail(ErrorCode::InvalidArgument, "perceptron is binary only");
    if (model == ModelKind::Centroid && num_classes < 2)
      fail(ErrorCode::InvalidArgument, "need at least two classes");
  }

  static ScenarioConfig from_kv(const KeyValues& kv) {
    using namespace detail;
    ScenarioConfig c;
    c.seed = kv_u64_or(kv, "seed", 0);
    c.duration = kv_u64_or(kv, "duration", c.duration);
    c.metrics_interval = kv_u64_or(kv, "metrics_interval", c.metrics_interval);
    c.step = kv_u64_or(kv, "step", c.step);

    const std::string mech = kv_str_or(kv, "mechanism", "drt");
    if (mech == "points")
      c.mechanism = MechanismKind::Points;
    else if (mech == "drt")
      c.mechanism = MechanismKind::Drt;
    else if (mech == "bounty")
      c.mechanism = MechanismKind::Bounty;
    else
      fail(ErrorCode::ParseError, "mechanism: expected points|drt|bounty");

    const std::string model = kv_str_or(kv, "model", "perceptron");
    if (model == "perceptron")
      c.model = ModelKind::Perceptron;
    else if (model == "centroid")
      c.model = ModelKind::Centroid;
    else
      fail(ErrorCode::ParseError, "model: expected perceptron|centroid");
    c.learning_rate = kv_fp_or(kv, "model.learning_rate", c.learning_rate);
    c.num_classes = static_cast<std::uint32_t>(kv_u64_or(kv, "model.classes", c.num_classes));

    c.dataset.synth.num_features =
        static_cast<std::uint32_t>(kv_u64_or(kv, "dataset.features", 1000));
    c.dataset.synth.train_size =
        static_cast<std::uint32_t>(kv_u64_or(kv, "dataset.train_size", 2000));
    c.dataset.synth.test_size =
        static_cast<std::uint32_t>(kv_u64_or(kv, "dataset.test_size", 500));
    c.dataset.synth.noise = kv_fp_or(kv, "dataset.noise", FixedPoint::zero());
    c.dataset.synth.active_per_class =
        static_cast<std::uint32_t>(kv_u64_or(kv, "dataset.active_per_class", 10));
    c.dataset.csv_path = kv_str_or(kv, "dataset.csv", "");
    c.initial_train_fraction =
        kv_fp_or(kv, "initial_train_fraction", c.initial_train_fraction);
    c.creator_balance = kv_u64_or(kv, "creator.balance", 0);

    c.drt.refund_wait = kv_u64_or(kv, "drt.refund_wait", c.drt.refund_wait);
    c.drt.creator_take_wait = kv_u64_or(kv, "drt.creator_take_wait", c.drt.creator_take_wait);
    c.drt.anyone_take_wait = kv_u64_or(kv, "drt.anyone_take_wait", c.drt.anyone_take_wait);
    c.drt.deposit_constant = kv_u64_or(kv, "drt.deposit_constant", c.drt.deposit_constant);
    c.drt.minimum_deposit = kv_u64_or(kv, "drt.min_deposit", c.drt.minimum_deposit);
    c.drt.minimum_take_reward =
        kv_u64_or(kv, "drt.min_take_reward", c.drt.minimum_take_reward);

    c.bounty.amount_units = kv_u64_or(kv, "bounty.amount", c.bounty.amount_units);
    if (kv.count("bounty.deadline")) c.bounty.deadline = kv_u64(kv, "bounty.deadline");
    if (kv.count("bounty.max_participants"))
      c.bounty.max_participants = kv_u64(kv, "bounty.max_participants");

    const std::uint64_t n = kv_u64_or(kv, "agents", 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::string p = "agent." + std::to_string(i) + ".";
      AgentSpec a;
      const std::string addr = kv_str_or(kv, p + "address", "");
      a.address = addr.empty() ? default_agent_address(i) : Address::parse_hex(addr);
      const std::string kind = kv_str_or(kv, p + "kind", "honest");
      if (kind == "honest")
        a.policy.kind = AgentPolicy::Kind::Honest;
      else if (kind == "malicious")
        a.policy.kind = AgentPolicy::Kind::Malicious;
      else if (kind == "inactive")
        a.policy.kind = AgentPolicy::Kind::Inactive;
      else
        fail(ErrorCode::ParseError, p + "kind: expected honest|malicious|inactive");
      a.policy.label_flip_rate = kv_fp_or(kv, p + "label_flip_rate", FixedPoint::zero());
      a.policy.submission_interval = kv_u64_or(kv, p + "interval", 86'400);
      a.policy.deposit_budget = kv_u64_or(kv, p + "deposit_budget", ~0ull);
      a.policy.reports_bad_data = kv_bool_or(kv, p + "reports", true);
      a.policy.claims_refunds = kv_bool_or(kv, p + "claims_refunds", true);
      a.starting_balance = kv_u64_or(kv, p + "balance", 0);
      c.agents.push_back(std::move(a));
    }
    // Unknown keys are almost always typos that would silently change the
    // economics; reject them.
    const KeyValues known = c.to_kv();
    for (const auto& [k, _] : kv)
      if (!known.count(k)) fail(ErrorCode::ParseError, "unknown scenario key: " + k);
    c.validate();
    return c;
  }

  // Canonical dump with every effective value materialized; from_kv(to_kv())
  // round-trips exactly. This is what the event-log header records.
  KeyValues to_kv() const {
    KeyValues kv;
    kv["seed"] = std::to_string(seed);
    kv["duration"] = std::to_string(duration);
    kv["metrics_interval"] = std::to_string(metrics_interval);
    kv["step"] = std::to_string(step);
    kv["mechanism"] = mechanism == MechanismKind::Points ? "points"
                      : mechanism == MechanismKind::Drt  ? "drt"
                                                         : "bounty";
    kv["model"] = model == ModelKind::Perceptron ? "perceptron" : "centroid";
    kv["model.learning_rate"] = learning_rate.to_string();
    kv["model.classes"] = std::to_string(num_classes);
    kv["dataset.features"] = std::to_string(dataset.synth.num_features);
    kv["dataset.train_size"] = std::to_string(dataset.synth.train_size);
    kv["dataset.test_size"] = std::to_string(dataset.synth.test_size);
    kv["dataset.noise"] = dataset.synth.noise.to_string();
    kv["dataset.active_per_class"] = std::to_string(dataset.synth.active_per_class);
    if (!dataset.csv_path.empty()) kv["dataset.csv"] = dataset.csv_path;
    kv["initial_train_fraction"] = initial_train_fraction.to_string();
    kv["creator.balance"] = std::to_string(creator_balance);
    kv["drt.refund_wait"] = std::to_string(drt.refund_wait);
    kv["drt.creator_take_wait"] = std::to_string(drt.creator_take_wait);
    kv["drt.anyone_take_wait"] = std::to_string(drt.anyone_take_wait);
    kv["drt.deposit_constant"] = std::to_string(drt.deposit_constant);
    kv["drt.min_deposit"] = std::to_string(drt.minimum_deposit);
    kv["drt.min_take_reward"] = std::to_string(drt.minimum_take_reward);
    kv["bounty.amount"] = std::to_string(bounty.amount_units);
    if (bounty.deadline) kv["bounty.deadline"] = std::to_string(*bounty.deadline);
    if (bounty.max_participants)
      kv["bounty.max_participants"] = std::to_string(*bounty.max_participants);
    kv["agents"] = std::to_string(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const std::string p = "agent." + std::to_string(i) + ".";
      const auto& a = agents[i];
      kv[p + "address"] = a.address.hex();
      kv[p + "kind"] = agent_kind_name(a.policy.kind);
      kv[p + "label_flip_rate"] = a.policy.label_flip_rate.to_string();
      kv[p + "interval"] = std::to_string(a.policy.submission_interval);
      kv[p + "deposit_budget"] = std::to_string(a.policy.deposit_budget);
      kv[p + "reports"] = a.policy.reports_bad_data ? "1" : "0";
      kv[p + "claims_refunds"] = a.policy.claims_refunds ? "1" : "0";
      kv[p + "balance"] = std::to_string(a.starting_balance);
    }
    return kv;
  }
};

}  // namespace chainml
