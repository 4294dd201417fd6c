#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainml/bounty.hpp"
#include "chainml/dataset.hpp"
#include "chainml/drt.hpp"
#include "chainml/ledger.hpp"
#include "chainml/model.hpp"
#include "chainml/points.hpp"
#include "chainml/rng.hpp"
#include "chainml/scenario.hpp"

namespace chainml {

struct MetricsRow {
  Timestamp time = 0;
  FixedPoint accuracy;
  std::vector<Amount> balances;        // per agent, scenario order
  std::vector<std::uint64_t> points;   // per agent
  std::vector<std::uint64_t> badges;   // per agent
  Amount escrow = 0;
  Gas gas = 0;
  std::uint64_t model_version = 0;

  Ledger::Fields fields() const {
    Ledger::Fields f;
    f.emplace_back("accuracy", accuracy.to_string());
    for (std::size_t i = 0; i < balances.size(); ++i) {
      f.emplace_back("balance." + std::to_string(i), std::to_string(balances[i]));
      f.emplace_back("points." + std::to_string(i), std::to_string(points[i]));
      f.emplace_back("badges." + std::to_string(i), std::to_string(badges[i]));
    }
    f.emplace_back("escrow", std::to_string(escrow));
    f.emplace_back("gas", std::to_string(gas));
    f.emplace_back("model_version", std::to_string(model_version));
    return f;
  }

  std::string csv_row() const {
    std::string out = std::to_string(time) + "," + accuracy.to_string();
    for (std::size_t i = 0; i < balances.size(); ++i)
      out += "," + std::to_string(balances[i]) + "," + std::to_string(points[i]) + "," +
             std::to_string(badges[i]);
    out += "," + std::to_string(escrow) + "," + std::to_string(gas) + "," +
           std::to_string(model_version);
    return out;
  }
};

struct ParsedEvent {
  bool input = false;
  std::uint64_t seq = 0;
  Timestamp time = 0;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;

  const std::string& field(const std::string& key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return v;
    fail(ErrorCode::ParseError, "event missing field: " + key);
  }
};

inline ParsedEvent parse_event_line(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    auto sp = line.find(' ', pos);
    if (sp == std::string_view::npos) sp = line.size();
    if (sp > pos) tokens.push_back(line.substr(pos, sp - pos));
    pos = sp + 1;
  }
  if (tokens.size() < 4) fail(ErrorCode::ParseError, "short event line");
  ParsedEvent e;
  e.input = tokens[0] == "tx";
  if (!e.input && tokens[0] != "ev") fail(ErrorCode::ParseError, "expected tx|ev");
  e.seq = detail::parse_u64(tokens[1]);
  e.time = detail::parse_u64(tokens[2]);
  e.kind = std::string(tokens[3]);
  for (std::size_t i = 4; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::ParseError, "event field missing '='");
    e.fields.emplace_back(std::string(tokens[i].substr(0, eq)),
                          std::string(tokens[i].substr(eq + 1)));
  }
  return e;
}

inline std::string join_indices(const FeatureVector& x) {
  std::string out;
  for (std::size_t i = 0; i < x.indices().size(); ++i) {
    if (i) out += ",";
    out += std::to_string(x.indices()[i]);
  }
  return out;
}

inline FeatureVector parse_indices(std::string_view text) {
  std::vector<std::uint32_t> idx;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto c = text.find(',', pos);
    if (c == std::string_view::npos) c = text.size();
    if (c > pos)
      idx.push_back(static_cast<std::uint32_t>(detail::parse_u64(text.substr(pos, c - pos))));
    pos = c + 1;
  }
  return FeatureVector(std::move(idx));
}

struct ReplayResult {
  bool ok = false;
  std::string message;
};

// Scenario-driven agent simulation. One instance owns one world: datasets,
// ledger, the deployed mechanism contract and the scripted agents. run()
// steps simulated time and drives every transaction; the same transaction
// appliers also serve replay, which reconstructs the world from an event
// log and checks it reaches the recorded final state.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.dataset.csv_path.empty()) {
      data_ = generate_synthetic_dataset(cfg_.dataset.synth, cfg_.seed);
    } else {
      LabeledDataset all = load_samples(cfg_.dataset.csv_path);
      const auto want = cfg_.dataset.synth.train_size + cfg_.dataset.synth.test_size;
      if (all.size() < want)
        fail(ErrorCode::InvalidArgument, "csv has " + std::to_string(all.size()) +
                                             " samples, scenario wants " + std::to_string(want));
      for (const auto& s : all) s.x.check_bounds(cfg_.dataset.synth.num_features);
      data_.train.assign(all.begin(), all.begin() + cfg_.dataset.synth.train_size);
      data_.test.assign(all.begin() + cfg_.dataset.synth.train_size,
                        all.begin() + want);
    }
    if (data_.test.empty()) fail(ErrorCode::InvalidArgument, "empty test set");

    pretrained_ = make_initial_model();

    ledger_.mint(ScenarioConfig::creator_address(), cfg_.creator_balance);
    for (const auto& a : cfg_.agents) ledger_.mint(a.address, a.starting_balance);

    agents_.reserve(cfg_.agents.size());
    for (std::size_t i = 0; i < cfg_.agents.size(); ++i) {
      AgentState st;
      st.rng = std::make_unique<Xoshiro256>(cfg_.seed + 0x9E3779B97F4A7C15ull * (i + 1));
      agents_.push_back(std::move(st));
    }
    deal_queues();

    if (cfg_.mechanism == MechanismKind::Bounty) {
      partitions_ = split_partitions(data_.test, BountyContract::kPartitions);
      for (const auto& p : partitions_) partition_payloads_.push_back(serialize_samples(p));
    }
  }

  // Contracts keep a reference to the owned ledger.
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;
  Simulation(Simulation&&) = delete;
  Simulation& operator=(Simulation&&) = delete;

  void run() {
    if (ran_) fail(ErrorCode::InvalidArgument, "run() may be called once");
    ran_ = true;

    tx_deploy();
    if (cfg_.mechanism == MechanismKind::Bounty) tx_reveal_initial();
    sample_metrics();

    Timestamp t = 0;
    while (t < cfg_.duration) {
      t += cfg_.step;
      ledger_.advance_time(cfg_.step);
      maybe_finish_bounty();
      for (std::size_t i = 0; i < agents_.size(); ++i) agent_step(i);
      if (t % cfg_.metrics_interval == 0) sample_metrics();
    }
  }

  // --- results ---------------------------------------------------------------

  const std::vector<MetricsRow>& metrics() const { return metrics_; }

  std::string metrics_csv() const {
    std::string out = "time,accuracy";
    for (std::size_t i = 0; i < cfg_.agents.size(); ++i)
      out += ",balance." + std::to_string(i) + ",points." + std::to_string(i) + ",badges." +
             std::to_string(i);
    out += ",escrow,gas,model_version\n";
    for (const auto& row : metrics_) out += row.csv_row() + "\n";
    return out;
  }

  std::string event_log_text() const {
    std::string out = "chainml-events 1\n";
    for (const auto& [k, v] : cfg_.to_kv()) out += "cfg " + k + "=" + v + "\n";
    for (const auto& e : ledger_.events()) out += e.to_line() + "\n";
    out += "end t=" + std::to_string(ledger_.now()) + " state=" + state_digest() + "\n";
    return out;
  }

  std::string state_digest() const {
    std::string text = ledger_.state_text();
    if (drt_) text += drt_->state_text();
    if (gamified_) text += gamified_->state_text();
    if (bounty_) text += bounty_->state_text();
    return hex(sha256(text));
  }

  MetricsRow compute_metrics_row() const {
    MetricsRow row;
    row.time = ledger_.now();
    row.accuracy = FixedPoint::one() - evaluate_loss(current_model(), data_.test);
    for (const auto& a : cfg_.agents) {
      row.balances.push_back(ledger_.balance(a.address));
      row.points.push_back(agent_points(a.address));
      row.badges.push_back(agent_badges(a.address));
    }
    row.escrow = ledger_.escrow();
    row.gas = ledger_.gas_total();
    row.model_version = model_version(current_model());
    return row;
  }

  const Model& current_model() const {
    if (drt_) return drt_->model();
    if (gamified_) return gamified_->model();
    if (bounty_) return bounty_->model();
    return pretrained_;
  }

  Ledger& ledger() { return ledger_; }
  const Ledger& ledger() const { return ledger_; }
  const ScenarioConfig& config() const { return cfg_; }
  const SplitDataset& data() const { return data_; }
  DrtContract* drt() { return drt_.get(); }
  GamifiedContract* gamified() { return gamified_.get(); }
  BountyContract* bounty() { return bounty_.get(); }
  std::uint64_t submissions_by(std::size_t agent) const { return agents_.at(agent).submissions; }

  // --- replay ------------------------------------------------------------------

  // Rebuilds a world from the log's embedded config, re-executes every
  // recorded transaction, and verifies the final state digest plus the last
  // metrics row. Malformed logs produce a failed result, never an exception.
  static ReplayResult replay(std::string_view log_text) try {
    std::optional<Simulation> sim;
    KeyValues cfg_kv;
    std::optional<ParsedEvent> last_metrics;
    bool saw_header = false, saw_end = false;
    std::string end_digest;
    Timestamp end_time = 0;

    std::size_t pos = 0;
    while (pos < log_text.size()) {
      auto nl = log_text.find('\n', pos);
      if (nl == std::string_view::npos) nl = log_text.size();
      const std::string_view line = log_text.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty()) continue;

      if (!saw_header) {
        if (line != "chainml-events 1") return {false, "unrecognized log header"};
        saw_header = true;
        continue;
      }
      if (line.rfind("cfg ", 0) == 0) {
        const auto body = line.substr(4);
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) return {false, "bad cfg line"};
        cfg_kv[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
        continue;
      }
      if (!sim) sim.emplace(ScenarioConfig::from_kv(cfg_kv));

      if (line.rfind("end ", 0) == 0) {
        const ParsedEvent e = parse_event_line("ev 0 0 end " + std::string(line.substr(4)));
        end_time = detail::parse_u64(e.field("t"));
        end_digest = e.field("state");
        saw_end = true;
        break;
      }

      const ParsedEvent e = parse_event_line(line);
      if (!e.input) {
        if (e.kind == "metrics") last_metrics = e;
        continue;
      }
      if (e.time > sim->ledger_.now()) sim->ledger_.set_time(e.time);
      try {
        sim->apply_tx(e);
      } catch (const ChainError& err) {
        return {false, "tx " + std::to_string(e.seq) + " (" + e.kind + ") failed: " + err.what()};
      }
    }

    if (!sim) return {false, "log contains no configuration"};
    if (!saw_end) return {false, "log has no end record"};
    if (end_time > sim->ledger_.now()) sim->ledger_.set_time(end_time);

    const std::string digest = sim->state_digest();
    if (digest != end_digest)
      return {false, "state digest mismatch: replay " + digest + " vs recorded " + end_digest};

    if (last_metrics) {
      const MetricsRow row = sim->compute_metrics_row();
      const auto expect = row.fields();
      if (expect != last_metrics->fields) return {false, "final metrics row mismatch"};
      if (last_metrics->time != row.time) return {false, "final metrics time mismatch"};
    }
    return {true, "replay ok: state " + digest};
  } catch (const ChainError& e) {
    return {false, std::string("malformed log: ") + e.what()};
  }

 private:
  struct AgentState {
    std::vector<std::size_t> queue;  // indices into data_.train
    std::size_t cursor = 0;
    Timestamp next_submission = 0;
    Amount spent = 0;  // gross deposits/stakes
    std::uint64_t submissions = 0;
    std::unique_ptr<Xoshiro256> rng;
  };

  std::uint64_t pretrain_count() const {
    return static_cast<std::uint64_t>(
        static_cast<__int128>(cfg_.initial_train_fraction.mantissa()) * data_.train.size() /
        FixedPoint::kScale);
  }

  Model make_initial_model() const {
    Model m = cfg_.model == ModelKind::Perceptron
                  ? Model(PerceptronModel(cfg_.dataset.synth.num_features, cfg_.learning_rate))
                  : Model(CentroidModel(cfg_.dataset.synth.num_features, cfg_.num_classes));
    const std::uint64_t k = pretrain_count();
    for (std::uint64_t i = 0; i < k && i < data_.train.size(); ++i)
      update(m, data_.train[i].x, data_.train[i].y);
    return m;
  }

  // The post-pretraining pool is shuffled deterministically before it is
  // dealt round-robin, so every agent's stream is label-representative no
  // matter how the dataset file is ordered.
  void deal_queues() {
    std::vector<std::size_t> pool;
    for (std::size_t j = pretrain_count(); j < data_.train.size(); ++j) pool.push_back(j);
    Xoshiro256 rng(cfg_.seed ^ 0x5ca77e12d4ea1e15ull);
    for (std::size_t i = pool.size(); i > 1; --i)
      std::swap(pool[i - 1], pool[rng.bounded(i)]);
    for (std::size_t j = 0; j < pool.size(); ++j)
      agents_[j % agents_.size()].queue.push_back(pool[j]);
    for (std::size_t i = 0; i < agents_.size(); ++i)
      agents_[i].next_submission = cfg_.agents[i].policy.submission_interval;
  }

  // --- transaction appliers (log + execute; shared by run and replay) --------

  void tx_deploy() {
    ledger_.log_tx("deploy", {{"creator", ScenarioConfig::creator_address().hex()}});
    const Address self = ScenarioConfig::contract_address();
    const Address creator = ScenarioConfig::creator_address();
    switch (cfg_.mechanism) {
      case MechanismKind::Points:
        gamified_ = std::make_unique<GamifiedContract>(ledger_, self, creator, pretrained_);
        break;
      case MechanismKind::Drt:
        drt_ = std::make_unique<DrtContract>(ledger_, self, creator, cfg_.drt, pretrained_);
        break;
      case MechanismKind::Bounty: {
        std::vector<Digest> digests;
        for (const auto& p : partition_payloads_) digests.push_back(sha256(p));
        EndCondition end{cfg_.bounty.deadline, cfg_.bounty.max_participants};
        bounty_ = std::make_unique<BountyContract>(ledger_, self, creator,
                                                   cfg_.bounty.amount_units, digests, end,
                                                   pretrained_, cfg_.seed);
        break;
      }
    }
  }

  void tx_reveal_initial() {
    ledger_.log_tx("reveal_initial", {{"who", ScenarioConfig::creator_address().hex()}});
    std::vector<std::string> payloads;
    for (const auto idx : bounty_->initial_reveal_indices())
      payloads.push_back(partition_payloads_[idx]);
    bounty_->reveal_initial(ScenarioConfig::creator_address(), payloads);
  }

  void tx_reveal_final() {
    ledger_.log_tx("reveal_final", {{"who", ScenarioConfig::creator_address().hex()}});
    std::vector<std::string> payloads;
    const auto& sel = bounty_->initial_reveal_indices();
    for (std::uint32_t p = 0; p < BountyContract::kPartitions; ++p)
      if (!std::binary_search(sel.begin(), sel.end(), p))
        payloads.push_back(partition_payloads_[p]);
    bounty_->reveal_final(ScenarioConfig::creator_address(), payloads, ledger_.now());
  }

  void tx_settle() {
    ledger_.log_tx("settle", {{"who", ScenarioConfig::creator_address().hex()}});
    bounty_->settle(ScenarioConfig::creator_address());
  }

  void tx_submit(const Address& who, const FeatureVector& x, Label y, Amount deposit) {
    ledger_.log_tx("submit", {{"who", who.hex()},
                              {"x", join_indices(x)},
                              {"y", std::to_string(y)},
                              {"deposit", std::to_string(deposit)}});
    if (drt_)
      drt_->add_data(who, x, y, deposit, ledger_.now());
    else if (gamified_)
      gamified_->add_data(who, x, y, ledger_.now());
    else
      fail(ErrorCode::InvalidArgument, "submit without a data contract");
  }

  void tx_participate(const Address& who, const FeatureVector& x, Label y) {
    ledger_.log_tx("participate",
                   {{"who", who.hex()}, {"x", join_indices(x)}, {"y", std::to_string(y)}});
    bounty_->participate(who, x, y, ledger_.now());
  }

  void tx_refund(const Address& who, std::uint64_t id) {
    ledger_.log_tx("refund", {{"who", who.hex()}, {"id", std::to_string(id)}});
    drt_->claim_refund(who, id, ledger_.now());
  }

  void tx_take(const Address& who, std::uint64_t id) {
    ledger_.log_tx("take", {{"who", who.hex()}, {"id", std::to_string(id)}});
    drt_->report_take(who, id, ledger_.now());
  }

  void tx_sweep(const Address& who, std::uint64_t id) {
    ledger_.log_tx("sweep", {{"who", who.hex()}, {"id", std::to_string(id)}});
    drt_->sweep_stale(who, id, ledger_.now());
  }

  void apply_tx(const ParsedEvent& e) {
    if (e.kind == "deploy") {
      tx_deploy();
    } else if (e.kind == "reveal_initial") {
      tx_reveal_initial();
    } else if (e.kind == "reveal_final") {
      tx_reveal_final();
    } else if (e.kind == "settle") {
      tx_settle();
    } else if (e.kind == "submit") {
      tx_submit(Address::parse_hex(e.field("who")), parse_indices(e.field("x")),
                static_cast<Label>(detail::parse_u64(e.field("y"))),
                detail::parse_u64(e.field("deposit")));
    } else if (e.kind == "participate") {
      tx_participate(Address::parse_hex(e.field("who")), parse_indices(e.field("x")),
                     static_cast<Label>(detail::parse_u64(e.field("y"))));
    } else if (e.kind == "refund") {
      tx_refund(Address::parse_hex(e.field("who")), detail::parse_u64(e.field("id")));
    } else if (e.kind == "take") {
      tx_take(Address::parse_hex(e.field("who")), detail::parse_u64(e.field("id")));
    } else if (e.kind == "sweep") {
      tx_sweep(Address::parse_hex(e.field("who")), detail::parse_u64(e.field("id")));
    } else {
      fail(ErrorCode::ParseError, "unknown tx kind: " + e.kind);
    }
  }

  // --- scripted agents ---------------------------------------------------------

  void maybe_finish_bounty() {
    if (!bounty_ || bounty_settled_) return;
    if (bounty_->phase() == BountyPhase::Aborted) {
      bounty_settled_ = true;
      return;
    }
    if (bounty_->phase() == BountyPhase::Settled) {
      bounty_settled_ = true;
      return;
    }
    if (!bounty_->end_condition_met(ledger_.now())) return;
    if (bounty_->phase() == BountyPhase::Commitment) return;
    tx_reveal_final();
    if (bounty_->phase() != BountyPhase::Aborted) tx_settle();
    bounty_settled_ = true;
  }

  // At most one action per agent per tick; harvesting available value comes
  // before new submissions: refund > report > sweep > submit.
  void agent_step(std::size_t i) {
    const AgentSpec& spec = cfg_.agents[i];
    if (spec.policy.kind == AgentPolicy::Kind::Inactive) return;
    const Address& addr = spec.address;
    const Timestamp now = ledger_.now();

    if (drt_) {
      if (spec.policy.claims_refunds) {
        for (std::uint64_t id = 0; id < drt_->data().size(); ++id) {
          if (drt_->refund_open(addr, id, now)) {
            tx_refund(addr, id);
            return;
          }
        }
      }
      if (spec.policy.reports_bad_data) {
        for (std::uint64_t id = 0; id < drt_->data().size(); ++id) {
          if (drt_->take_open(addr, id)) {
            tx_take(addr, id);
            return;
          }
        }
        for (std::uint64_t id = 0; id < drt_->data().size(); ++id) {
          if (drt_->sweep_open(addr, id, now)) {
            tx_sweep(addr, id);
            return;
          }
        }
      }
    }
    try_submit(i);
  }

  void try_submit(std::size_t i) {
    const AgentSpec& spec = cfg_.agents[i];
    AgentState& st = agents_[i];
    const Timestamp now = ledger_.now();
    if (now < st.next_submission || st.queue.empty()) return;

    Amount cost = 0;
    if (drt_) {
      cost = drt_->required_deposit(now);
    } else if (bounty_) {
      if (bounty_->phase() != BountyPhase::Participation ||
          bounty_->end_condition_met(now))
        return;
      cost = kUnit;
    }
    if (spec.policy.kind == AgentPolicy::Kind::Malicious &&
        st.spent + cost > spec.policy.deposit_budget)
      return;
    if (ledger_.balance(spec.address) < cost) return;

    const LabeledSample& s = data_.train[st.queue[st.cursor % st.queue.size()]];
    Label y = s.y;
    const std::uint32_t classes = model_num_classes(current_model());
    const bool flip =
        static_cast<std::int64_t>(st.rng->bounded(FixedPoint::kScale)) <
        spec.policy.label_flip_rate.mantissa();
    if (flip) y = (y + 1 + static_cast<Label>(st.rng->bounded(classes - 1))) % classes;

    if (drt_ && drt_->is_recent_duplicate(spec.address, s.x, y, now)) {
      ++st.cursor;  // skip the sample, try the next one next tick
      return;
    }

    if (drt_)
      tx_submit(spec.address, s.x, y, cost);
    else if (gamified_)
      tx_submit(spec.address, s.x, y, 0);
    else
      tx_participate(spec.address, s.x, y);

    ++st.cursor;
    st.spent += cost;
    ++st.submissions;
    st.next_submission = now + spec.policy.submission_interval;
  }

  // --- metrics -------------------------------------------------------------------

  std::uint64_t agent_points(const Address& a) const {
    if (drt_) return drt_->points().points(a);
    if (gamified_) return gamified_->points().points(a);
    return 0;
  }

  std::uint64_t agent_badges(const Address& a) const {
    if (drt_) return drt_->points().badges(a).size();
    if (gamified_) return gamified_->points().badges(a).size();
    return 0;
  }

  void sample_metrics() {
    if (!ledger_.conserved())
      fail(ErrorCode::InvalidArgument, "currency conservation violated");
    MetricsRow row = compute_metrics_row();
    ledger_.log_derived("metrics", row.fields());
    metrics_.push_back(std::move(row));
  }

  ScenarioConfig cfg_;
  SplitDataset data_;
  Model pretrained_ = PerceptronModel(2);
  Ledger ledger_;
  std::unique_ptr<DrtContract> drt_;
  std::unique_ptr<GamifiedContract> gamified_;
  std::unique_ptr<BountyContract> bounty_;
  std::vector<LabeledDataset> partitions_;
  std::vector<std::string> partition_payloads_;
  std::vector<AgentState> agents_;
  std::vector<MetricsRow> metrics_;
  bool ran_ = false;
  bool bounty_settled_ = false;
};

}  // namespace chainml
