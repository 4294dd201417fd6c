#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "chainml/simulation.hpp"

using namespace chainml;

namespace {

ScenarioConfig small_drt_config() {
  ScenarioConfig cfg;
  cfg.seed = 5;
  cfg.dataset.synth.num_features = 40;
  cfg.dataset.synth.train_size = 300;
  cfg.dataset.synth.test_size = 100;
  cfg.dataset.synth.noise = FixedPoint::parse("0.05");
  cfg.dataset.synth.active_per_class = 8;
  cfg.creator_balance = 10 * kUnit;
  cfg.duration = 14 * 86'400;
  cfg.metrics_interval = 86'400;
  cfg.step = 3'600;
  cfg.drt.deposit_constant = 0;  // flat d_min deposits

  AgentSpec honest;
  honest.address = ScenarioConfig::default_agent_address(0);
  honest.policy.submission_interval = 86'400;
  honest.starting_balance = 1000 * kUnit;
  cfg.agents.push_back(honest);

  AgentSpec malicious;
  malicious.address = ScenarioConfig::default_agent_address(1);
  malicious.policy.kind = AgentPolicy::Kind::Malicious;
  malicious.policy.label_flip_rate = FixedPoint::one();
  malicious.policy.submission_interval = 3 * 86'400;
  malicious.starting_balance = 1000 * kUnit;
  cfg.agents.push_back(malicious);
  return cfg;
}

std::vector<ParsedEvent> transactions_at(const std::string& log, Timestamp t) {
  std::vector<ParsedEvent> out;
  std::istringstream is(log);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("tx ", 0) != 0) continue;
    const auto e = parse_event_line(line);
    if (e.time == t) out.push_back(e);
  }
  return out;
}

}  // namespace

TEST_CASE("an all-inactive scenario changes nothing") {
  ScenarioConfig cfg = small_drt_config();
  for (auto& a : cfg.agents) a.policy.kind = AgentPolicy::Kind::Inactive;
  Simulation sim(cfg);
  sim.run();
  REQUIRE(sim.metrics().size() == 15);  // t=0 plus one per day
  const auto first = sim.metrics().front().accuracy;
  for (const auto& row : sim.metrics()) {
    CHECK(row.accuracy == first);
    CHECK(row.escrow == 0);
  }
  // only the deploy gas was spent
  CHECK(sim.metrics().back().gas == sim.ledger().gas_cost(ActionKind::Deploy));
}

TEST_CASE("config validation catches bad scenarios") {
  ScenarioConfig cfg = small_drt_config();
  cfg.agents.clear();
  CHECK_THROWS_AS(Simulation(cfg), ChainError);

  cfg = small_drt_config();
  cfg.initial_train_fraction = FixedPoint::one();
  CHECK_THROWS_AS(Simulation(cfg), ChainError);

  cfg = small_drt_config();
  cfg.metrics_interval = 5000;  // not a multiple of step
  CHECK_THROWS_AS(Simulation(cfg), ChainError);

  // typo'd keys are rejected rather than silently defaulted
  auto kv = small_drt_config().to_kv();
  kv["drt.refundwait"] = "1";
  CHECK_THROWS_AS(ScenarioConfig::from_kv(kv), ChainError);
  kv.erase("drt.refundwait");
  CHECK(ScenarioConfig::from_kv(kv).seed == 5);
}

TEST_CASE("identical seeds give identical bytes, different seeds differ") {
  const ScenarioConfig cfg = small_drt_config();
  Simulation a(cfg);
  a.run();
  Simulation b(cfg);
  b.run();
  CHECK(a.metrics_csv() == b.metrics_csv());
  CHECK(a.event_log_text() == b.event_log_text());

  ScenarioConfig other = cfg;
  other.seed = 6;
  Simulation c(other);
  c.run();
  CHECK(a.event_log_text() != c.event_log_text());
}

TEST_CASE("metrics accuracy equals one minus the held-out loss") {
  Simulation sim(small_drt_config());
  sim.run();
  const auto expect = FixedPoint::one() - evaluate_loss(sim.current_model(), sim.data().test);
  CHECK(sim.metrics().back().accuracy == expect);
  // currency conservation held at the end
  CHECK(sim.ledger().conserved());
}

TEST_CASE("replay reconstructs the final state and rejects tampering") {
  Simulation sim(small_drt_config());
  sim.run();
  const std::string log = sim.event_log_text();

  const auto ok = Simulation::replay(log);
  CHECK(ok.ok);

  // tamper with a transaction field
  std::string tampered = log;
  const auto pos = tampered.find("deposit=1000000000");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 18, "deposit=1000000001");
  const auto bad = Simulation::replay(tampered);
  CHECK_FALSE(bad.ok);

  // tamper with the recorded digest
  std::string bad_digest = log;
  const auto end_pos = bad_digest.rfind("state=");
  REQUIRE(end_pos != std::string::npos);
  bad_digest[end_pos + 6] = bad_digest[end_pos + 6] == 'a' ? 'b' : 'a';
  CHECK_FALSE(Simulation::replay(bad_digest).ok);

  // malformed logs fail cleanly instead of throwing
  CHECK_FALSE(Simulation::replay("").ok);
  CHECK_FALSE(Simulation::replay("garbage\nbytes\n").ok);
  CHECK_FALSE(Simulation::replay("chainml-events 1\ncfg nonsense=1\ntx x y z\n").ok);
  const auto truncated = log.substr(0, log.rfind("end "));
  CHECK_FALSE(Simulation::replay(truncated).ok);
}

TEST_CASE("agents harvest refunds before submitting") {
  ScenarioConfig cfg = small_drt_config();
  cfg.step = 86'400;  // one action per day, so priorities are visible
  Simulation sim(cfg);
  sim.run();
  const std::string log = sim.event_log_text();

  // Day 8: the honest agent's day-1 contribution is refundable and a
  // submission is due; the refund must win the tick.
  const auto day8 = transactions_at(log, 8 * 86'400);
  bool agent0_acted = false;
  for (const auto& e : day8) {
    if (e.field("who") == ScenarioConfig::default_agent_address(0).hex()) {
      if (!agent0_acted) CHECK(e.kind == "refund");
      agent0_acted = true;
    }
  }
  CHECK(agent0_acted);
}

TEST_CASE("malicious agents stop at their deposit budget") {
  ScenarioConfig cfg = small_drt_config();
  cfg.agents[1].policy.deposit_budget = 3 * kUnit;  // three flat deposits
  cfg.agents[1].policy.submission_interval = 86'400;
  Simulation sim(cfg);
  sim.run();
  CHECK(sim.submissions_by(1) == 3);
  // and they never submit again: exactly three submit transactions
  const auto& addr = cfg.agents[1].address;
  std::size_t submits = 0;
  for (const auto& e : sim.ledger().events())
    if (e.input && e.kind == "submit" && e.fields.front().second == addr.hex()) ++submits;
  CHECK(submits == 3);
}

TEST_CASE("submission rates follow the configured intervals") {
  ScenarioConfig cfg = small_drt_config();
  cfg.duration = 60 * 86'400;
  cfg.agents[1].policy.submission_interval = 6 * 86'400;
  Simulation sim(cfg);
  sim.run();
  const double honest = static_cast<double>(sim.submissions_by(0));
  const double malicious = static_cast<double>(sim.submissions_by(1));
  REQUIRE(malicious > 0);
  CHECK(honest / malicious >= 5.0);
  CHECK(honest / malicious <= 7.0);
}

TEST_CASE("bounty scenarios settle through the harness") {
  ScenarioConfig cfg;
  cfg.seed = 11;
  cfg.mechanism = MechanismKind::Bounty;
  cfg.bounty.amount_units = 4;
  cfg.bounty.deadline = 4 * 86'400;
  cfg.creator_balance = 10 * kUnit;
  cfg.dataset.synth.num_features = 30;
  cfg.dataset.synth.train_size = 200;
  cfg.dataset.synth.test_size = 100;  // divides into 100 parts
  cfg.dataset.synth.noise = FixedPoint::parse("0.1");
  cfg.dataset.synth.active_per_class = 6;
  cfg.duration = 6 * 86'400;
  cfg.step = 3'600;
  AgentSpec a;
  a.address = ScenarioConfig::default_agent_address(0);
  a.policy.submission_interval = 8 * 3'600;
  a.starting_balance = 50 * kUnit;
  cfg.agents.push_back(a);

  Simulation sim(cfg);
  sim.run();
  REQUIRE(sim.bounty() != nullptr);
  CHECK(sim.bounty()->phase() == BountyPhase::Settled);
  const auto t = sim.bounty()->participant_count();
  CHECK(t > 0);
  CHECK(sim.bounty()->paid_out() + sim.bounty()->stuck() ==
        cfg.bounty.amount_units * kUnit + t * kUnit);
  CHECK(sim.ledger().conserved());
  const auto rr = Simulation::replay(sim.event_log_text());
  CHECK(rr.ok);
}

TEST_CASE("points scenarios accrue points and badges") {
  ScenarioConfig cfg = small_drt_config();
  cfg.mechanism = MechanismKind::Points;
  cfg.duration = 30 * 86'400;
  Simulation sim(cfg);
  sim.run();
  REQUIRE(sim.gamified() != nullptr);
  const auto& addr = cfg.agents[0].address;
  CHECK(sim.gamified()->points().points(addr) == sim.submissions_by(0));
  CHECK(sim.gamified()->points().badges(addr).count(Badge::Streak) == 1);
  CHECK(sim.metrics().back().escrow == 0);  // no deposits in this mechanism
  CHECK(Simulation::replay(sim.event_log_text()).ok);
}
