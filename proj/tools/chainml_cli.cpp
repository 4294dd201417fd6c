#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chainml/chainml.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CLI::ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CLI::ValidationError("cannot write " + path);
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator for collaboratively trained on-chain models"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and emit metrics");
  std::string scenario_path, out_path, events_path, contributions_path;
  std::optional<std::uint64_t> seed_override;
  simulate->add_option("--scenario", scenario_path, "Scenario key/value file")->required();
  simulate->add_option("--out", out_path, "Metrics CSV output path")->required();
  simulate->add_option("--seed", seed_override, "Override the scenario seed");
  simulate->add_option("--events", events_path, "Also write the event log here");
  simulate->add_option("--contributions", contributions_path,
                       "Dump the stored contributions as CSV");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset file");
  std::string spec_path, data_out;
  gen->add_option("--spec", spec_path, "Dataset spec key/value file")->required();
  gen->add_option("--out", data_out, "Output path (train then test samples)")->required();

  // replay
  auto* replay = app.add_subcommand("replay", "Re-execute an event log and verify it");
  std::string replay_path;
  replay->add_option("--events", replay_path, "Event log to verify")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      auto kv = chainml::parse_kv_text(read_file(scenario_path));
      if (seed_override) kv["seed"] = std::to_string(*seed_override);
      chainml::Simulation sim(chainml::ScenarioConfig::from_kv(kv));
      sim.run();
      write_file(out_path, sim.metrics_csv());
      if (!events_path.empty()) write_file(events_path, sim.event_log_text());
      if (!contributions_path.empty()) {
        const chainml::DataHandler* data = nullptr;
        if (sim.drt()) data = &sim.drt()->data();
        if (sim.gamified()) data = &sim.gamified()->data();
        if (sim.bounty()) data = &sim.bounty()->data();
        std::ostringstream csv;
        if (data) data->export_csv(csv);
        write_file(contributions_path, csv.str());
      }
      const auto& last = sim.metrics().back();
      std::cout << "final time " << last.time << ", accuracy " << last.accuracy.to_string()
                << ", escrow " << last.escrow << ", gas " << last.gas << "\n";
      return 0;
    }
    if (*gen) {
      const auto kv = chainml::parse_kv_text(read_file(spec_path));
      chainml::SyntheticSpec spec;
      spec.num_features =
          static_cast<std::uint32_t>(chainml::detail::kv_u64_or(kv, "dataset.features", 1000));
      spec.train_size =
          static_cast<std::uint32_t>(chainml::detail::kv_u64_or(kv, "dataset.train_size", 2000));
      spec.test_size =
          static_cast<std::uint32_t>(chainml::detail::kv_u64_or(kv, "dataset.test_size", 500));
      spec.noise = chainml::detail::kv_fp_or(kv, "dataset.noise", chainml::FixedPoint::zero());
      spec.active_per_class = static_cast<std::uint32_t>(
          chainml::detail::kv_u64_or(kv, "dataset.active_per_class", 10));
      const std::uint64_t seed = chainml::detail::kv_u64_or(kv, "seed", 0);
      const auto data = chainml::generate_synthetic_dataset(spec, seed);
      std::string text = chainml::serialize_samples(data.train);
      text += chainml::serialize_samples(data.test);
      write_file(data_out, text);
      std::cout << "wrote " << data.train.size() << "+" << data.test.size() << " samples to "
                << data_out << "\n";
      return 0;
    }
    if (*replay) {
      const auto result = chainml::Simulation::replay(read_file(replay_path));
      std::cout << result.message << "\n";
      return result.ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
