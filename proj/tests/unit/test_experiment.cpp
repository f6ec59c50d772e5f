#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "mcaixi/experiment.hpp"

using namespace mcaixi;

namespace {

const char* kMinimalConfig = "[agent]\ndomain = grid\n";

std::string strip_time_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    // drop the fifth field (search_time_s)
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (i != 4) out << fields[i] << (i + 1 == fields.size() ? "" : ",");
    out << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("minimal config takes the published defaults for the domain") {
  const ExperimentSpec spec = parse_config(kMinimalConfig);
  CHECK(spec.agent.domain == "grid");
  CHECK(spec.agent.depth == 96);
  CHECK(spec.agent.horizon == 12);
  CHECK(spec.eval_cycles == 2000);
}

TEST_CASE("config errors carry the offending line") {
  CHECK_THROWS_WITH(parse_config("[agent]\ndomain = grid\ndepth = 0\n"),
                    Catch::Matchers::ContainsSubstring("depth"));
  CHECK_THROWS_WITH(parse_config("[agent]\ndomain = grid\nwibble = 3\n"),
                    Catch::Matchers::ContainsSubstring("line 3"));
  CHECK_THROWS_WITH(parse_config("[agent]\ndomain = grid\ndepth = banana\n"),
                    Catch::Matchers::ContainsSubstring("line 3"));
  CHECK_THROWS_WITH(parse_config("domain = grid\n"), Catch::Matchers::ContainsSubstring("section"));
  CHECK_THROWS_WITH(parse_config("[agent]\ndomain = grid\n[experiment]\ncheckpoints = 5, 5\n"),
                    Catch::Matchers::ContainsSubstring("increasing"));
  CHECK_THROWS_AS(parse_config("[agent]\nseed = 3\n"), std::runtime_error);  // missing domain
}

TEST_CASE("round trip: parse(serialize(spec)) == spec") {
  ExperimentSpec spec = parse_config(kMinimalConfig);
  spec.agent.simulations = 77;
  spec.agent.ucb_c = 0.7071067811865476;
  spec.checkpoints = {10, 100, 1000};
  spec.repeats = 3;
  spec.out = "x.csv";
  const ExperimentSpec back = parse_config(serialize_config(spec));
  CHECK(back == spec);
  CHECK(serialize_config(back) == serialize_config(spec));
}

TEST_CASE("csv schema: header, row count, reparsability") {
  std::vector<ResultRow> rows;
  std::ostringstream empty;
  emit_csv(rows, empty);
  CHECK(empty.str() == "domain,seed,experience,normalized_reward,search_time_s,simulations\n");

  rows.push_back(ResultRow{"grid", 1, 100, 0.51234, 0.00123, 50});
  std::ostringstream one;
  emit_csv(rows, one);
  std::istringstream in(one.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
  }
  CHECK(lines == 2);
  CHECK(one.str().back() == '\n');

  // values survive a re-parse
  std::istringstream reparse(one.str());
  std::getline(reparse, line);  // header
  std::getline(reparse, line);
  std::istringstream ls(line);
  std::string f;
  std::vector<std::string> fields;
  while (std::getline(ls, f, ',')) fields.push_back(f);
  CHECK(fields[0] == "grid");
  CHECK(std::stoull(fields[1]) == 1);
  CHECK(std::stoull(fields[2]) == 100);
  CHECK(std::stod(fields[3]) == Catch::Approx(0.51234));
  CHECK(std::stoull(fields[5]) == 50);
}

TEST_CASE("experiment runs are deterministic modulo the timing column") {
  ExperimentSpec spec = parse_config(
      "[agent]\n"
      "domain = biased-rps\n"
      "depth = 8\n"
      "horizon = 2\n"
      "simulations = 10\n"
      "seed = 5\n"
      "[experiment]\n"
      "checkpoints = 20, 60\n"
      "eval_cycles = 40\n"
      "repeats = 2\n"
      "out =\n");
  spec.out.clear();
  std::ostringstream csv1, csv2;
  const auto rows1 = run_experiment(spec, &csv1);
  const auto rows2 = run_experiment(spec, &csv2);
  CHECK(rows1.size() == 4);
  CHECK(strip_time_column(csv1.str()) == strip_time_column(csv2.str()));
}

TEST_CASE("checkpoint evaluation does not perturb the training trajectory") {
  // A run with evaluation sweeps must leave the trained model identical to
  // an evaluation-free run.
  AgentConfig cfg;
  cfg.domain = "biased-rps";
  cfg.depth = 8;
  cfg.horizon = 2;
  cfg.simulations = 10;
  cfg.seed = 6;

  auto env1 = make_env(cfg.domain, derive_rng(cfg.seed, 3)());
  Agent plain(cfg, env1->space());
  plain.run_training(*env1, 80);

  auto env2 = make_env(cfg.domain, derive_rng(cfg.seed, 3)());
  Agent swept(cfg, env2->space());
  for (int leg = 0; leg < 4; ++leg) {
    swept.run_training(*env2, 20);
    Agent probe = swept;  // forked evaluation
    auto probe_env = env2->clone();
    probe.run_greedy_eval(*probe_env, 30);
  }
  CHECK(swept.model().deep_equal(plain.model()));
  CHECK(swept.model().log_block() == plain.model().log_block());
}

TEST_CASE("experiment rows normalise by the domain oracle") {
  ExperimentSpec spec = parse_config(
      "[agent]\n"
      "domain = biased-rps\n"
      "depth = 8\n"
      "horizon = 2\n"
      "simulations = 10\n"
      "eps0 = 1.0\n"
      "eps_decay = 1.0\n"
      "eps_min = 1.0\n"
      "seed = 7\n"
      "[experiment]\n"
      "checkpoints = 50\n"
      "eval_cycles = 400\n"
      "repeats = 2\n");
  spec.out.clear();
  const auto rows = run_experiment(spec, nullptr);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.normalized_reward));
    // an untrained RPS agent is close to break-even against this opponent
    CHECK(std::abs(row.normalized_reward) < 0.6);
    CHECK(row.simulations == 10);
    CHECK(row.domain == "biased-rps");
  }
}
