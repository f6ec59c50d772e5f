#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mcaixi/agent.hpp"
#include "mcaixi/domains.hpp"

namespace mcaixi {

// A full experiment: one agent configuration, a schedule of training
// checkpoints, and greedy evaluation sweeps at each checkpoint, repeated
// over seeds.
struct ExperimentSpec {
  AgentConfig agent;
  std::vector<std::uint64_t> checkpoints = {1000};
  std::uint64_t eval_cycles = 2000;
  int repeats = 1;
  std::string out = "results.csv";
  double pacman_optimum = 1.0;  // normalisation estimate; pacman has no known optimum
  bool depth_explicit = false;
  bool horizon_explicit = false;

  void validate() const {
    agent.validate();
    domain_info(agent.domain);  // throws on unknown domain
    if (checkpoints.empty()) throw std::invalid_argument("ExperimentSpec: no checkpoints");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
      if (checkpoints[i] <= checkpoints[i - 1])
        throw std::invalid_argument("ExperimentSpec: checkpoints must be strictly increasing");
    if (repeats < 1) throw std::invalid_argument("ExperimentSpec: repeats must be >= 1");
    if (eval_cycles < 1) throw std::invalid_argument("ExperimentSpec: eval_cycles must be >= 1");
    if (pacman_optimum <= 0.0) throw std::invalid_argument("ExperimentSpec: pacman_optimum must be > 0");
  }

  friend bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) {
    return a.agent == b.agent && a.checkpoints == b.checkpoints && a.eval_cycles == b.eval_cycles &&
           a.repeats == b.repeats && a.out == b.out && a.pacman_optimum == b.pacman_optimum;
  }
};

struct ResultRow {
  std::string domain;
  std::uint64_t seed = 0;
  std::uint64_t experience = 0;
  double normalized_reward = 0.0;
  double search_time_s = 0.0;
  std::uint64_t simulations = 0;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string trim(std::string s) {
  const auto begin = s.find_first_not_of(" \t\r");
  const auto end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& value, int line_no) {
  T out{};
  const std::string v = trim(value);
  const char* first = v.data();
  const char* last = v.data() + v.size();
  std::from_chars_result r{};
  if constexpr (std::is_floating_point_v<T>) {
    char* endp = nullptr;
    out = static_cast<T>(std::strtod(first, &endp));
    if (endp != last || v.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": expected a number, got '" + v + "'");
    return out;
  } else {
    r = std::from_chars(first, last, out);
    if (r.ec != std::errc{} || r.ptr != last)
      throw ConfigError("line " + std::to_string(line_no) + ": expected an integer, got '" + v + "'");
    return out;
  }
}

inline bool parse_bool(const std::string& value, int line_no) {
  const std::string v = trim(value);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("line " + std::to_string(line_no) + ": expected true/false, got '" + v + "'");
}

}  // namespace detail

// Line-based `key = value` format with [section] headers. Unknown keys and
// malformed values are rejected with the offending line number. Omitted
// depth/horizon default to the domain's published configuration.
inline ExperimentSpec parse_config(const std::string& text) {
  ExperimentSpec spec;
  spec.agent.domain.clear();
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_domain = false;

  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw detail::ConfigError("line " + std::to_string(line_no) + ": malformed section");
      section = line.substr(1, line.size() - 2);
      if (section != "agent" && section != "experiment")
        throw detail::ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw detail::ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (section == "agent") {
      if (key == "domain") {
        spec.agent.domain = value;
        saw_domain = true;
      } else if (key == "depth") {
        spec.agent.depth = detail::parse_number<int>(value, line_no);
        spec.depth_explicit = true;
      } else if (key == "horizon") {
        spec.agent.horizon = detail::parse_number<int>(value, line_no);
        spec.horizon_explicit = true;
      } else if (key == "simulations") {
        spec.agent.simulations = detail::parse_number<std::uint64_t>(value, line_no);
      } else if (key == "ucb_c") {
        spec.agent.ucb_c = detail::parse_number<double>(value, line_no);
      } else if (key == "eps0") {
        spec.agent.eps.eps0 = detail::parse_number<double>(value, line_no);
      } else if (key == "eps_decay") {
        spec.agent.eps.decay = detail::parse_number<double>(value, line_no);
      } else if (key == "eps_min") {
        spec.agent.eps.floor = detail::parse_number<double>(value, line_no);
      } else if (key == "seed") {
        spec.agent.seed = detail::parse_number<std::uint64_t>(value, line_no);
      } else if (key == "learn_during_eval") {
        spec.agent.learn_during_eval = detail::parse_bool(value, line_no);
      } else {
        throw detail::ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "' in [agent]");
      }
    } else if (section == "experiment") {
      if (key == "checkpoints") {
        spec.checkpoints.clear();
        std::istringstream vs(value);
        std::string item;
        while (std::getline(vs, item, ','))
          spec.checkpoints.push_back(detail::parse_number<std::uint64_t>(item, line_no));
        if (spec.checkpoints.empty())
          throw detail::ConfigError("line " + std::to_string(line_no) + ": empty checkpoint list");
      } else if (key == "eval_cycles") {
        spec.eval_cycles = detail::parse_number<std::uint64_t>(value, line_no);
      } else if (key == "repeats") {
        spec.repeats = detail::parse_number<int>(value, line_no);
      } else if (key == "out") {
        spec.out = value;
      } else if (key == "pacman_optimum") {
        spec.pacman_optimum = detail::parse_number<double>(value, line_no);
      } else {
        throw detail::ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "' in [experiment]");
      }
    } else {
      throw detail::ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    }
  }

  if (!saw_domain) throw detail::ConfigError("config: missing required key 'domain'");
  const DomainInfo& info = domain_info(spec.agent.domain);
  if (!spec.depth_explicit) spec.agent.depth = info.suggested_depth;
  if (!spec.horizon_explicit) spec.agent.horizon = info.suggested_horizon;
  spec.validate();
  return spec;
}

// Canonical re-serialisation: parse(serialize(spec)) == spec.
inline std::string serialize_config(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "[agent]\n";
  out << "domain = " << spec.agent.domain << "\n";
  out << "depth = " << spec.agent.depth << "\n";
  out << "horizon = " << spec.agent.horizon << "\n";
  out << "simulations = " << spec.agent.simulations << "\n";
  out << "ucb_c = " << detail::format_double(spec.agent.ucb_c) << "\n";
  out << "eps0 = " << detail::format_double(spec.agent.eps.eps0) << "\n";
  out << "eps_decay = " << detail::format_double(spec.agent.eps.decay) << "\n";
  out << "eps_min = " << detail::format_double(spec.agent.eps.floor) << "\n";
  out << "seed = " << spec.agent.seed << "\n";
  out << "learn_during_eval = " << (spec.agent.learn_during_eval ? "true" : "false") << "\n";
  out << "\n[experiment]\n";
  out << "checkpoints = ";
  for (std::size_t i = 0; i < spec.checkpoints.size(); ++i)
    out << (i ? ", " : "") << spec.checkpoints[i];
  out << "\n";
  out << "eval_cycles = " << spec.eval_cycles << "\n";
  out << "repeats = " << spec.repeats << "\n";
  out << "out = " << spec.out << "\n";
  out << "pacman_optimum = " << detail::format_double(spec.pacman_optimum) << "\n";
  return out.str();
}

// Header `domain,seed,experience,normalized_reward,search_time_s,simulations`,
// one line per row, plain decimal formatting, newline terminated.
inline void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "domain,seed,experience,normalized_reward,search_time_s,simulations\n";
  for (const ResultRow& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.10g,%.6f,", r.normalized_reward, r.search_time_s);
    out << r.domain << ',' << r.seed << ',' << r.experience << ',' << buf << r.simulations << "\n";
  }
  if (!out) throw std::runtime_error("emit_csv: sink write failure");
}

// Runs the full protocol: per seed, one continuous training run with a
// greedy evaluation sweep at every checkpoint. Evaluation happens on a fork
// of the agent and a clone of the environment, so a checkpoint never
// perturbs the training trajectory. Seeds fan out over worker threads;
// results are merged and sorted, so the output is deterministic for a given
// spec regardless of scheduling.
inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, std::ostream* csv_sink = nullptr,
                                             int max_threads = 0) {
  spec.validate();
  const double optimum =
      spec.agent.domain == "pacman" ? spec.pacman_optimum : optimal_average_reward(spec.agent.domain);

  std::vector<ResultRow> rows;
  std::mutex rows_mutex;
  std::vector<std::string> errors;

  const int workers = std::max(1, std::min<int>(max_threads > 0 ? max_threads : static_cast<int>(std::thread::hardware_concurrency()),
                                                spec.repeats));
  std::vector<std::thread> pool;
  std::atomic<int> next_seed{0};

  const auto worker = [&]() {
    while (true) {
      const int r = next_seed.fetch_add(1);
      if (r >= spec.repeats) return;
      try {
        AgentConfig cfg = spec.agent;
        cfg.seed = spec.agent.seed + static_cast<std::uint64_t>(r);
        auto env = make_env(cfg.domain, derive_rng(cfg.seed, 3)());
        Agent agent(cfg, env->space());
        std::uint64_t trained = 0;
        for (const std::uint64_t checkpoint : spec.checkpoints) {
          agent.run_training(*env, checkpoint - trained);
          trained = checkpoint;
          Agent probe = agent;          // fork: evaluation never touches the trainee
          auto probe_env = env->clone();
          const EvalResult eval = probe.run_greedy_eval(*probe_env, spec.eval_cycles);
          ResultRow row;
          row.domain = cfg.domain;
          row.seed = cfg.seed;
          row.experience = checkpoint;
          row.normalized_reward = eval.mean_reward / optimum;
          row.search_time_s = eval.mean_search_seconds;
          row.simulations = cfg.simulations;
          std::lock_guard<std::mutex> lock(rows_mutex);
          rows.push_back(std::move(row));
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(rows_mutex);
        errors.emplace_back(e.what());
      }
    }
  };

  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.seed, a.experience) < std::tie(b.seed, b.experience);
  });

  // Partial results are still flushed when a seed failed.
  if (csv_sink) {
    emit_csv(rows, *csv_sink);
  } else if (!spec.out.empty()) {
    std::ofstream f(spec.out);
    if (!f) throw std::runtime_error("run_experiment: cannot open " + spec.out);
    emit_csv(rows, f);
  }
  if (!errors.empty()) throw std::runtime_error("run_experiment: " + errors.front());
  return rows;
}

}  // namespace mcaixi
