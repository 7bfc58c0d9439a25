// Copyright 2026 The DMM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// dmm: run, inspect and demo dataflow matrix machines.
//
// Exit codes: 0 ok, 2 parse/validation error, 3 runtime engine error,
// 4 demo verdict failure. Every error exits with one line on stderr of the
// form "error: <kind>: <message>".
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dmm/demos.hpp"
#include "dmm/engine.hpp"
#include "dmm/errors.hpp"
#include "dmm/lightweight.hpp"
#include "dmm/network_file.hpp"
#include "dmm/vspace_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerdict = 4;

int report_error(const std::string& kind, const std::string& message,
                 int code = kExitInvalid) {
  std::string line = message;
  for (char& c : line)
    if (c == '\n') c = ' ';
  std::cerr << "error: " << kind << ": " << line << "\n";
  return code;
}

// --seed wins, then DMM_SEED, then whatever the file or demo default says.
std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("DMM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw dmm::ParseError("DMM_SEED", "not an unsigned integer");
    }
  }
  return std::nullopt;
}

// Opens --out or falls back to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw dmm::ParseError("--out", "cannot open '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct RunOptions {
  std::string network;
  std::size_t steps = 0;
  std::vector<std::string> trace;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::string out;
};

int cmd_run(const RunOptions& opt) {
  dmm::EngineState state;
  std::vector<dmm::NeuronAddress> trace;
  try {
    state = dmm::load_network_file(opt.network);
    if (auto seed = resolve_seed(opt.seed)) state.reseed(*seed);
    if (opt.epsilon) {
      if (!(*opt.epsilon > 0.0))
        throw dmm::ParseError("--epsilon", "must be positive");
      state.epsilon = *opt.epsilon;
    }
    for (const auto& t : opt.trace) trace.push_back(dmm::parse_address(t));
  } catch (const dmm::Error& e) {
    return report_error(e.kind(), e.what());
  }

  try {
    Output out(opt.out);
    std::size_t reported = 0;
    auto flush_warnings = [&](const dmm::EngineState& s) {
      for (; reported < s.warnings.size(); ++reported) {
        const auto& w = s.warnings[reported];
        std::cerr << dmm::json{{"warning", w.kind},
                               {"step", w.step},
                               {"message", w.message}}
                         .dump()
                  << "\n";
      }
    };
    for (std::size_t k = 0; k < opt.steps; ++k) {
      state = dmm::step(std::move(state));
      for (const auto& a : trace)
        out.stream() << dmm::trace_to_json(
                            {state.step_count, a, state.output(a)})
                            .dump()
                     << "\n";
      flush_warnings(state);
    }
    out.stream().flush();
  } catch (const dmm::ParseError& e) {
    return report_error(e.kind(), e.what());
  } catch (const dmm::Error& e) {
    return report_error(e.kind(), e.what(), kExitRuntime);
  } catch (const std::exception& e) {
    return report_error("runtime", e.what(), kExitRuntime);
  }
  return kExitOk;
}

int cmd_inspect(const std::string& path) {
  dmm::EngineState state;
  try {
    state = dmm::load_network_file(path);
  } catch (const dmm::Error& e) {
    return report_error(e.kind(), e.what());
  }
  const auto rows = dmm::row_groups(state.matrix);
  const auto active = dmm::active_neurons(state.matrix);
  std::cout << state.matrix.nonzero_count() << " nonzero weights, "
            << active.size() << " active neurons\n";
  std::cout << "rows:\n";
  for (const auto& key : rows) {
    const dmm::Token prefix[] = {key.type, key.name};
    const dmm::PTVector* node = &state.matrix.weights();
    for (const auto& t : prefix) node = node->find(t);
    std::cout << "  " << key.to_string() << ": " << dmm::term_count(*node)
              << " weights\n";
  }
  std::cout << "outputs:\n";
  for (const auto& [key, value] : state.outputs) {
    auto rank = dmm::max_rank(value);
    std::cout << "  " << key.to_string() << ": max_rank "
              << (rank ? std::to_string(*rank) : std::string("none")) << "\n";
  }
  if (state.self_address)
    std::cout << "self: " << state.self_address->to_string() << "\n";
  return kExitOk;
}

struct DemoOptions {
  std::string name;
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::size_t draws = 100000;
  bool show_steps = false;
  bool grid = false;
  std::vector<double> payload;
};

void print_grid(std::ostream& os, const dmm::RectMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << "   ";
    for (std::size_t c = 0; c < m.cols(); ++c) os << " " << m(r, c);
    os << "\n";
  }
}

int cmd_demo(const DemoOptions& opt) {
  dmm::DemoReport report;
  try {
    const std::uint64_t seed = resolve_seed(opt.seed).value_or(7);
    if (opt.name == "wave") {
      dmm::WaveOptions wave;
      if (!opt.payload.empty()) wave.payload = opt.payload;
      report = dmm::demo_wave(
          opt.steps.value_or(1000), wave, [&](const dmm::WaveStep& s) {
            if (opt.show_steps)
              std::cout << dmm::json{{"t", s.t}, {"position", s.position}}.dump()
                        << "\n";
            if (opt.grid) print_grid(std::cout, s.connectivity);
          });
    } else if (opt.name == "rnn") {
      report = dmm::demo_rnn(seed, opt.steps.value_or(100));
    } else if (opt.name == "self-accumulate") {
      report = dmm::demo_self_accumulate(opt.steps.value_or(10));
    } else if (opt.name == "sampling") {
      report = dmm::demo_sampling(opt.draws, seed);
    } else {
      return report_error("usage", "unknown demo '" + opt.name +
                                       "' (wave, rnn, self-accumulate, sampling)");
    }
  } catch (const dmm::Error& e) {
    return report_error(e.kind(), e.what());
  }
  std::cout << (report.pass ? "PASS " : "FAIL ") << opt.name << ": "
            << report.summary << "\n";
  return report.pass ? kExitOk : kExitVerdict;
}

struct ExportOptions {
  std::string name;
  std::optional<std::uint64_t> seed;
  std::size_t steps = 100;
  std::vector<double> payload;
  std::string out;
};

int cmd_export(const ExportOptions& opt) {
  try {
    dmm::EngineState state;
    const std::uint64_t seed = resolve_seed(opt.seed).value_or(7);
    if (opt.name == "wave") {
      dmm::WaveOptions wave;
      if (!opt.payload.empty()) wave.payload = opt.payload;
      state = dmm::build_wave_dmm(wave);
    } else if (opt.name == "rnn") {
      state = dmm::build_rnn(dmm::random_rnn_spec(4, 2, opt.steps, seed), seed);
    } else if (opt.name == "self-accumulate") {
      state = dmm::default_self_accumulator().state;
    } else if (opt.name == "malformed-self") {
      state = dmm::build_malformed_self();
    } else {
      return report_error("usage", "unknown network '" + opt.name +
                                       "' (wave, rnn, self-accumulate, "
                                       "malformed-self)");
    }
    Output out(opt.out);
    out.stream() << dmm::network_to_json(state).dump(2) << "\n";
  } catch (const dmm::Error& e) {
    return report_error(e.kind(), e.what());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataflow matrix machines over prefix-tree vectors"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a network file and trace outputs");
  run_cmd->add_option("network", run.network, "Network JSON file")->required();
  run_cmd->add_option("--steps", run.steps, "Number of steps")->default_val(0);
  run_cmd->add_option("--trace", run.trace, "Addresses type/neuron/port to trace")
      ->delimiter(',');
  run_cmd->add_option("--seed", run.seed, "RNG seed (falls back to DMM_SEED)");
  run_cmd->add_option("--epsilon", run.epsilon, "Pruning tolerance");
  run_cmd->add_option("--out", run.out, "Trace output path (default stdout)");

  std::string inspect_path;
  auto* inspect_cmd =
      app.add_subcommand("inspect", "Summarize a network file's matrix");
  inspect_cmd->add_option("network", inspect_path, "Network JSON file")
      ->required();

  DemoOptions demo;
  auto* demo_cmd = app.add_subcommand("demo", "Run a built-in scenario");
  demo_cmd->add_option("name", demo.name, "wave | rnn | self-accumulate | sampling")
      ->required();
  demo_cmd->add_option("--steps", demo.steps, "Number of steps");
  demo_cmd->add_option("--seed", demo.seed, "RNG seed (falls back to DMM_SEED)");
  demo_cmd->add_option("--draws", demo.draws, "Draws per case (sampling)");
  demo_cmd->add_flag("--show-steps", demo.show_steps,
                     "Print one line per step (wave)");
  demo_cmd->add_flag("--grid", demo.grid, "Print Y^1 as a dense grid (wave)");
  demo_cmd->add_option("--payload", demo.payload,
                       "Four payload values for row 3 (wave)")
      ->delimiter(',')
      ->expected(4);

  ExportOptions exp;
  auto* export_cmd =
      app.add_subcommand("export", "Write a built-in network as a JSON file");
  export_cmd
      ->add_option("name", exp.name,
                   "wave | rnn | self-accumulate | malformed-self")
      ->required();
  export_cmd->add_option("--seed", exp.seed, "RNG seed (rnn)");
  export_cmd->add_option("--steps", exp.steps, "Input stream length (rnn)");
  export_cmd->add_option("--payload", exp.payload, "Payload row (wave)")
      ->delimiter(',')
      ->expected(4);
  export_cmd->add_option("--out", exp.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error("usage", e.what());
  }

  if (*run_cmd) return cmd_run(run);
  if (*inspect_cmd) return cmd_inspect(inspect_path);
  if (*demo_cmd) return cmd_demo(demo);
  if (*export_cmd) return cmd_export(exp);
  return kExitInvalid;
}
