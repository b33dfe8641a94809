#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bdris/config_io.hpp"
#include "bdris/verification.hpp"

namespace {

unsigned threads_from_env() {
  const char* raw = std::getenv("BDRIS_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;  // auto
  try {
    const long v = std::stol(raw);
    return v <= 0 ? 0 : static_cast<unsigned>(v);
  } catch (const std::exception&) {
    return 0;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bdris::io::ConfigError("cannot read config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool config_required) {
  auto* config = cmd->add_option("--config", opt.config_path, "scenario JSON file");
  if (config_required) config->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--set", opt.overrides,
                  "dotted-path override, e.g. powers.p_max_dbm=25");
  cmd->add_flag("--verbose", opt.verbose, "per-step log lines");
}

// --seed/--trials/--method are conveniences for the matching config keys.
void add_scenario_shortcuts(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&opt](std::uint64_t v) {
        opt.overrides.push_back("base_seed=" + std::to_string(v));
      },
      "base RNG seed");
  cmd->add_option_function<std::int64_t>(
      "--trials", [&opt](std::int64_t v) {
        opt.overrides.push_back("trials=" + std::to_string(v));
      },
      "Monte Carlo trials");
  cmd->add_option_function<std::string>(
      "--method", [&opt](const std::string& v) {
        opt.overrides.push_back("method=" + std::string("\"") + v + "\"");
      },
      "optimized|random|diagonal");
}

bdris::io::LoadedScenario load(const CommonOptions& opt) {
  const std::string text = opt.config_path.empty() ? "" : read_file(opt.config_path);
  return bdris::io::load_config(text, opt.overrides);
}

int run_solve(const CommonOptions& opt) {
  const auto loaded = load(opt);
  const auto trial = bdris::run_trial(loaded.scenario, 0);

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);
  write_file(dir / "trace.csv", bdris::io::trace_to_csv(trial.trace));
  write_file(dir / "summary.json",
             bdris::io::trial_summary_json(trial, loaded.scenario, 0));

  if (opt.verbose) {
    for (std::size_t i = 0; i < trial.trace.outer.size(); ++i) {
      const auto& it = trial.trace.outer[i];
      std::cout << "iter " << i + 1 << ": secrecy " << it.secrecy_rate
                << " bits/s/Hz, p_s " << it.p_s << " mW, slack "
                << it.interference_slack << " mW\n";
    }
  }
  std::cout << "secrecy_rate " << bdris::io::format_double(trial.metrics.secrecy_rate)
            << " bits/s/Hz (" << to_string(trial.status) << ", "
            << trial.trace.outer.size() << " outer iterations)\n"
            << "artifacts: " << (dir / "trace.csv").string() << ", "
            << (dir / "summary.json").string() << "\n";
  return 0;
}

int run_sweep_cmd(const CommonOptions& opt) {
  const auto loaded = load(opt);
  if (!loaded.sweep)
    throw bdris::io::ConfigError("sweep requires a \"sweep\" section in the config");
  const auto& spec = *loaded.sweep;

  const auto result = bdris::run_sweep(loaded.scenario, spec.axis, spec.points,
                                       spec.methods, threads_from_env());

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);
  write_file(dir / "sweep.csv", bdris::io::sweep_to_csv(result));
  write_file(dir / "sweep.json", bdris::io::sweep_to_json(result, loaded.scenario));

  if (opt.verbose) std::cout << bdris::io::sweep_to_csv(result);
  std::cout << "swept " << to_string(spec.axis) << " over " << spec.points.size()
            << " points x " << spec.methods.size() << " methods, "
            << result.trials << " trials each\n"
            << "artifacts: " << (dir / "sweep.csv").string() << ", "
            << (dir / "sweep.json").string() << "\n";
  return 0;
}

int run_verify(bool quick) {
  bdris::VerifyOptions opt;
  if (quick) {
    opt.grad_instances_m4 = 20;
    opt.grad_instances_m16 = 5;
    opt.unitarity_steps = 1000;
    opt.power_instances = 100;
    opt.ao_instances = 20;
  }
  bool all_passed = true;
  for (const auto& report : bdris::run_verification_suite(opt)) {
    std::cout << (report.passed ? "[PASS] " : "[FAIL] ") << report.name << ": "
              << report.detail << "\n";
    all_passed = all_passed && report.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BD-RIS secrecy-rate simulator"};
  app.require_subcommand(1);

  CommonOptions solve_opt;
  auto* solve_cmd = app.add_subcommand("solve", "run one seeded trial");
  add_common(solve_cmd, solve_opt, true);
  add_scenario_shortcuts(solve_cmd, solve_opt);

  CommonOptions sweep_opt;
  auto* sweep_cmd = app.add_subcommand("sweep", "run the configured sweep");
  add_common(sweep_cmd, sweep_opt, true);
  add_scenario_shortcuts(sweep_cmd, sweep_opt);

  bool verify_quick = false;
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle suites");
  verify_cmd->add_flag("--quick", verify_quick, "reduced instance counts");

  auto* defaults_cmd = app.add_subcommand("defaults", "print the default config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(solve_opt);
    if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_opt);
    if (verify_cmd->parsed()) return run_verify(verify_quick);
    if (defaults_cmd->parsed()) {
      std::cout << bdris::io::config_to_json(bdris::default_scenario<double>());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
