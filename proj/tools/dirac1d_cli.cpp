// dirac1d command line: runs simulations, causality checks and the
// tunnelling reproduction, writing density.csv and report.txt.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dirac1d/experiments.hpp"

namespace fs = std::filesystem;
using namespace dirac1d;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  std::size_t stride = 0;
  std::vector<std::string> checks;
  std::string sweep_param = "V0";
  std::vector<double> sweep_values;
};

ExperimentConfig fringe_defaults() {
  ExperimentConfig c;
  c.grid = {-150.0, 150.0, 6000};
  c.packet.kind = PacketKind::plane_superposition;
  c.packet.mass = 0.0;
  c.packet.k = 1.0;
  c.packet.p = 2.0;
  c.n_steps = 400;
  c.stride = 1;
  return c;
}

ExperimentConfig load(const Options& opt, ExperimentConfig fallback) {
  ExperimentConfig cfg = opt.config_path.empty() ? std::move(fallback) : load_config(opt.config_path);
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (opt.stride > 0) cfg.stride = opt.stride;
  for (const auto& name : opt.checks) {
    const bool listed = std::any_of(cfg.checks.begin(), cfg.checks.end(),
                                    [&](const CheckSpec& c) { return c.name == name; });
    if (!listed) cfg.checks.push_back({name, {}});
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

int finish(const ExperimentConfig& cfg, const ExperimentReport& rep) {
  fs::create_directories(cfg.out_dir);
  const std::string text = format_report(rep);
  write_file(fs::path(cfg.out_dir) / "report.txt", text);
  std::cout << text;
  return rep.all_pass() ? 0 : 1;
}

void write_csv(const ExperimentConfig& cfg, const History& h) {
  fs::create_directories(cfg.out_dir);
  std::ofstream os(fs::path(cfg.out_dir) / "density.csv");
  if (!os) throw std::runtime_error("cannot write density.csv in " + cfg.out_dir);
  write_density_csv(os, h, cfg.csv_z_stride);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exactly causal 1+1D Dirac tunnelling laboratory"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--stride", opt.stride, "Snapshot stride (overrides run.stride)");
    sub->add_option("--check", opt.checks, "Check to run (repeatable)");
  };
  auto* simulate = app.add_subcommand("simulate", "Evolve a config, write density.csv and report.txt");
  auto* verify = app.add_subcommand("verify", "Run the selected causality checks");
  auto* dumont = app.add_subcommand("dumont", "Gaussian tunnelling run: t_T, Q, tail vs tunnelled");
  auto* fringe = app.add_subcommand("fringe", "Superluminal interference fringe demo");
  auto* characteristics =
      app.add_subcommand("characteristics", "Characteristic determinant identity on random covectors");
  auto* sweep = app.add_subcommand("sweep", "Repeat the tunnelling run over parameter values");
  for (auto* s : {simulate, verify, dumont, fringe, characteristics, sweep}) add_common(s);
  sweep->add_option("--param", opt.sweep_param, "V0, L, mass or k0");
  sweep->add_option("--values", opt.sweep_values, "Values to sweep")->delimiter(',')->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const ExperimentConfig cfg = load(opt, ExperimentConfig{});
      std::optional<History> h;
      const ExperimentReport rep = run_experiment(cfg, &h);
      write_csv(cfg, *h);
      return finish(cfg, rep);
    }
    if (verify->parsed()) {
      const ExperimentConfig cfg = load(opt, ExperimentConfig{});
      if (cfg.checks.empty()) {
        std::cerr << "verify: no checks requested (use --check or the config 'checks' key)\n";
        return 2;
      }
      return finish(cfg, run_experiment(cfg));
    }
    if (dumont->parsed()) {
      const ExperimentConfig cfg = load(opt, ExperimentConfig{});
      std::optional<History> h;
      const ExperimentReport rep = run_dumont(cfg, &h);
      write_csv(cfg, *h);
      return finish(cfg, rep);
    }
    if (fringe->parsed()) {
      const ExperimentConfig cfg = load(opt, fringe_defaults());
      return finish(cfg, run_fringe(cfg));
    }
    if (characteristics->parsed()) {
      const ExperimentConfig cfg = load(opt, ExperimentConfig{});
      return finish(cfg, run_characteristics(cfg));
    }
    if (sweep->parsed()) {
      const ExperimentConfig cfg = load(opt, ExperimentConfig{});
      const auto reports = run_sweep(cfg, parse_sweep_parameter(opt.sweep_param), opt.sweep_values);
      fs::create_directories(cfg.out_dir);
      std::ostringstream summary;
      bool ok = true;
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const std::string text = format_report(reports[i]);
        write_file(fs::path(cfg.out_dir) / ("report_" + std::to_string(i) + ".txt"), text);
        summary << "run " << i << ' ' << opt.sweep_param << '=' << opt.sweep_values[i] << ' '
                << (reports[i].all_pass() ? "PASS" : "FAIL");
        if (!reports[i].error.empty()) summary << " error: " << reports[i].error;
        summary << '\n';
        ok = ok && reports[i].all_pass();
      }
      write_file(fs::path(cfg.out_dir) / "report.txt", summary.str());
      std::cout << summary.str();
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
