#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "parfem/app.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;  // key -> raw value, CLI wins
};

void add_config_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "config file with key=value lines");
  static const char* keys[] = {"dimension",    "n_coarse", "ranks",     "levels",
                               "pre_smooth",   "post_smooth", "local_sweeps", "dt",
                               "end_time",     "outer_tol", "smoother",  "damping",
                               "strategy",     "family",    "outer_max_cycles"};
  for (const char* key : keys) {
    const std::string name = std::string("--") + key;
    cmd->add_option_function<std::string>(
        name, [&args, key](const std::string& v) { args.overrides[key] = v; },
        std::string("overrides config key ") + key);
  }
}

parfem::AppConfig build_config(const CommonArgs& args) {
  parfem::AppConfig cfg;
  if (!args.config_path.empty()) cfg = parfem::load_config_file(args.config_path);
  for (const auto& [key, value] : args.overrides) parfem::apply_config_entry(cfg, key, value);
  cfg.validate();
  return cfg;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string solve_csv(const parfem::SolveReport& rep, const parfem::AppConfig& cfg, bool timed) {
  std::string out = "metric,value\n";
  out += "global_dofs," + std::to_string(rep.n_global_dofs) + "\n";
  out += "time_steps," + std::to_string(cfg.time_steps()) + "\n";
  out += "l2_error," + fmt(rep.l2_error) + "\n";
  out += "linf_error," + fmt(rep.linf_error) + "\n";
  if (timed) {
    // Append the metrics rows minus their own header line.
    const std::string m = parfem::metrics_to_csv(rep.metrics);
    out += m.substr(m.find('\n') + 1);
  }
  return out;
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
  } else {
    parfem::write_text_file(output_path, text);
    std::cout << "wrote " << output_path << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed finite element multigrid driver"};
  app.require_subcommand(1);

  CommonArgs solve_args, classify_args, bench_args, export_args;
  std::string solve_out, classify_out, bench_out, bench_ref;
  std::string export_prefix = "system";

  CLI::App* solve = app.add_subcommand("solve", "heat equation, Crank-Nicolson time stepping");
  add_config_flags(solve, solve_args);
  solve->add_option("--output", solve_out, "write the report CSV here instead of stdout");

  CLI::App* classify = app.add_subcommand("classify", "per-level, per-rank dof class counts");
  add_config_flags(classify, classify_args);
  classify->add_option("--output", classify_out, "write the CSV here instead of stdout");

  CLI::App* bench = app.add_subcommand("bench", "solve and compare against a reference run");
  add_config_flags(bench, bench_args);
  bench->add_option("--reference", bench_ref, "metrics CSV of the reference run")->required();
  bench->add_option("--output", bench_out, "write the metrics CSV here instead of stdout");

  CLI::App* exp = app.add_subcommand("export", "write the assembled system as MatrixMarket files");
  add_config_flags(exp, export_args);
  exp->add_option("--output", export_prefix, "path prefix for <prefix>.mtx and <prefix>_rhs.mtx");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const parfem::AppConfig cfg = build_config(solve_args);
      const parfem::SolveReport rep = parfem::run_heat(cfg);
      emit(solve_csv(rep, cfg, true), solve_out);
    } else if (classify->parsed()) {
      const parfem::AppConfig cfg = build_config(classify_args);
      emit(parfem::run_classify(cfg).csv, classify_out);
    } else if (bench->parsed()) {
      const parfem::AppConfig cfg = build_config(bench_args);
      const parfem::SolveReport rep = parfem::run_bench(cfg, bench_ref);
      emit(parfem::metrics_to_csv(rep.metrics), bench_out);
    } else if (exp->parsed()) {
      const parfem::AppConfig cfg = build_config(export_args);
      parfem::export_system(cfg, export_prefix);
      std::cout << "wrote " << export_prefix << ".mtx and " << export_prefix << "_rhs.mtx\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
