#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dmoc/cli/config.hpp"
#include "dmoc/cli/runs.hpp"
#include "dmoc/errors.hpp"

using namespace dmoc;

namespace {

void summarize(const cli::Json& report, const std::string& format) {
  if (format == "json") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  const std::string cmd = report.value("command", "");
  if (report.contains("result")) {
    const auto& r = report["result"];
    std::cout << "status " << r["status"].get<std::string>() << "  objective " << r["objective"].dump()
              << "  iterations " << r["major_iterations"].dump() << "  minor " << r["minor_iterations"].dump()
              << "  work " << r["work_units"].dump() << "\n";
  }
  if (cmd == "converge") {
    if (report.contains("error")) {
      std::cout << "failed: " << report["error"].get<std::string>() << "\n";
      return;
    }
    for (const auto& g : report["grids"]) {
      std::cout << "N " << g["N"].dump() << "  q_error " << g["q_error"].dump() << "  u_error " << g["u_error"].dump()
                << "\n";
    }
    std::cout << "slope q " << report["slopes"]["q"].dump() << "  slope u " << report["slopes"]["u"].dump() << "\n";
  }
  if (report.contains("noether") && !report["noether"].is_null()) {
    std::cout << "noether total " << report["noether"]["total"].dump() << "  scale "
              << report["noether"]["scale"].dump() << "\n";
  }
  if (report.contains("energy")) {
    std::cout << "energy max deviation " << report["energy"]["max_deviation"].dump() << "  drift slope "
              << report["energy"]["drift_slope"].dump() << "\n";
    std::cout << "momentum max deviation " << report["momentum"]["max_deviation"].dump() << "\n";
  }
  if (cmd == "compare" && !report["gaps"].is_null()) {
    std::cout << "gaps configuration " << report["gaps"]["configuration"].dump() << "  objective "
              << report["gaps"]["objective"].dump() << "\n";
    std::cout << "ratios variables " << report["ratios"]["variables"].dump() << "  work "
              << report["ratios"]["work_units"].dump() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete mechanics optimal control: transcription, solves and audits"};
  app.require_subcommand(1);
  std::string format = "text";
  bool quiet = false;
  app.add_option("--format", format, "stdout summary format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("-q,--quiet", quiet, "print nothing on success");

  std::string config_path, out_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
  };
  CLI::App* solve = app.add_subcommand("solve", "solve one transcription");
  CLI::App* converge = app.add_subcommand("converge", "self-convergence study against the finest grid");
  CLI::App* audit = app.add_subcommand("audit", "momentum balance or unforced rollout audit");
  CLI::App* compare = app.add_subcommand("compare", "solve two configurations and compare");
  add_common(solve);
  add_common(converge);
  add_common(audit);
  std::string config_b;
  compare->add_option("config", config_path, "first JSON configuration")->required()->check(CLI::ExistingFile);
  compare->add_option("config_b", config_b, "second JSON configuration")->required()->check(CLI::ExistingFile);
  compare->add_option("-o,--out", out_dir, "output directory (overrides the first config's output_dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::exit_config_error;
  }

  try {
    cli::RunConfig cfg = cli::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cli::RunOutput out;
    if (*solve) {
      out = cli::run_solve(cfg);
    } else if (*converge) {
      out = cli::run_converge(cfg);
    } else if (*audit) {
      out = cli::run_audit(cfg);
    } else {
      cli::RunConfig b = cli::load_config(config_b);
      out = cli::run_compare(cfg, b);
    }
    if (!quiet || out.exit_code != cli::exit_ok) summarize(out.report, format);
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return cli::exit_solver_failure;
  }
}
