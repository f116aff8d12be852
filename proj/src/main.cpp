#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quasispec/io.hpp"

namespace {

int env_threads() {
  const char* env = std::getenv("QUASISPEC_THREADS");
  if (!env) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace quasispec;

  CLI::App app{"rank-one perturbation laboratory for quasinilpotent operator truncations"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string alpha_text;
  std::vector<double> annulus_pair;
  std::string format = "json";
  std::string out_path;
  std::string dims_text;
  int top = 3;
  int basis_tail = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--alpha", alpha_text,
                    "override the scenario's alpha grid with one value (RE or RE+IMi)");
    sub->add_option("--annulus", annulus_pair, "override the search annulus: RMIN RMAX")
        ->expected(2);
    sub->add_option("--format", format, "output format (default json)")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "write the report to this file instead of stdout");
  };

  add_common(app.add_subcommand("classify", "moment sequence and singularity classification"));
  add_common(app.add_subcommand("roots", "all solutions of g(z) = 1/alpha in the annulus"));
  add_common(app.add_subcommand("sweep", "root counts across the alpha grid"));
  add_common(app.add_subcommand("validate", "roots cross-checked against the dense eigenvalue oracle"));
  CLI::App* certify = app.add_subcommand("certify", "invariant-subspace certificates");
  add_common(certify);
  auto* top_opt = certify->add_option("--top", top, "certify the span of the K largest roots (default 3)");
  auto* tail_opt = certify->add_option("--basis-tail", basis_tail,
                                       "certify the explicit basis e_J..e_N instead of eigenvectors");
  top_opt->excludes(tail_opt);
  tail_opt->excludes(top_opt);
  CLI::App* trend = app.add_subcommand("trend", "spectral radius of truncations at growing dimension");
  add_common(trend);
  trend->add_option("--dims", dims_text, "comma-separated truncation dimensions (default 25,50,100,200)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const Scenario sc = load_scenario_file(scenario_path);
    CommandOptions opts;
    opts.threads = env_threads();
    opts.format = format;
    opts.top = top;
    if (!alpha_text.empty()) opts.alpha_override = parse_alpha(alpha_text);
    if (!annulus_pair.empty()) {
      if (!(0 < annulus_pair[0] && annulus_pair[0] < annulus_pair[1]))
        throw ValidationError("--annulus: requires 0 < RMIN < RMAX");
      opts.annulus_override = Annulus(annulus_pair[0], annulus_pair[1]);
    }
    if (tail_opt->count() > 0) opts.basis_tail = basis_tail;
    if (!dims_text.empty()) opts.dims = parse_dims(dims_text);

    const std::string cmd = app.get_subcommands().front()->get_name();
    const CommandResult res = run_command(cmd, sc, opts);

    if (!out_path.empty()) {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ValidationError("--out: cannot open " + out_path + " for writing");
      f << res.text;
      if (!f) throw ValidationError("--out: write to " + out_path + " failed");
    } else {
      std::cout << res.text;
    }
    return res.exit_code;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
