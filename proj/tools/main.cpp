#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "config.hpp"

using namespace tdsr;
using namespace tdsr::cli;

int main(int argc, char** argv) {
  CLI::App app{"robustness certificates for linear time-delay systems under "
               "sector-bounded perturbations"};
  app.require_subcommand(1);

  CliOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "problem configuration (JSON)")->required();
    sub->add_option("--out", opt.out_dir, "output directory (default: .)");
    sub->add_option("--seed", opt.seed, "RNG seed (default: 0)");
    sub->add_option("--format", opt.format, "stdout rendering: text | json")
        ->check(CLI::IsMember({"text", "json"}));
    return sub;
  };

  auto* bounds =
      add_common(app.add_subcommand("bounds", "closed-form admissible-perturbation bound"));
  bounds->add_flag("--complete-type", opt.complete_type_flag,
                   "also report the time-domain norm bound");
  auto* certify = add_common(
      app.add_subcommand("certify", "frequency-domain existence certificate for the functional"));
  auto* construct = add_common(
      app.add_subcommand("construct", "build and store the certified functional"));
  auto* verify = add_common(
      app.add_subcommand("verify", "replay a stored functional against simulations"));
  verify->add_option("--functional", opt.functional_override, "stored functional (JSON)");
  auto* ellipse = add_common(
      app.add_subcommand("ellipse", "admissible uncertainty-norm region over channel scalings"));
  auto* complete_type = add_common(
      app.add_subcommand("complete-type", "time-domain norm bound from the delay Lyapunov matrix"));
  auto* spectrum = add_common(app.add_subcommand("spectrum", "rightmost characteristic roots"));
  auto* simulate = add_common(app.add_subcommand("simulate", "integrate the perturbed system"));
  simulate->add_option("--functional", opt.functional_override,
                       "stored functional (JSON) for the V column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    ProblemConfig cfg = load_config(opt.config_path);
    if (bounds->parsed()) return cmd_bounds(cfg, opt);
    if (certify->parsed()) return cmd_certify(cfg, opt);
    if (construct->parsed()) return cmd_construct(cfg, opt);
    if (verify->parsed()) return cmd_verify(cfg, opt);
    if (ellipse->parsed()) return cmd_ellipse(cfg, opt);
    if (complete_type->parsed()) return cmd_complete_type(cfg, opt);
    if (spectrum->parsed()) return cmd_spectrum(cfg, opt);
    if (simulate->parsed()) return cmd_simulate(cfg, opt);
    std::cerr << "error: no subcommand selected\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::AreNoStabilizingSolution:
      case ErrorCode::BlowUp:
        return kExitDenied;
      case ErrorCode::UnstableNominal:
        return kExitAssumption;
      default:
        return kExitInput;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
