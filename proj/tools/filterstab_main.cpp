// Experiment driver CLI.
//
// Subcommands:
//   validate  - parse a config, validate the model, print the assumption report
//   bounds    - print the closed-form bound report for the configured model
//   estimate  - run the estimators for a single eps value, print one CSV row
//   sweep     - run the full eps grid, write sweep.csv / plotdata.dat / manifest.json
//   bsc       - the built-in binary-symmetric-channel preset sweep
//
// Exit codes: 0 success, 2 partial row failures, 1 config or fatal error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "filterstab/filterstab.hpp"

namespace {

using namespace filterstab;

void print_assumptions(const NoiseModel &noise) {
  const AssumptionReport rep = noise.validate_assumptions();
  std::printf("a1 bounded densities:      %s\n", rep.a1_bounded ? "yes" : "NO");
  std::printf("a2 common support:         %s\n", rep.a2_common_support ? "yes" : "NO");
  std::printf("a3 finite cross-entropies: %s\n", rep.a3_finite_cross_entropies ? "yes" : "NO");
  if (!rep.witnesses.empty()) {
    std::printf("violating state pairs:");
    for (const auto &[i, j] : rep.witnesses) std::printf(" (%zu,%zu)", i, j);
    std::printf("\n");
  }
  std::printf("admissible:                %s\n", rep.admissible() ? "yes" : "NO");
}

std::string fmt_opt(const std::optional<double> &v) {
  return v ? format_double(*v) : std::string("diverges (-inf)");
}

int cmd_validate(const ExperimentConfig &cfg, bool override_assumptions) {
  std::printf("config ok: d = %zu, %zu eps value(s), %zu replica(s), seed %llu\n",
              cfg.base_transitions().dim(), cfg.eps_grid().size(), cfg.estimator().replicas,
              static_cast<unsigned long long>(cfg.estimator().seed));
  const bool ergodic = is_ergodic(cfg.base_transitions());
  std::printf("base chain ergodic:        %s\n", ergodic ? "yes" : "NO");
  if (ergodic) {
    const SimplexVector mu = stationary_distribution(cfg.base_transitions());
    std::printf("stationary distribution:  ");
    for (std::size_t i = 0; i < mu.dim(); ++i) std::printf(" %s", format_double(mu[i]).c_str());
    std::printf("\n");
  }
  print_assumptions(cfg.noise());
  const bool ok = ergodic && (cfg.noise().validate_assumptions().admissible() || override_assumptions);
  return ok ? 0 : 1;
}

int cmd_bounds(const ExperimentConfig &cfg) {
  for (double eps : cfg.eps_grid()) {
    const HmmSpec spec = cfg.spec_at(eps);
    const BoundReport rep = bound_report(spec);
    std::printf("eps = %s\n", format_double(eps).c_str());
    std::printf("  theorem1_bound   %s\n", fmt_opt(rep.theorem1_bound).c_str());
    if (rep.d2_exact_limit)
      std::printf("  d2_exact_limit   %s\n", fmt_opt(rep.d2_exact_limit).c_str());
    std::printf("  lemma2_bound     %s\n", fmt_opt(rep.lemma2_bound).c_str());
    if (rep.lemma2_exact_d2)
      std::printf("  lemma2_exact_d2  %s\n", fmt_opt(rep.lemma2_exact_d2).c_str());
    std::printf("  lambda1_limit    %s\n", format_double(rep.lambda1_limit).c_str());
    if (rep.coarse_d2_bound)
      std::printf("  coarse_d2_bound  %s\n", fmt_opt(rep.coarse_d2_bound).c_str());
    if (const auto bsc = detect_bsc(cfg.base_transitions(), cfg.noise())) {
      const BscQuantities q = bsc_quantities(bsc->p);
      std::printf("  bsc D_p          %s\n", format_double(q.d_p).c_str());
      std::printf("  bsc h_p          %s\n", format_double(q.h_p).c_str());
      if (eps < 1.0) {
        std::printf("  ex_eq_lower      %s\n",
                    format_double(bsc_lower_bound_curve(bsc->p, bsc->lambda, eps)).c_str());
        std::printf("  kz_asymptotic    %s\n",
                    format_double(kz_asymptotic(bsc->p, bsc->lambda, eps)).c_str());
      }
    }
  }
  return 0;
}

int run_and_write(const ExperimentConfig &cfg, unsigned workers, const std::string &out_dir) {
  const SweepResult result = run_sweep(cfg, workers);
  write_outputs(cfg, result, out_dir);
  std::printf("wrote %s/sweep.csv (%zu row(s), %zu error(s))\n", out_dir.c_str(),
              result.rows.size(), result.errors.size());
  for (const auto &err : result.errors)
    std::fprintf(stderr, "row eps = %s failed: %s\n", format_double(err.eps).c_str(),
                 err.message.c_str());
  if (!result.errors.empty()) return result.rows.empty() ? 1 : 2;
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stability index estimation for filters of slowly switching Markov chains"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  bool override_assumptions = false;
  std::optional<double> eps_single;
  double preset_p = 0.2, preset_lambda = 0.5;
  std::optional<std::size_t> replicas, horizon;

  auto *validate = app.add_subcommand("validate", "validate a config and print the assumption report");
  validate->add_option("--config", config_path, "config file (JSON)")->required();
  validate->add_flag("--override-assumptions", override_assumptions,
                     "accept models violating a1/a2/a3");

  auto *bounds = app.add_subcommand("bounds", "print the closed-form bound report");
  bounds->add_option("--config", config_path, "config file (JSON)")->required();

  auto *estimate = app.add_subcommand("estimate", "run the estimators for a single eps");
  estimate->add_option("--config", config_path, "config file (JSON)")->required();
  estimate->add_option("--eps", eps_single, "eps value (default: first grid entry)");
  estimate->add_option("--seed", seed, "override the base seed");
  estimate->add_option("--workers", workers, "worker thread cap");
  estimate->add_flag("--override-assumptions", override_assumptions,
                     "accept models violating a1/a2/a3");

  auto *sweep = app.add_subcommand("sweep", "run the eps grid and write output files");
  sweep->add_option("--config", config_path, "config file (JSON)")->required();
  sweep->add_option("--out", out_dir, "output directory (default: config output.dir)");
  sweep->add_option("--seed", seed, "override the base seed");
  sweep->add_option("--workers", workers, "worker thread cap");
  sweep->add_flag("--override-assumptions", override_assumptions,
                  "accept models violating a1/a2/a3");

  auto *bsc = app.add_subcommand("bsc", "built-in BSC preset sweep");
  bsc->add_option("--out", out_dir, "output directory");
  bsc->add_option("--p", preset_p, "flip probability (default 0.2)");
  bsc->add_option("--lambda", preset_lambda, "jump probability (default 0.5)");
  bsc->add_option("--seed", seed, "base seed");
  bsc->add_option("--workers", workers, "worker thread cap");
  bsc->add_option("--replicas", replicas, "replicas per eps");
  bsc->add_option("--n", horizon, "per-replica horizon (default: auto)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bsc->parsed()) {
      ExperimentConfig cfg = bsc_preset_config(preset_p, preset_lambda);
      if (seed) cfg.set_seed(*seed);
      if (replicas) cfg.estimator().replicas = *replicas;
      if (horizon) cfg.estimator().n = *horizon;
      return run_and_write(cfg, workers, out_dir);
    }

    ExperimentConfig cfg = load_config(config_path);
    cfg.set_override_assumptions(override_assumptions);
    if (seed) cfg.set_seed(*seed);

    if (validate->parsed()) return cmd_validate(cfg, override_assumptions);
    if (bounds->parsed()) return cmd_bounds(cfg);
    if (estimate->parsed()) {
      const double eps = eps_single.value_or(cfg.eps_grid().front());
      ExperimentConfig single(cfg.states(), cfg.base_transitions(), cfg.noise(), {eps},
                              cfg.estimator(), cfg.run(), cfg.out_dir(),
                              cfg.override_assumptions());
      const SweepResult result = run_sweep(single, workers);
      if (result.rows.empty()) {
        for (const auto &err : result.errors)
          std::fprintf(stderr, "row eps = %s failed: %s\n", format_double(err.eps).c_str(),
                       err.message.c_str());
        return 1;
      }
      write_csv(result.rows, std::cout);
      return 0;
    }
    if (sweep->parsed()) {
      const std::string dir = sweep->count("--out") ? out_dir : cfg.out_dir();
      return run_and_write(cfg, workers, dir);
    }
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
