#pragma once

// Reproducible experiment driver behind the CLI: JSON config parsing,
// estimator sweeps over an eps grid with replica aggregation, analytic bounds
// attached per row, and byte-stable CSV / plot-data / manifest outputs.
//
// Determinism contract: all replica seeds are derived up front from the base
// seed and (row, replica) indices, so results are independent of worker count
// and scheduling; data files carry no timestamps (the manifest does).

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "filterstab/bounds.hpp"
#include "filterstab/estimators.hpp"
#include "filterstab/model.hpp"

namespace filterstab {

inline constexpr const char *kVersion = "0.1.0";

// Shortest 17-significant-digit representation; round-trips exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct EstimatorSettings {
  std::size_t n = 0;       // 0: auto rule max(1e6, 100/eps)
  std::size_t burn_in = 0; // 0: auto rule max(1e4, 10/eps)
  std::size_t batches = 40;
  std::size_t replicas = 3;
  std::uint64_t seed = 1;
  std::optional<SimplexVector> nu;
  std::optional<SimplexVector> nu_bar;
};

struct RunSelection {
  bool gamma = true;
  bool lambda1 = true;
  bool wedge = true;
  bool entropy = true; // discrete noise only
  bool misclassification = true; // d = 2 only
  bool bounds = true;
};

class ExperimentConfig {
public:
  ExperimentConfig(std::vector<double> states, TransitionMatrix base, NoiseModel noise,
                   std::vector<double> eps_grid, EstimatorSettings est, RunSelection run,
                   std::string out_dir, bool override_assumptions)
      : states_(std::move(states)),
        base_(std::move(base)),
        noise_(std::move(noise)),
        eps_grid_(std::move(eps_grid)),
        est_(std::move(est)),
        run_(run),
        out_dir_(std::move(out_dir)),
        override_assumptions_(override_assumptions) {
    if (eps_grid_.empty()) throw ConfigError("eps_grid must not be empty");
    const double cap = max_eps(base_);
    for (double e : eps_grid_)
      if (!(e > 0.0) || e > cap)
        throw ConfigError("eps " + format_double(e) + " outside the valid range (0, " +
                          format_double(cap) + "]");
    if (est_.replicas < 1) throw ConfigError("replicas must be >= 1");
  }

  const std::vector<double> &states() const { return states_; }
  const TransitionMatrix &base_transitions() const { return base_; }
  const NoiseModel &noise() const { return noise_; }
  const std::vector<double> &eps_grid() const { return eps_grid_; }
  const EstimatorSettings &estimator() const { return est_; }
  EstimatorSettings &estimator() { return est_; }
  const RunSelection &run() const { return run_; }
  RunSelection &run() { return run_; }
  const std::string &out_dir() const { return out_dir_; }
  bool override_assumptions() const { return override_assumptions_; }
  void set_override_assumptions(bool v) { override_assumptions_ = v; }
  void set_seed(std::uint64_t s) { est_.seed = s; }

  HmmSpec spec_at(double eps) const { return HmmSpec(states_, base_, noise_, eps); }

private:
  std::vector<double> states_;
  TransitionMatrix base_;
  NoiseModel noise_;
  std::vector<double> eps_grid_;
  EstimatorSettings est_;
  RunSelection run_;
  std::string out_dir_;
  bool override_assumptions_ = false;
};

struct SweepRow {
  double eps = 0.0;
  std::optional<double> gamma_hat, gamma_stderr;
  std::optional<double> lambda1_hat;
  std::optional<double> wedge_rate_hat;
  std::optional<double> entropy_rate_hat;
  std::optional<double> theorem1_bound;
  std::optional<double> d2_exact_limit;
  std::optional<double> lemma2_exact_d2;
  std::optional<double> coarse_d2_bound;
  std::optional<double> ex_eq_lower;
  std::optional<double> misclassification_hat;
  std::size_t n = 0; // per-replica horizon
  std::uint64_t seed = 0;
  // stderr companions not in the CSV schema but used by checks
  std::optional<double> lambda1_stderr, wedge_stderr, entropy_stderr, misclassification_stderr;
};

struct RowError {
  double eps = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;      // successful rows, grid order
  std::vector<RowError> errors;    // failed rows, grid order
  nlohmann::json manifest;
};

struct BscParams {
  double p;
  double lambda;
};

// Recognizes the binary symmetric channel preset: symmetric 2-state chain
// observed through a symmetric binary flip channel with p in (0, 1/2).
inline std::optional<BscParams> detect_bsc(const TransitionMatrix &base, const NoiseModel &noise) {
  if (base.dim() != 2) return std::nullopt;
  const double l01 = base(0, 1), l10 = base(1, 0);
  if (std::abs(l01 - l10) > 1e-12) return std::nullopt;
  const auto *d = std::get_if<DiscreteEmission>(&noise.variant());
  if (!d || d->alphabet.size() != 2) return std::nullopt;
  const double p = d->emission(0, 1);
  if (std::abs(d->emission(1, 0) - p) > 1e-12 || std::abs(d->emission(0, 0) - (1.0 - p)) > 1e-12 ||
      std::abs(d->emission(1, 1) - (1.0 - p)) > 1e-12)
    return std::nullopt;
  if (!(p > 0.0 && p < 0.5)) return std::nullopt;
  return BscParams{p, l01};
}

namespace detail {

// Inverse-variance weighting across replicas. Replicas with zero standard
// error are exact; when present they carry all the weight.
inline RateEstimate aggregate_replicas(const std::vector<RateEstimate> &reps) {
  if (reps.empty()) throw Error("aggregate: no replicas");
  if (reps.size() == 1) return reps.front();
  std::vector<const RateEstimate *> exact;
  for (const auto &r : reps)
    if (r.std_error == 0.0) exact.push_back(&r);
  RateEstimate out = reps.front();
  if (!exact.empty()) {
    double sum = 0.0;
    for (const auto *r : exact) sum += r->value;
    out.value = sum / static_cast<double>(exact.size());
    out.std_error = 0.0;
    return out;
  }
  double wsum = 0.0, vsum = 0.0;
  for (const auto &r : reps) {
    const double w = 1.0 / (r.std_error * r.std_error);
    wsum += w;
    vsum += w * r.value;
  }
  out.value = vsum / wsum;
  out.std_error = std::sqrt(1.0 / wsum);
  return out;
}

inline EstimatorConfig replica_config(const ExperimentConfig &cfg, const HmmSpec &spec,
                                      std::uint64_t replica_seed) {
  EstimatorConfig ec = EstimatorConfig::auto_for(spec, replica_seed, cfg.estimator().batches);
  if (cfg.estimator().n > 0) ec.n = cfg.estimator().n;
  if (cfg.estimator().burn_in > 0) ec.burn_in = cfg.estimator().burn_in;
  if (ec.n <= ec.burn_in) ec.n = ec.burn_in + ec.batches;
  const std::size_t rem = (ec.n - ec.burn_in) % ec.batches;
  if (rem != 0) ec.n += ec.batches - rem;
  ec.nu = cfg.estimator().nu;
  ec.nu_bar = cfg.estimator().nu_bar;
  return ec;
}

} // namespace detail

// Runs the estimators for a single eps value; replica seeds are derived from
// row_seed. Throws on estimator errors (callers record them per row).
inline SweepRow run_row(const ExperimentConfig &cfg, double eps, std::uint64_t row_seed) {
  const HmmSpec spec = cfg.spec_at(eps);
  SweepRow row;
  row.eps = eps;
  row.seed = row_seed;

  std::vector<RateEstimate> gammas, lambda1s, wedges, entropies, misclass;
  for (std::size_t r = 0; r < cfg.estimator().replicas; ++r) {
    const std::uint64_t rep_seed = derive_seed(row_seed, r, StreamPurpose::replica);
    if (cfg.run().gamma) {
      EstimatorConfig ec =
          detail::replica_config(cfg, spec, derive_seed(rep_seed, 0, StreamPurpose::gamma));
      gammas.push_back(estimate_gamma(spec, ec));
      row.n = ec.n;
    }
    if (cfg.run().lambda1 || (cfg.run().entropy && spec.noise().is_discrete())) {
      EstimatorConfig ec =
          detail::replica_config(cfg, spec, derive_seed(rep_seed, 0, StreamPurpose::lambda1));
      const RateEstimate l1 = estimate_lambda1(spec, ec);
      lambda1s.push_back(l1);
      if (cfg.run().entropy && spec.noise().is_discrete()) {
        RateEstimate h = l1;
        h.value = -h.value;
        h.method = "entropy-rate";
        entropies.push_back(h);
      }
      if (row.n == 0) row.n = ec.n;
    }
    if (cfg.run().wedge) {
      EstimatorConfig ec =
          detail::replica_config(cfg, spec, derive_seed(rep_seed, 0, StreamPurpose::wedge));
      wedges.push_back(estimate_wedge_rate(spec, ec));
      if (row.n == 0) row.n = ec.n;
    }
    if (cfg.run().misclassification && spec.dim() == 2) {
      EstimatorConfig ec = detail::replica_config(
          cfg, spec, derive_seed(rep_seed, 0, StreamPurpose::misclassification));
      misclass.push_back(estimate_misclassification(spec, ec).posterior_min);
      if (row.n == 0) row.n = ec.n;
    }
  }

  if (!gammas.empty()) {
    const RateEstimate g = detail::aggregate_replicas(gammas);
    row.gamma_hat = g.value;
    row.gamma_stderr = g.std_error;
  }
  if (!lambda1s.empty() && cfg.run().lambda1) {
    const RateEstimate l = detail::aggregate_replicas(lambda1s);
    row.lambda1_hat = l.value;
    row.lambda1_stderr = l.std_error;
  }
  if (!entropies.empty()) {
    const RateEstimate h = detail::aggregate_replicas(entropies);
    row.entropy_rate_hat = h.value;
    row.entropy_stderr = h.std_error;
  }
  if (!wedges.empty()) {
    const RateEstimate w = detail::aggregate_replicas(wedges);
    row.wedge_rate_hat = w.value;
    row.wedge_stderr = w.std_error;
  }
  if (!misclass.empty()) {
    const RateEstimate m = detail::aggregate_replicas(misclass);
    row.misclassification_hat = m.value;
    row.misclassification_stderr = m.std_error;
  }

  if (cfg.run().bounds) {
    const BoundReport rep = bound_report(spec);
    row.theorem1_bound = rep.theorem1_bound;
    row.d2_exact_limit = rep.d2_exact_limit;
    row.lemma2_exact_d2 = rep.lemma2_exact_d2;
    row.coarse_d2_bound = rep.coarse_d2_bound;
    if (const auto bsc = detect_bsc(cfg.base_transitions(), cfg.noise()); bsc && eps < 1.0)
      row.ex_eq_lower = bsc_lower_bound_curve(bsc->p, bsc->lambda, eps);
  }
  return row;
}

inline SweepResult run_sweep(const ExperimentConfig &cfg, unsigned workers = 0) {
  const AssumptionReport assumptions = cfg.noise().validate_assumptions();
  if (!assumptions.admissible() && !cfg.override_assumptions())
    throw Error("noise model violates assumptions (a1/a2/a3); rerun with the override flag to "
                "continue anyway");

  const std::size_t rows = cfg.eps_grid().size();
  std::vector<std::optional<SweepRow>> done(rows);
  std::vector<std::optional<RowError>> failed(rows);
  std::vector<std::uint64_t> row_seeds(rows);
  for (std::size_t i = 0; i < rows; ++i)
    row_seeds[i] = derive_seed(cfg.estimator().seed, i, StreamPurpose::row);

  if (workers == 0)
    workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                              static_cast<unsigned>(rows)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows) return;
      try {
        done[i] = run_row(cfg, cfg.eps_grid()[i], row_seeds[i]);
      } catch (const std::exception &e) {
        failed[i] = RowError{cfg.eps_grid()[i], e.what()};
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto &t : pool) t.join();
  }

  SweepResult result;
  nlohmann::json manifest_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < rows; ++i) {
    nlohmann::json mr;
    mr["eps"] = cfg.eps_grid()[i];
    mr["seed"] = row_seeds[i];
    nlohmann::json reps = nlohmann::json::array();
    for (std::size_t r = 0; r < cfg.estimator().replicas; ++r)
      reps.push_back(derive_seed(row_seeds[i], r, StreamPurpose::replica));
    mr["replica_seeds"] = reps;
    if (done[i]) {
      mr["status"] = "ok";
      result.rows.push_back(*done[i]);
    } else {
      mr["status"] = "error";
      mr["error"] = failed[i]->message;
      result.errors.push_back(*failed[i]);
    }
    manifest_rows.push_back(mr);
  }
  result.manifest["version"] = kVersion;
  result.manifest["rows"] = manifest_rows;
  return result;
}

inline const std::vector<std::string> &sweep_csv_columns() {
  static const std::vector<std::string> cols = {
      "eps",           "gamma_hat",      "gamma_stderr",    "lambda1_hat",
      "wedge_rate_hat", "entropy_rate_hat", "theorem1_bound", "d2_exact_limit",
      "lemma2_exact_d2", "coarse_d2_bound", "ex_eq_lower",    "misclassification_hat",
      "n",             "seed"};
  return cols;
}

namespace detail {

inline std::vector<std::pair<std::string, std::optional<double>>> numeric_series(
    const SweepRow &r) {
  return {{"gamma_hat", r.gamma_hat},
          {"gamma_stderr", r.gamma_stderr},
          {"lambda1_hat", r.lambda1_hat},
          {"wedge_rate_hat", r.wedge_rate_hat},
          {"entropy_rate_hat", r.entropy_rate_hat},
          {"theorem1_bound", r.theorem1_bound},
          {"d2_exact_limit", r.d2_exact_limit},
          {"lemma2_exact_d2", r.lemma2_exact_d2},
          {"coarse_d2_bound", r.coarse_d2_bound},
          {"ex_eq_lower", r.ex_eq_lower},
          {"misclassification_hat", r.misclassification_hat}};
}

} // namespace detail

inline void write_csv(const std::vector<SweepRow> &rows, std::ostream &os) {
  const auto &cols = sweep_csv_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const auto &r : rows) {
    os << format_double(r.eps);
    for (const auto &[name, value] : detail::numeric_series(r))
      os << ',' << (value ? format_double(*value) : "");
    os << ',' << r.n << ',' << r.seed << '\n';
  }
}

// Plain-text plot data: one block per series with columns
// eps, log10(eps), value. Series absent from every row are omitted.
inline void write_plotdata(const std::vector<SweepRow> &rows, std::ostream &os) {
  if (rows.empty()) throw Error("plotdata: no rows");
  const auto first = detail::numeric_series(rows.front());
  for (std::size_t s = 0; s < first.size(); ++s) {
    bool any = false;
    for (const auto &r : rows)
      if (detail::numeric_series(r)[s].second) any = true;
    if (!any) continue;
    if (os.tellp() > 0) os << '\n';
    os << "# series: " << first[s].first << '\n';
    os << "# columns: eps log10_eps value\n";
    for (const auto &r : rows) {
      const auto v = detail::numeric_series(r)[s].second;
      if (!v) continue;
      os << format_double(r.eps) << ' ' << format_double(std::log10(r.eps)) << ' '
         << format_double(*v) << '\n';
    }
  }
}

// Parses a plotdata document back into (series -> vector of (eps, value)).
inline std::map<std::string, std::vector<std::pair<double, double>>> parse_plotdata(
    std::istream &is) {
  std::map<std::string, std::vector<std::pair<double, double>>> out;
  std::string line, series;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# series: ", 0) == 0) {
      series = line.substr(10);
      continue;
    }
    if (line[0] == '#') continue;
    std::istringstream row(line);
    double eps, log_eps, value;
    if (row >> eps >> log_eps >> value) out[series].emplace_back(eps, value);
  }
  return out;
}

namespace detail {

inline Matrix parse_matrix(const nlohmann::json &j, const std::string &field) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError(field + ": expected an array of rows");
  Matrix m(j.size(), j[0].size(), 0.0);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != m.cols())
      throw ConfigError(field + ": row " + std::to_string(i) + " has the wrong length");
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

inline std::vector<double> parse_vector(const nlohmann::json &j, const std::string &field) {
  if (!j.is_array()) throw ConfigError(field + ": expected an array");
  std::vector<double> out;
  for (const auto &v : j) out.push_back(v.get<double>());
  return out;
}

inline NoiseModel parse_noise(const nlohmann::json &j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "discrete")
    return NoiseModel::discrete(parse_vector(j.at("alphabet"), "model.noise.alphabet"),
                                parse_matrix(j.at("emission"), "model.noise.emission"));
  if (type == "gaussian")
    return NoiseModel::gaussian(parse_vector(j.at("means"), "model.noise.means"),
                                j.at("sigma").get<double>());
  if (type == "tabulated")
    return NoiseModel::tabulated(parse_vector(j.at("grid"), "model.noise.grid"),
                                 parse_vector(j.at("weights"), "model.noise.weights"),
                                 parse_matrix(j.at("values"), "model.noise.values"));
  throw ConfigError("model.noise.type: unknown variant '" + type + "'");
}

inline std::vector<double> parse_eps_grid(const nlohmann::json &j) {
  if (j.is_array()) return parse_vector(j, "eps_grid");
  if (j.is_object()) {
    const double from = j.at("log_from").get<double>();
    const double to = j.at("log_to").get<double>();
    const std::size_t points = j.at("points").get<std::size_t>();
    if (!(from > 0.0) || !(to > 0.0) || points < 2)
      throw ConfigError("eps_grid: log_from/log_to must be positive and points >= 2");
    std::vector<double> grid(points);
    const double lf = std::log(from), lt = std::log(to);
    for (std::size_t i = 0; i < points; ++i)
      grid[i] = std::exp(lf + (lt - lf) * static_cast<double>(i) /
                                  static_cast<double>(points - 1));
    return grid;
  }
  throw ConfigError("eps_grid: expected an array or {log_from, log_to, points}");
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json &j) {
  try {
    const auto &model = j.at("model");
    TransitionMatrix base = TransitionMatrix::validated(
        detail::parse_matrix(model.at("transitions"), "model.transitions"));
    NoiseModel noise = detail::parse_noise(model.at("noise"));
    std::vector<double> states;
    if (model.contains("states"))
      states = detail::parse_vector(model.at("states"), "model.states");
    else
      for (std::size_t i = 0; i < base.dim(); ++i) states.push_back(static_cast<double>(i));

    EstimatorSettings est;
    if (j.contains("estimator")) {
      const auto &e = j.at("estimator");
      if (e.contains("n")) est.n = e.at("n").get<std::size_t>();
      if (e.contains("burn_in")) est.burn_in = e.at("burn_in").get<std::size_t>();
      if (e.contains("batches")) est.batches = e.at("batches").get<std::size_t>();
      if (e.contains("replicas")) est.replicas = e.at("replicas").get<std::size_t>();
      if (e.contains("seed")) est.seed = e.at("seed").get<std::uint64_t>();
      if (e.contains("nu"))
        est.nu = SimplexVector::validated(detail::parse_vector(e.at("nu"), "estimator.nu"));
      if (e.contains("nu_bar"))
        est.nu_bar =
            SimplexVector::validated(detail::parse_vector(e.at("nu_bar"), "estimator.nu_bar"));
    }

    RunSelection run;
    if (j.contains("run")) {
      const auto &r = j.at("run");
      if (r.contains("gamma")) run.gamma = r.at("gamma").get<bool>();
      if (r.contains("lambda1")) run.lambda1 = r.at("lambda1").get<bool>();
      if (r.contains("wedge")) run.wedge = r.at("wedge").get<bool>();
      if (r.contains("entropy")) run.entropy = r.at("entropy").get<bool>();
      if (r.contains("misclassification"))
        run.misclassification = r.at("misclassification").get<bool>();
      if (r.contains("bounds")) run.bounds = r.at("bounds").get<bool>();
    }

    std::string out_dir = "out";
    if (j.contains("output") && j.at("output").contains("dir"))
      out_dir = j.at("output").at("dir").get<std::string>();

    return ExperimentConfig(std::move(states), std::move(base), std::move(noise),
                            detail::parse_eps_grid(j.at("eps_grid")), std::move(est), run,
                            std::move(out_dir), false);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const Error &) {
    throw;
  }
}

inline ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

// The section 3 preset: BSC with flip probability p, symmetric jump rate
// lambda, log-spaced eps grid between 1e-4 and 0.9.
inline ExperimentConfig bsc_preset_config(double p = 0.2, double lambda = 0.5,
                                          std::size_t grid_points = 13) {
  if (!(p > 0.0 && p < 0.5)) throw POutOfRange("bsc preset: p must lie in (0, 1/2)");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("bsc preset: lambda must lie in (0, 1]");
  Matrix lam(2, 2);
  lam(0, 0) = 1.0 - lambda;
  lam(0, 1) = lambda;
  lam(1, 0) = lambda;
  lam(1, 1) = 1.0 - lambda;
  Matrix emis(2, 2);
  emis(0, 0) = 1.0 - p;
  emis(0, 1) = p;
  emis(1, 0) = p;
  emis(1, 1) = 1.0 - p;
  std::vector<double> grid(grid_points);
  const double lf = std::log(1e-4), lt = std::log(0.9);
  for (std::size_t i = 0; i < grid_points; ++i)
    grid[i] =
        std::exp(lf + (lt - lf) * static_cast<double>(i) / static_cast<double>(grid_points - 1));
  return ExperimentConfig({0.0, 1.0}, TransitionMatrix::validated(std::move(lam)),
                          NoiseModel::discrete({0.0, 1.0}, std::move(emis)), std::move(grid),
                          EstimatorSettings{}, RunSelection{}, "out", false);
}

inline nlohmann::json config_echo(const ExperimentConfig &cfg) {
  nlohmann::json j;
  j["model"]["states"] = cfg.states();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cfg.base_transitions().dim(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t k = 0; k < cfg.base_transitions().dim(); ++k)
      r.push_back(cfg.base_transitions()(i, k));
    rows.push_back(r);
  }
  j["model"]["transitions"] = rows;
  if (const auto *d = std::get_if<DiscreteEmission>(&cfg.noise().variant())) {
    j["model"]["noise"]["type"] = "discrete";
    j["model"]["noise"]["alphabet"] = d->alphabet;
    nlohmann::json em = nlohmann::json::array();
    for (std::size_t i = 0; i < d->emission.rows(); ++i) {
      nlohmann::json r = nlohmann::json::array();
      for (std::size_t k = 0; k < d->emission.cols(); ++k) r.push_back(d->emission(i, k));
      em.push_back(r);
    }
    j["model"]["noise"]["emission"] = em;
  } else if (const auto *g = std::get_if<GaussianEmission>(&cfg.noise().variant())) {
    j["model"]["noise"]["type"] = "gaussian";
    j["model"]["noise"]["means"] = g->means;
    j["model"]["noise"]["sigma"] = g->sigma;
  } else {
    j["model"]["noise"]["type"] = "tabulated";
  }
  j["eps_grid"] = cfg.eps_grid();
  j["estimator"]["n"] = cfg.estimator().n;
  j["estimator"]["burn_in"] = cfg.estimator().burn_in;
  j["estimator"]["batches"] = cfg.estimator().batches;
  j["estimator"]["replicas"] = cfg.estimator().replicas;
  j["estimator"]["seed"] = cfg.estimator().seed;
  j["run"]["gamma"] = cfg.run().gamma;
  j["run"]["lambda1"] = cfg.run().lambda1;
  j["run"]["wedge"] = cfg.run().wedge;
  j["run"]["entropy"] = cfg.run().entropy;
  j["run"]["misclassification"] = cfg.run().misclassification;
  j["run"]["bounds"] = cfg.run().bounds;
  j["output"]["dir"] = cfg.out_dir();
  return j;
}

// Writes sweep.csv, plotdata.dat, and manifest.json under dir.
inline void write_outputs(const ExperimentConfig &cfg, const SweepResult &result,
                          const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "sweep.csv", std::ios::binary);
    if (!csv) throw Error("cannot open " + (dir / "sweep.csv").string() + " for writing");
    write_csv(result.rows, csv);
  }
  if (!result.rows.empty()) {
    std::ofstream dat(dir / "plotdata.dat", std::ios::binary);
    if (!dat) throw Error("cannot open " + (dir / "plotdata.dat").string() + " for writing");
    write_plotdata(result.rows, dat);
  }
  {
    nlohmann::json manifest = result.manifest;
    manifest["config"] = config_echo(cfg);
    manifest["created"] = []() {
      char buf[64];
      const std::time_t now = std::time(nullptr);
      std::tm tm{};
      gmtime_r(&now, &tm);
      std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
      return std::string(buf);
    }();
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    if (!mf) throw Error("cannot open " + (dir / "manifest.json").string() + " for writing");
    mf << manifest.dump(2) << '\n';
  }
}

} // namespace filterstab
