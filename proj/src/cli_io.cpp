#include "lyap/cli_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyap/asymptotic.hpp"
#include "lyap/finite_t_laws.hpp"

#ifndef LYAP_BUILD_DESCRIBE
#define LYAP_BUILD_DESCRIBE "unknown"
#endif

namespace lyap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

rng::Family family_from(const std::string& ensemble, int beta) {
  if (ensemble == "isotropic") return rng::Family::isotropic_custom;
  if (ensemble != "ginibre") throw CliError("unknown ensemble '" + ensemble + "'");
  switch (beta) {
    case 1: return rng::Family::ginibre_beta1;
    case 2: return rng::Family::ginibre_beta2;
    case 4: return rng::Family::ginibre_beta4;
    default: throw CliError("beta must be 1, 2 or 4");
  }
}

rng::Observable observable_from(const std::string& s) {
  if (s == "sv-lyapunov") return rng::Observable::sv_lyapunov;
  if (s == "ev-lyapunov") return rng::Observable::ev_lyapunov;
  if (s == "incremental-sv") return rng::Observable::incremental_sv;
  if (s == "incremental-radius") return rng::Observable::incremental_radius;
  if (s == "two-by-two-schur") return rng::Observable::two_by_two_schur;
  throw CliError("unknown observable '" + s + "'");
}

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char colon1 = 0, colon2 = 0;
  std::istringstream is(s);
  if (!(is >> g.lo >> colon1 >> g.hi >> colon2 >> g.n_points) || colon1 != ':' ||
      colon2 != ':' || !is.eof())
    throw CliError("grid must be lo:hi:n_points, got '" + s + "'");
  if (!(g.lo < g.hi)) throw CliError("grid needs lo < hi");
  if (g.n_points < 2) throw CliError("grid needs n_points >= 2");
  return g;
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table, bool with_timestamp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : table.metadata) out << "# " << k << "=" << v << "\n";
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::now();
    out << "# timestamp=" << std::chrono::duration_cast<std::chrono::seconds>(
                                 now.time_since_epoch())
                                 .count()
        << "\n";
  }
  for (size_t i = 0; i < table.columns.size(); ++i)
    out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
  if (!out) throw CliError("write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos)
        t.metadata.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream is(line);
    std::string cell;
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      t.columns = cells;
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  ExperimentConfig cfg;
  CLI::App app{"Lyapunov spectra of Ginibre matrix products"};
  app.require_subcommand(1);

  std::string ensemble = "ginibre", observable = "sv-lyapunov", method = "gamma-product";
  std::string format = "csv", grid, config_path;
  int beta = 2;
  long seed = 0, samples = 1000;
  int n = 1, t = 1;

  std::map<std::string, CLI::Option*> opts;
  std::vector<CLI::App*> subs;
  for (const char* name : {"simulate", "density", "compare", "positions", "limits", "spacing"}) {
    CLI::App* sub = app.add_subcommand(name, "");
    subs.push_back(sub);
    const auto reg = [&](const std::string& key, CLI::Option* o) {
      opts[std::string(name) + "/" + key] = o;
    };
    reg("config", sub->add_option("--config", config_path, "JSON config file"));
    reg("ensemble", sub->add_option("--ensemble", ensemble, "ginibre | isotropic"));
    reg("beta", sub->add_option("--beta", beta, "Dyson index 1|2|4"));
    reg("n", sub->add_option("--n", n, "matrix size N"));
    reg("t", sub->add_option("--t", t, "number of factors"));
    reg("samples", sub->add_option("--samples", samples, "ensemble size"));
    reg("seed", sub->add_option("--seed", seed, "master seed"));
    reg("observable", sub->add_option("--observable", observable, "observable"));
    reg("method", sub->add_option("--method", method, "matrix | gamma-product"));
    reg("model", sub->add_option("--model", cfg.model, "density model"));
    reg("grid", sub->add_option("--grid", grid, "lo:hi:n_points"));
    reg("out", sub->add_option("--out", cfg.out_dir, "output directory"));
    reg("format", sub->add_option("--format", format, "csv | json"));
    reg("preset", sub->add_option("--preset", cfg.preset, "fig1..fig5"));
    reg("threads", sub->add_option("--threads", cfg.threads, "worker threads (0 = auto)"));
    reg("bins", sub->add_option("--bins", cfg.n_bins, "histogram bins"));
    reg("tolerance", sub->add_option("--tolerance", cfg.tolerance, "compare tolerance"));
    reg("limits-t", sub->add_option("--limits-t", cfg.limits_t, "t for the moment route"));
    reg("no-timestamp", sub->add_flag("--no-timestamp", cfg.no_timestamp, ""));
    reg("emit-plot-script", sub->add_flag("--emit-plot-script", cfg.emit_plot_script, ""));
    reg("rescale-sqrt-n", sub->add_flag("--rescale-sqrt-n", cfg.rescale_sqrt_n, ""));
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    throw CliError(std::string("argument error: ") + e.what());
  }

  const char* names[] = {"simulate", "density", "compare", "positions", "limits", "spacing"};
  int which = -1;
  for (int i = 0; i < 6; ++i)
    if (subs[i]->parsed()) which = i;
  if (which < 0) throw CliError("missing subcommand");
  cfg.command = static_cast<Command>(which);
  const std::string prefix = std::string(names[which]) + "/";
  const auto given = [&](const std::string& key) {
    return opts.at(prefix + key)->count() > 0;
  };

  if (given("config")) {
    std::ifstream in(config_path);
    if (!in) throw CliError("cannot open config file '" + config_path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CliError(std::string("config file is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (opts.find(prefix + key) == opts.end())
        throw CliError("unknown config key '" + key + "'");
      if (given(key)) continue;  // explicit flags override the file
      if (key == "ensemble") ensemble = value.get<std::string>();
      else if (key == "beta") beta = value.get<int>();
      else if (key == "n") n = value.get<int>();
      else if (key == "t") t = value.get<int>();
      else if (key == "samples") samples = value.get<long>();
      else if (key == "seed") seed = value.get<long>();
      else if (key == "observable") observable = value.get<std::string>();
      else if (key == "method") method = value.get<std::string>();
      else if (key == "model") cfg.model = value.get<std::string>();
      else if (key == "grid") grid = value.get<std::string>();
      else if (key == "out") cfg.out_dir = value.get<std::string>();
      else if (key == "format") format = value.get<std::string>();
      else if (key == "preset") cfg.preset = value.get<std::string>();
      else if (key == "threads") cfg.threads = value.get<int>();
      else if (key == "bins") cfg.n_bins = value.get<int>();
      else if (key == "tolerance") cfg.tolerance = value.get<double>();
      else if (key == "limits-t") cfg.limits_t = value.get<long>();
      else if (key == "no-timestamp") cfg.no_timestamp = value.get<bool>();
      else if (key == "emit-plot-script") cfg.emit_plot_script = value.get<bool>();
      else if (key == "rescale-sqrt-n") cfg.rescale_sqrt_n = value.get<bool>();
      else if (key == "config") { /* self-reference; ignore */ }
    }
  }

  if (t < 1) throw CliError("t must be >= 1");
  if (n < 1) throw CliError("n must be >= 1");
  if (samples < 1) throw CliError("samples must be >= 1");
  cfg.ensemble.family = family_from(ensemble, beta);
  cfg.ensemble.n = n;
  cfg.ensemble.t = t;
  cfg.ensemble.samples = samples;
  cfg.ensemble.master_seed = static_cast<std::uint64_t>(seed);
  cfg.ensemble.observable = observable_from(observable);
  if (cfg.ensemble.family == rng::Family::isotropic_custom) {
    // The CLI's isotropic ensemble reuses the singular value profile of a
    // Ginibre draw (the cross-check ensemble of the 2x2 bound experiments).
    cfg.ensemble.sv_sampler = [](rng::RngStream& stream, int dim) {
      const Eigen::MatrixXcd g = rng::sample_ginibre(stream, 2, dim);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
      std::vector<double> s(dim);
      for (int i = 0; i < dim; ++i) s[i] = svd.singularValues()(i);
      return s;
    };
  }
  if (method == "matrix") cfg.ev_method = mc::EvMethod::matrix;
  else if (method == "gamma-product") cfg.ev_method = mc::EvMethod::gamma_product;
  else throw CliError("method must be 'matrix' or 'gamma-product'");
  if (format == "csv") cfg.format = OutputFormat::csv;
  else if (format == "json") cfg.format = OutputFormat::json;
  else throw CliError("format must be 'csv' or 'json'");
  if (!grid.empty()) cfg.grid = parse_grid(grid);
  else if (cfg.command == Command::density) cfg.grid = GridSpec{-0.8, 0.8, 400};
  if (!cfg.preset.empty() && cfg.preset != "fig1" && cfg.preset != "fig2" &&
      cfg.preset != "fig3" && cfg.preset != "fig4" && cfg.preset != "fig5")
    throw CliError("preset must be one of fig1..fig5");
  return cfg;
}

// ---------------------------------------------------------------------------
// Artifact writers

namespace {

std::vector<std::pair<std::string, std::string>> spec_metadata(const rng::EnsembleSpec& s) {
  return {{"ensemble", s.family_name()},
          {"N", std::to_string(s.n)},
          {"t", std::to_string(s.t)},
          {"samples", std::to_string(s.samples)},
          {"seed", std::to_string(s.master_seed)},
          {"observable", s.observable_name()},
          {"build", LYAP_BUILD_DESCRIBE}};
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

void write_samples_csv(const ExperimentConfig& cfg, const mc::SampleSet& set,
                       const std::string& name) {
  CsvTable t;
  t.metadata = spec_metadata(set.spec);
  for (int b = 1; b <= set.n_cols; ++b) t.columns.push_back("b" + std::to_string(b));
  const bool with_angles = !set.angles.empty();
  if (with_angles)
    for (int b = 1; b <= set.n_cols; ++b) t.columns.push_back("angle_b" + std::to_string(b));
  const bool with_real_fraction = !set.real_fraction.empty();
  if (with_real_fraction) t.columns.push_back("real_fraction");
  for (long i = 0; i < set.n_rows; ++i) {
    std::vector<double> row(set.row(i).begin(), set.row(i).end());
    if (with_angles)
      for (int b = 0; b < set.n_cols; ++b) row.push_back(set.angles[i * set.n_cols + b]);
    if (with_real_fraction) row.push_back(set.real_fraction[i]);
    t.rows.push_back(std::move(row));
  }
  write_csv(out_path(cfg, name), t, !cfg.no_timestamp);
}

void write_histogram_csv(const ExperimentConfig& cfg, const mc::Histogram& h,
                         const std::string& name) {
  CsvTable t;
  t.metadata.emplace_back("provenance", h.provenance);
  t.metadata.emplace_back("build", LYAP_BUILD_DESCRIBE);
  t.columns = {"bin_center", "density", "count"};
  for (int i = 0; i < h.n_bins; ++i)
    t.rows.push_back({h.center(i), h.density[i], static_cast<double>(h.counts[i])});
  write_csv(out_path(cfg, name), t, !cfg.no_timestamp);
}

void write_curve_csv(const ExperimentConfig& cfg, const laws::DensityModel& model,
                     double lo, double hi, int points, const std::string& name) {
  CsvTable t;
  t.metadata.emplace_back("model", model.kind());
  t.metadata.emplace_back("build", LYAP_BUILD_DESCRIBE);
  t.columns = {"x", "pdf"};
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    t.rows.push_back({x, model.pdf(x)});
  }
  write_csv(out_path(cfg, name), t, !cfg.no_timestamp);
}

laws::DensityModel model_for(const ExperimentConfig& cfg) {
  const int n = cfg.ensemble.n, t = cfg.ensemble.t;
  if (cfg.model == "gaussian") return laws::DensityModel::gaussian_mixture(n, t);
  if (cfg.model == "saddle") return laws::DensityModel::saddle(n, t);
  if (cfg.model == "lognormal") return laws::DensityModel::lognormal_mixture(n, t);
  if (cfg.model == "eigen-exact") return laws::DensityModel::eigen_exact(n, t);
  if (cfg.model == "beta4-radial") return laws::DensityModel::beta4_radial(n, t);
  if (cfg.model == "triangular") return laws::DensityModel::triangular();
  if (cfg.model == "staircase") return laws::DensityModel::staircase(n);
  throw CliError("unknown model '" + cfg.model + "'");
}

mc::SampleSet run_ensemble(const ExperimentConfig& cfg) {
  switch (cfg.ensemble.observable) {
    case rng::Observable::sv_lyapunov:
    case rng::Observable::incremental_sv:
      return mc::run_sv_experiment(cfg.ensemble, cfg.threads);
    case rng::Observable::ev_lyapunov:
    case rng::Observable::incremental_radius:
      return mc::run_ev_experiment(cfg.ensemble, cfg.ev_method, cfg.threads);
    default:
      throw CliError("observable not runnable via simulate/compare");
  }
}

void emit_plot_script(const ExperimentConfig& cfg, const std::vector<std::string>& files) {
  std::ofstream out(out_path(cfg, "plot.gp"));
  out << "# gnuplot script; run from the output directory\n";
  out << "set datafile separator ','\n";
  for (const auto& f : files)
    out << "plot '" << f << "' using 1:2 with lines title '" << f << "'\npause -1\n";
}

int run_simulate(const ExperimentConfig& cfg);
int run_preset(const ExperimentConfig& cfg);

int run_density(const ExperimentConfig& cfg) {
  const laws::DensityModel model = model_for(cfg);
  CsvTable t;
  t.metadata.emplace_back("model", model.kind());
  t.metadata.emplace_back("N", std::to_string(cfg.ensemble.n));
  t.metadata.emplace_back("t", std::to_string(cfg.ensemble.t));
  t.metadata.emplace_back("build", LYAP_BUILD_DESCRIBE);
  t.columns = {"x", "pdf", "cdf"};
  for (int i = 0; i < cfg.grid.n_points; ++i) {
    const double x = (i == cfg.grid.n_points - 1)
                         ? cfg.grid.hi
                         : cfg.grid.lo +
                               (cfg.grid.hi - cfg.grid.lo) * i / (cfg.grid.n_points - 1);
    t.rows.push_back({x, model.pdf(x), model.cdf(x)});
  }
  write_csv(out_path(cfg, "density.csv"), t, !cfg.no_timestamp);
  if (cfg.emit_plot_script) emit_plot_script(cfg, {"density.csv"});
  return 0;
}

int run_compare(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  mc::SampleSet set = run_ensemble(cfg);
  std::vector<double> pooled = set.pooled_sorted();
  if (cfg.rescale_sqrt_n) {
    const double root_n = std::sqrt(static_cast<double>(cfg.ensemble.n));
    for (double& v : pooled) v /= root_n;
  }
  const laws::DensityModel model = model_for(cfg);
  const double ks = mc::ks_distance(pooled, model);
  const bool pass = ks <= cfg.tolerance;
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const double lo = pooled.front(), hi = pooled.back();
  write_histogram_csv(cfg, mc::make_histogram(pooled, lo, hi, cfg.n_bins,
                                              mc::provenance_digest(cfg.ensemble)),
                      "compare_hist.csv");
  write_curve_csv(cfg, model, lo, hi, 400, "compare_model.csv");

  json summary = {
      {"experiment", mc::provenance_digest(cfg.ensemble)},
      {"model", model.kind()},
      {"ks", ks},
      {"tolerance", cfg.tolerance},
      {"pass", pass},
      {"runtime_seconds", runtime},
      {"seed", cfg.ensemble.master_seed},
  };
  std::ofstream out(out_path(cfg, "compare.json"));
  out << summary.dump(2) << "\n";
  if (cfg.emit_plot_script) emit_plot_script(cfg, {"compare_hist.csv", "compare_model.csv"});
  return pass ? 0 : 2;
}

int run_positions(const ExperimentConfig& cfg) {
  const int beta = cfg.ensemble.family == rng::Family::isotropic_custom
                       ? 2
                       : rng::beta_of(cfg.ensemble.family);
  const auto pos = laws::deterministic_positions(cfg.ensemble.n, beta);
  CsvTable t;
  t.metadata.emplace_back("beta", std::to_string(beta));
  t.metadata.emplace_back("build", LYAP_BUILD_DESCRIBE);
  t.columns = {"b", "mu", "incremental"};
  for (int b = 1; b <= cfg.ensemble.n; ++b)
    t.rows.push_back({static_cast<double>(b), pos[b - 1], std::exp(pos[b - 1])});
  write_csv(out_path(cfg, "positions.csv"), t, !cfg.no_timestamp);
  return 0;
}

int run_limits(const ExperimentConfig& cfg) {
  CsvTable stair;
  stair.metadata.emplace_back("N", std::to_string(cfg.ensemble.n));
  stair.metadata.emplace_back("build", LYAP_BUILD_DESCRIBE);
  stair.columns = {"lambda", "staircase_cdf", "triangular_cdf"};
  const int pts = std::max(cfg.grid.n_points, 200);
  for (int i = 0; i < pts; ++i) {
    const double x = 1.2 * i / (pts - 1);
    stair.rows.push_back({x, asymptotic::staircase_cdf(cfg.ensemble.n, x),
                          asymptotic::triangular_cdf(x)});
  }
  write_csv(out_path(cfg, "limits_staircase.csv"), stair, !cfg.no_timestamp);

  CsvTable mom;
  mom.metadata.emplace_back("t", std::to_string(cfg.limits_t));
  mom.metadata.emplace_back("build", LYAP_BUILD_DESCRIBE);
  mom.columns = {"n", "fuss_catalan_route", "triangular_moment"};
  for (int n = 1; n <= 8; ++n)
    mom.rows.push_back({static_cast<double>(n),
                        asymptotic::fuss_catalan_moment(cfg.limits_t, n),
                        2.0 / (n + 2.0)});
  write_csv(out_path(cfg, "limits_moments.csv"), mom, !cfg.no_timestamp);
  return 0;
}

int run_spacing(const ExperimentConfig& cfg) {
  const auto dist = asymptotic::level_spacing_finite_n(cfg.ensemble.n);
  CsvTable atoms;
  atoms.metadata.emplace_back("N", std::to_string(cfg.ensemble.n));
  atoms.metadata.emplace_back("order", "t-first");
  atoms.metadata.emplace_back("build", LYAP_BUILD_DESCRIBE);
  atoms.columns = {"j", "atom", "weight"};
  for (size_t j = 0; j < dist.atoms.size(); ++j)
    atoms.rows.push_back({static_cast<double>(j + 1), dist.atoms[j], dist.weights[j]});
  write_csv(out_path(cfg, "spacing_atoms.csv"), atoms, !cfg.no_timestamp);

  // N-first side: Monte-Carlo spacings of the unfolded squared radii at the
  // configured (N, t).
  rng::EnsembleSpec mc_spec = cfg.ensemble;
  mc_spec.observable = rng::Observable::incremental_radius;
  const mc::SampleSet set = mc::run_ev_experiment(mc_spec, mc::EvMethod::matrix, cfg.threads);
  std::vector<double> spacings;
  for (long i = 0; i < set.n_rows; ++i) {
    for (int b = 0; b + 1 < set.n_cols; ++b) {
      const double r2a = set.value(i, b) * set.value(i, b);
      const double r2b = set.value(i, b + 1) * set.value(i, b + 1);
      spacings.push_back(r2b - r2a);  // radii enter already sorted
    }
  }
  std::sort(spacings.begin(), spacings.end());
  const double hi = spacings.empty() ? 1.0 : spacings.back();
  write_histogram_csv(cfg,
                      mc::make_histogram(spacings, 0.0, std::max(hi, 1e-12), cfg.n_bins,
                                         mc::provenance_digest(mc_spec)),
                      "spacing_mc_hist.csv");
  return 0;
}

int run_simulate(const ExperimentConfig& cfg) {
  if (!cfg.preset.empty()) return run_preset(cfg);
  if (cfg.ensemble.observable == rng::Observable::two_by_two_schur) {
    const mc::Bounds2x2Result res = mc::run_2x2_bounds(cfg.ensemble, cfg.threads);
    CsvTable t;
    t.metadata = spec_metadata(cfg.ensemble);
    t.metadata.emplace_back("lower_bound_violations",
                            std::to_string(res.lower_bound_violations));
    t.metadata.emplace_back("max_sum_identity_residual",
                            format_double(res.max_sum_identity_residual));
    t.metadata.emplace_back("mean_max_exponent", format_double(res.mean_max_exponent));
    t.columns = {"max_exponent"};
    for (double v : res.max_exponents) t.rows.push_back({v});
    write_csv(out_path(cfg, "samples.csv"), t, !cfg.no_timestamp);
    return 0;
  }
  const mc::SampleSet set = run_ensemble(cfg);
  write_samples_csv(cfg, set, "samples.csv");
  if (cfg.format == OutputFormat::json) {
    json j = {{"experiment", mc::provenance_digest(cfg.ensemble)},
              {"rows", set.n_rows},
              {"columns", set.n_cols}};
    std::ofstream out(out_path(cfg, "samples.json"));
    out << j.dump(2) << "\n";
  }
  if (cfg.emit_plot_script) emit_plot_script(cfg, {"samples.csv"});
  return 0;
}

// Figure-class presets; parameters follow the reference experiments.
int run_preset(const ExperimentConfig& cfg) {
  std::vector<std::string> files;
  const auto hist_of = [&](const mc::SampleSet& set, int bins) {
    std::vector<double> pooled = set.pooled_sorted();
    return mc::make_histogram(pooled, pooled.front(), pooled.back(), bins,
                              mc::provenance_digest(set.spec));
  };
  if (cfg.preset == "fig1") {
    for (int t : {30, 200}) {
      ExperimentConfig c = cfg;
      c.ensemble.family = rng::Family::ginibre_beta2;
      c.ensemble.n = 3;
      c.ensemble.t = t;
      c.ensemble.samples = 10000;
      c.ensemble.observable = rng::Observable::sv_lyapunov;
      const mc::SampleSet set = mc::run_sv_experiment(c.ensemble, cfg.threads);
      const std::string suffix = "_t" + std::to_string(t) + ".csv";
      write_histogram_csv(cfg, hist_of(set, cfg.n_bins), "fig1_hist" + suffix);
      const auto gauss = laws::DensityModel::gaussian_mixture(3, t);
      const auto saddle = laws::DensityModel::saddle(3, t);
      write_curve_csv(cfg, gauss, gauss.support_lo(), gauss.support_hi(), 400,
                      "fig1_gaussian" + suffix);
      write_curve_csv(cfg, saddle, saddle.support_lo(), saddle.support_hi(), 400,
                      "fig1_saddle" + suffix);
      files.insert(files.end(),
                   {"fig1_hist" + suffix, "fig1_gaussian" + suffix, "fig1_saddle" + suffix});
    }
  } else if (cfg.preset == "fig2") {
    ExperimentConfig c = cfg;
    c.ensemble.family = rng::Family::ginibre_beta2;
    c.ensemble.n = 10;
    c.ensemble.t = 200;
    c.ensemble.samples = 1000;
    c.ensemble.observable = rng::Observable::incremental_sv;
    const mc::SampleSet set = mc::run_sv_experiment(c.ensemble, cfg.threads);
    write_histogram_csv(cfg, hist_of(set, 120), "fig2_hist.csv");
    const auto model = laws::DensityModel::lognormal_mixture(10, 200);
    write_curve_csv(cfg, model, model.support_lo(), model.support_hi(), 600,
                    "fig2_lognormal.csv");
    files = {"fig2_hist.csv", "fig2_lognormal.csv"};
  } else if (cfg.preset == "fig3") {
    for (auto [n, t] : {std::pair{3, 300}, std::pair{5, 500}}) {
      ExperimentConfig c = cfg;
      c.ensemble.family = rng::Family::ginibre_beta2;
      c.ensemble.n = n;
      c.ensemble.t = t;
      c.ensemble.samples = 1000;
      c.ensemble.observable = rng::Observable::ev_lyapunov;
      const mc::SampleSet set = mc::run_ev_experiment(c.ensemble, mc::EvMethod::matrix,
                                                      cfg.threads);
      CsvTable scatter;
      scatter.metadata = spec_metadata(c.ensemble);
      scatter.columns = {"re", "im"};
      for (long i = 0; i < set.n_rows; ++i)
        for (int b = 0; b < set.n_cols; ++b) {
          const double r = std::exp(set.value(i, b));
          const double a = set.angles[i * set.n_cols + b];
          scatter.rows.push_back({r * std::cos(a), r * std::sin(a)});
        }
      const std::string name =
          "fig3_scatter_N" + std::to_string(n) + "_t" + std::to_string(t) + ".csv";
      write_csv(out_path(cfg, name), scatter, !cfg.no_timestamp);
      files.push_back(name);
    }
    CsvTable rings;
    rings.columns = {"b", "radius"};
    for (int b = 1; b <= 5; ++b)
      rings.rows.push_back({static_cast<double>(b),
                            std::exp(0.5 * specfun::digamma(b))});
    write_csv(out_path(cfg, "fig3_rings.csv"), rings, !cfg.no_timestamp);
    files.push_back("fig3_rings.csv");
  } else if (cfg.preset == "fig4") {
    ExperimentConfig c = cfg;
    c.ensemble.family = rng::Family::ginibre_beta2;
    c.ensemble.n = 5;
    c.ensemble.t = 100;
    c.ensemble.samples = 10000;
    c.ensemble.observable = rng::Observable::incremental_sv;
    const mc::SampleSet sv = mc::run_sv_experiment(c.ensemble, cfg.threads);
    c.ensemble.observable = rng::Observable::incremental_radius;
    const mc::SampleSet ev = mc::run_ev_experiment(c.ensemble, mc::EvMethod::gamma_product,
                                                   cfg.threads);
    write_histogram_csv(cfg, hist_of(sv, 120), "fig4_sv_hist.csv");
    write_histogram_csv(cfg, hist_of(ev, 120), "fig4_ev_hist.csv");
    const auto model = laws::DensityModel::lognormal_mixture(5, 100);
    write_curve_csv(cfg, model, model.support_lo(), model.support_hi(), 600,
                    "fig4_lognormal.csv");
    files = {"fig4_sv_hist.csv", "fig4_ev_hist.csv", "fig4_lognormal.csv"};
  } else if (cfg.preset == "fig5") {
    for (int beta : {1, 2, 4}) {
      for (int t : {5, 500}) {
        ExperimentConfig c = cfg;
        c.ensemble.family = beta == 1   ? rng::Family::ginibre_beta1
                            : beta == 2 ? rng::Family::ginibre_beta2
                                        : rng::Family::ginibre_beta4;
        c.ensemble.n = 2;
        c.ensemble.t = t;
        c.ensemble.samples = 1000;
        c.ensemble.observable = rng::Observable::ev_lyapunov;
        const mc::SampleSet set = mc::run_ev_experiment(c.ensemble, mc::EvMethod::matrix,
                                                        cfg.threads);
        CsvTable scatter;
        scatter.metadata = spec_metadata(c.ensemble);
        scatter.columns = {"re", "im"};
        for (long i = 0; i < set.n_rows; ++i)
          for (int b = 0; b < set.n_cols; ++b) {
            const double r = std::exp(set.value(i, b));
            const double a = set.angles[i * set.n_cols + b];
            scatter.rows.push_back({r * std::cos(a), r * std::sin(a)});
          }
        const std::string name = "fig5_scatter_beta" + std::to_string(beta) + "_t" +
                                 std::to_string(t) + ".csv";
        write_csv(out_path(cfg, name), scatter, !cfg.no_timestamp);
        files.push_back(name);
      }
    }
    CsvTable crosses;
    crosses.columns = {"beta", "n", "position"};
    for (int beta : {1, 2, 4})
      for (int n = 1; n <= 2; ++n) {
        const double p = std::exp(0.5 * specfun::digamma(0.5 * beta * n));
        crosses.rows.push_back({static_cast<double>(beta), static_cast<double>(n), p});
        crosses.rows.push_back({static_cast<double>(beta), static_cast<double>(n), -p});
      }
    write_csv(out_path(cfg, "fig5_positions.csv"), crosses, !cfg.no_timestamp);
    files.push_back("fig5_positions.csv");
  }
  if (cfg.emit_plot_script) emit_plot_script(cfg, files);
  return 0;
}

}  // namespace

int run(const ExperimentConfig& cfg) {
  switch (cfg.command) {
    case Command::simulate: return run_simulate(cfg);
    case Command::density: return run_density(cfg);
    case Command::compare: return run_compare(cfg);
    case Command::positions: return run_positions(cfg);
    case Command::limits: return run_limits(cfg);
    case Command::spacing: return run_spacing(cfg);
  }
  return 1;
}

}  // namespace lyap::cli
