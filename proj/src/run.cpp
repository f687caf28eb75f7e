#include "nelsim/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nelsim/dynamics.hpp"
#include "nelsim/ensemble.hpp"
#include "nelsim/errors.hpp"
#include "nelsim/rng.hpp"

namespace nelsim {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- parsing

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

const json& need(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail("missing key '" + path + key + "'");
  return obj.at(key);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) fail("unknown key '" + path + it.key() + "'");
  }
}

const json& need_object(const json& obj, const std::string& path, const char* key) {
  const json& v = need(obj, path, key);
  if (!v.is_object()) fail("'" + path + key + "' must be an object");
  return v;
}

double need_number(const json& obj, const std::string& path, const char* key) {
  const json& v = need(obj, path, key);
  if (!v.is_number()) fail("'" + path + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t need_count(const json& obj, const std::string& path, const char* key) {
  const json& v = need(obj, path, key);
  if (!v.is_number_integer() ||
      (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail("'" + path + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string need_string(const json& obj, const std::string& path, const char* key) {
  const json& v = need(obj, path, key);
  if (!v.is_string()) fail("'" + path + key + "' must be a string");
  return v.get<std::string>();
}

// Component constructors signal bad values with invalid_argument; at parse
// time that is a config problem, so relabel for the exit-code contract.
template <typename Fn>
auto as_config_error(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  } catch (const std::domain_error& e) {
    fail(e.what());
  }
}

Grid parse_grid(const json& root) {
  const json& g = need_object(root, "", "grid");
  reject_unknown(g, "grid.", {"x_min", "x_max", "n"});
  const double x_min = need_number(g, "grid.", "x_min");
  const double x_max = need_number(g, "grid.", "x_max");
  const auto n = need_count(g, "grid.", "n");
  return as_config_error([&] { return Grid(x_min, x_max, static_cast<std::size_t>(n)); });
}

PotentialSpec parse_potential(const json& p) {
  const std::string kind = need_string(p, "physics.potential.", "kind");
  if (kind == "free") {
    reject_unknown(p, "physics.potential.", {"kind"});
    return PotentialSpec::free_particle();
  }
  if (kind == "harmonic") {
    reject_unknown(p, "physics.potential.", {"kind", "omega"});
    const double omega = need_number(p, "physics.potential.", "omega");
    return as_config_error([&] { return PotentialSpec::harmonic(omega); });
  }
  if (kind == "barrier") {
    reject_unknown(p, "physics.potential.", {"kind", "height", "width", "center"});
    const double h = need_number(p, "physics.potential.", "height");
    const double w = need_number(p, "physics.potential.", "width");
    const double c = need_number(p, "physics.potential.", "center");
    return as_config_error([&] { return PotentialSpec::barrier(h, w, c); });
  }
  if (kind == "table") {
    reject_unknown(p, "physics.potential.", {"kind", "values"});
    const json& vals = need(p, "physics.potential.", "values");
    if (!vals.is_array()) fail("'physics.potential.values' must be an array");
    std::vector<double> table;
    for (const auto& v : vals) {
      if (!v.is_number()) fail("'physics.potential.values' must hold numbers");
      table.push_back(v.get<double>());
    }
    return as_config_error([&] { return PotentialSpec::custom(std::move(table)); });
  }
  fail("'physics.potential.kind' must be free, harmonic, barrier, or table");
}

PhysicalParams parse_physics(const json& root, bool lambda_from_sweep) {
  const json& p = need_object(root, "", "physics");
  reject_unknown(p, "physics.", {"mass", "hbar", "lambda", "potential"});
  PhysicalParams params;
  params.mass = need_number(p, "physics.", "mass");
  params.hbar = need_number(p, "physics.", "hbar");
  if (lambda_from_sweep) {
    if (p.contains("lambda"))
      fail("'physics.lambda' is taken from lambda_values in a lambda_sweep; remove it");
    params.lambda = 0.0;
  } else {
    params.lambda = need_number(p, "physics.", "lambda");
  }
  if (p.contains("potential")) {
    const json& pot = p.at("potential");
    if (!pot.is_object()) fail("'physics.potential' must be an object");
    params.potential = parse_potential(pot);
  }
  as_config_error([&] { params.validate(); return 0; });
  return params;
}

void parse_state(const json& root, Scenario& sc) {
  const json& s = need_object(root, "", "state");
  const std::string kind = need_string(s, "state.", "kind");
  if (kind == "gaussian") {
    reject_unknown(s, "state.", {"kind", "x0", "s0", "p0"});
    sc.builder = Scenario::Builder::gaussian;
    sc.x0 = need_number(s, "state.", "x0");
    sc.s0 = need_number(s, "state.", "s0");
    sc.p0 = need_number(s, "state.", "p0");
  } else if (kind == "coherent") {
    reject_unknown(s, "state.", {"kind", "x0", "omega"});
    sc.builder = Scenario::Builder::coherent;
    sc.x0 = need_number(s, "state.", "x0");
    sc.omega = need_number(s, "state.", "omega");
  } else if (kind == "superposition") {
    reject_unknown(s, "state.", {"kind", "packets"});
    const json& packets = need(s, "state.", "packets");
    if (!packets.is_array() || packets.size() != 2)
      fail("'state.packets' must be an array of exactly 2 packets");
    sc.builder = Scenario::Builder::superposition;
    double* xs[2][3] = {{&sc.x1, &sc.s1, &sc.p1}, {&sc.x2, &sc.s2, &sc.p2}};
    for (int i = 0; i < 2; ++i) {
      const json& pk = packets.at(i);
      const std::string path = "state.packets[" + std::to_string(i) + "].";
      if (!pk.is_object()) fail("'state.packets' entries must be objects");
      reject_unknown(pk, path, {"x0", "s0", "p0"});
      *xs[i][0] = need_number(pk, path, "x0");
      *xs[i][1] = need_number(pk, path, "s0");
      *xs[i][2] = need_number(pk, path, "p0");
    }
  } else {
    fail("'state.kind' must be gaussian, coherent, or superposition");
  }
  sc.name = kind;
}

EvolutionConfig parse_evolution(const json& root, const Grid& grid,
                                const PhysicalParams& params) {
  const json& e = need_object(root, "", "evolution");
  reject_unknown(e, "evolution.", {"dt", "n_steps", "record_every"});
  EvolutionConfig cfg;
  cfg.dt = need_number(e, "evolution.", "dt");
  cfg.n_steps = static_cast<std::size_t>(need_count(e, "evolution.", "n_steps"));
  cfg.record_every = static_cast<std::size_t>(need_count(e, "evolution.", "record_every"));
  cfg.lambda = params.lambda;
  as_config_error([&] { cfg.validate(grid, params); return 0; });
  if (cfg.n_steps % cfg.record_every != 0)
    fail("'evolution.n_steps' must be a multiple of record_every "
         "(snapshots must be uniformly spaced)");
  if (cfg.n_steps / cfg.record_every < 2)
    fail("'evolution.n_steps' must be at least 2x record_every "
         "(residuals need 3 snapshots)");
  return cfg;
}

void parse_scenario(const json& root, RunConfig& cfg, bool lambda_from_sweep) {
  cfg.scenario.grid = parse_grid(root);
  cfg.scenario.params = parse_physics(root, lambda_from_sweep);
  parse_state(root, cfg.scenario);
  cfg.scenario.evolution =
      parse_evolution(root, cfg.scenario.grid, cfg.scenario.params);
  // surface support/width/table-length problems now, as config errors
  as_config_error([&] { return cfg.scenario.initial_state(); });
  as_config_error([&] {
    return cfg.scenario.params.potential.evaluate(cfg.scenario.grid,
                                                  cfg.scenario.params.mass);
  });
}

bell::AngleSet parse_angles(const json& b) {
  const json& a = need(b, "bell.", "angles");
  if (a.is_string()) {
    if (a.get<std::string>() != "optimal")
      fail("'bell.angles' must be \"optimal\" or an object");
    return bell::AngleSet::optimal();
  }
  if (!a.is_object()) fail("'bell.angles' must be \"optimal\" or an object");
  reject_unknown(a, "bell.angles.", {"a", "a_prime", "b", "b_prime"});
  const double aa = need_number(a, "bell.angles.", "a");
  const double ap = need_number(a, "bell.angles.", "a_prime");
  const double bb = need_number(a, "bell.angles.", "b");
  const double bp = need_number(a, "bell.angles.", "b_prime");
  return as_config_error([&] { return bell::AngleSet(aa, ap, bb, bp); });
}

std::vector<double> parse_separations(const json& b) {
  const json& s = need(b, "bell.", "separations");
  if (!s.is_object()) fail("'bell.separations' must be an object");
  std::vector<double> out;
  if (s.contains("values")) {
    reject_unknown(s, "bell.separations.", {"values"});
    const json& vals = s.at("values");
    if (!vals.is_array() || vals.empty())
      fail("'bell.separations.values' must be a non-empty array");
    for (const auto& v : vals) {
      if (!v.is_number() || v.get<double>() < 0.0)
        fail("'bell.separations.values' must hold numbers >= 0");
      out.push_back(v.get<double>());
    }
  } else {
    reject_unknown(s, "bell.separations.", {"min", "max", "count", "spacing"});
    const double lo = need_number(s, "bell.separations.", "min");
    const double hi = need_number(s, "bell.separations.", "max");
    const auto count = need_count(s, "bell.separations.", "count");
    const std::string spacing = need_string(s, "bell.separations.", "spacing");
    if (count < 2) fail("'bell.separations.count' must be >= 2");
    if (!(hi > lo)) fail("'bell.separations.max' must exceed min");
    if (spacing == "log") {
      if (!(lo > 0.0)) fail("'bell.separations.min' must be > 0 for log spacing");
      const double ratio = hi / lo;
      for (std::uint64_t i = 0; i < count; ++i)
        out.push_back(lo * std::pow(ratio, static_cast<double>(i) /
                                               static_cast<double>(count - 1)));
    } else if (spacing == "linear") {
      if (lo < 0.0) fail("'bell.separations.min' must be >= 0");
      for (std::uint64_t i = 0; i < count; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(count - 1));
    } else {
      fail("'bell.separations.spacing' must be log or linear");
    }
    out.front() = lo;
    out.back() = hi;  // pin endpoints against pow() rounding
  }
  std::sort(out.begin(), out.end());
  return out;
}

BellScanConfig parse_bell(const json& root) {
  const json& b = need_object(root, "", "bell");
  reject_unknown(b, "bell.",
                 {"family", "cutoff_scale", "exponent", "angles", "separations", "bound"});
  BellScanConfig cfg;
  const std::string family = need_string(b, "bell.", "family");
  const double lc = need_number(b, "bell.", "cutoff_scale");
  if (family == "gaussian") {
    if (b.contains("exponent"))
      fail("'bell.exponent' is fixed at 2 for the gaussian family; remove it");
    cfg.model = as_config_error([&] { return bell::CutoffModel::gaussian(lc); });
  } else if (family == "exponential") {
    const double p = need_number(b, "bell.", "exponent");
    cfg.model = as_config_error([&] { return bell::CutoffModel::exponential(lc, p); });
  } else if (family == "rational") {
    const double p = need_number(b, "bell.", "exponent");
    cfg.model = as_config_error([&] { return bell::CutoffModel::rational(lc, p); });
  } else {
    fail("'bell.family' must be exponential, gaussian, or rational");
  }
  cfg.angles = parse_angles(b);
  cfg.separations = parse_separations(b);
  cfg.bound = need_number(b, "bell.", "bound");
  if (!(cfg.bound > 0.0)) fail("'bell.bound' must be > 0");
  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("top level must be an object");

  RunConfig cfg;
  cfg.experiment = need_string(root, "", "experiment");
  const std::set<std::string> experiments{"evolve", "born", "lambda_sweep", "bell_scan"};
  if (!experiments.count(cfg.experiment))
    fail("'experiment' must be one of evolve, born, lambda_sweep, bell_scan");
  cfg.seed = need_count(root, "", "seed");
  if (root.contains("output_dir")) cfg.output_dir = need_string(root, "", "output_dir");

  if (cfg.experiment == "evolve") {
    reject_unknown(root, "", {"experiment", "seed", "output_dir", "grid", "physics",
                              "state", "evolution"});
    parse_scenario(root, cfg, false);
  } else if (cfg.experiment == "born") {
    reject_unknown(root, "", {"experiment", "seed", "output_dir", "grid", "physics",
                              "state", "evolution", "n_particles", "n_bins",
                              "sde_substeps"});
    parse_scenario(root, cfg, false);
    const auto n_particles = need_count(root, "", "n_particles");
    if (n_particles < 1) fail("n_particles must be ≥ 1");
    cfg.n_particles = static_cast<std::size_t>(n_particles);
    const auto n_bins = need_count(root, "", "n_bins");
    if (n_bins < 10) fail("'n_bins' must be >= 10");
    cfg.n_bins = static_cast<std::size_t>(n_bins);
    cfg.sde_substeps = cfg.scenario.evolution.record_every;
    if (root.contains("sde_substeps")) {
      const auto sub = need_count(root, "", "sde_substeps");
      if (sub < 1) fail("'sde_substeps' must be >= 1");
      cfg.sde_substeps = static_cast<std::size_t>(sub);
    }
  } else if (cfg.experiment == "lambda_sweep") {
    reject_unknown(root, "", {"experiment", "seed", "output_dir", "grid", "physics",
                              "state", "evolution", "lambda_values"});
    const json& lv = need(root, "", "lambda_values");
    if (!lv.is_array() || lv.empty())
      fail("'lambda_values' must be a non-empty array");
    for (const auto& v : lv) {
      if (!v.is_number()) fail("'lambda_values' must hold numbers");
      const double lam = v.get<double>();
      if (!(lam >= 0.0 && lam <= 1.0)) fail("'lambda_values' must lie in [0, 1]");
      cfg.lambda_values.push_back(lam);
    }
    parse_scenario(root, cfg, true);
    cfg.scenario.params.lambda = cfg.lambda_values.front();
    cfg.scenario.evolution.lambda = cfg.lambda_values.front();
  } else {
    reject_unknown(root, "", {"experiment", "seed", "output_dir", "bell"});
    cfg.bell = parse_bell(root);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string resolve_output_dir(const RunConfig& cfg, const std::string& cli_value) {
  if (!cli_value.empty()) return cli_value;
  if (const char* env = std::getenv("NELSIM_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

// ------------------------------------------------------------- experiments

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json potential_echo(const PotentialSpec& p) {
  json out;
  out["kind"] = p.name();
  switch (p.kind) {
    case PotentialSpec::Kind::free: break;
    case PotentialSpec::Kind::harmonic: out["omega"] = p.omega; break;
    case PotentialSpec::Kind::barrier:
      out["height"] = p.height;
      out["width"] = p.width;
      out["center"] = p.center;
      break;
    case PotentialSpec::Kind::custom_table: out["values"] = p.table; break;
  }
  return out;
}

json state_echo(const Scenario& sc) {
  json out;
  switch (sc.builder) {
    case Scenario::Builder::gaussian:
      out["kind"] = "gaussian";
      out["x0"] = sc.x0;
      out["s0"] = sc.s0;
      out["p0"] = sc.p0;
      break;
    case Scenario::Builder::coherent:
      out["kind"] = "coherent";
      out["x0"] = sc.x0;
      out["omega"] = sc.omega;
      break;
    case Scenario::Builder::superposition:
      out["kind"] = "superposition";
      out["packets"] = json::array({
          {{"x0", sc.x1}, {"s0", sc.s1}, {"p0", sc.p1}},
          {{"x0", sc.x2}, {"s0", sc.s2}, {"p0", sc.p2}},
      });
      break;
  }
  return out;
}

// Canonical echo of every physics input. Deliberately excludes output_dir,
// so runs of one config into different directories hash and compare equal.
json echo_inputs(const RunConfig& cfg) {
  json in;
  in["experiment"] = cfg.experiment;
  in["seed"] = cfg.seed;
  if (cfg.experiment == "bell_scan") {
    json b;
    b["family"] = cfg.bell.model.family_name();
    b["cutoff_scale"] = cfg.bell.model.lc;
    b["exponent"] = cfg.bell.model.exponent;
    b["angles"] = {{"a", cfg.bell.angles.a},
                   {"a_prime", cfg.bell.angles.a_prime},
                   {"b", cfg.bell.angles.b},
                   {"b_prime", cfg.bell.angles.b_prime}};
    b["separations"] = cfg.bell.separations;
    b["bound"] = cfg.bell.bound;
    in["bell"] = b;
    return in;
  }
  const Scenario& sc = cfg.scenario;
  in["grid"] = {{"x_min", sc.grid.x_min}, {"x_max", sc.grid.x_max}, {"n", sc.grid.n}};
  json phys;
  phys["mass"] = sc.params.mass;
  phys["hbar"] = sc.params.hbar;
  phys["potential"] = potential_echo(sc.params.potential);
  if (cfg.experiment == "lambda_sweep") {
    in["lambda_values"] = cfg.lambda_values;
  } else {
    phys["lambda"] = sc.params.lambda;
  }
  in["physics"] = phys;
  in["state"] = state_echo(sc);
  in["evolution"] = {{"dt", sc.evolution.dt},
                     {"n_steps", sc.evolution.n_steps},
                     {"record_every", sc.evolution.record_every}};
  if (cfg.experiment == "born") {
    in["n_particles"] = cfg.n_particles;
    in["n_bins"] = cfg.n_bins;
    in["sde_substeps"] = cfg.sde_substeps;
  }
  return in;
}

struct SeriesFile {
  std::string name;
  std::string header;  // comma-separated column names
  std::vector<std::string> rows;
};

struct ExperimentOutput {
  json results;
  std::vector<SeriesFile> series;
  std::string note;  // one stdout line
};

// Residuals of one interior snapshot, via a 3-snapshot window.
MadelungResiduals snapshot_residuals(const Trajectory& traj, std::size_t i,
                                     const PhysicalParams& params) {
  Trajectory window;
  window.times = {traj.times[i - 1], traj.times[i], traj.times[i + 1]};
  window.states = {traj.states[i - 1], traj.states[i], traj.states[i + 1]};
  return madelung_residuals(window, params);
}

ExperimentOutput run_evolve(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  const WaveField psi0 = sc.initial_state();
  const Trajectory traj = evolve(psi0, sc.params, sc.evolution);
  const double rho_floor = default_rho_floor(sc.grid);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  SeriesFile series;
  series.name = "evolve_series.csv";
  series.header =
      "time,mean,width,energy,norm_drift,masked_points,"
      "residual_continuity,residual_hj";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const WaveField& psi = traj.states[i];
    const auto pf = polar_decompose(psi, rho_floor, sc.params.hbar);
    MadelungResiduals res{nan, nan};
    if (i > 0 && i + 1 < traj.size()) res = snapshot_residuals(traj, i, sc.params);
    series.rows.push_back(fmt(traj.times[i]) + "," + fmt(mean_position(psi)) + "," +
                          fmt(position_width(psi)) + "," +
                          fmt(energy(psi, sc.params)) + "," +
                          fmt(traj.norm_drifts[i]) + "," +
                          std::to_string(pf.masked_count()) + "," +
                          fmt(res.continuity) + "," + fmt(res.hamilton_jacobi));
  }

  const MadelungResiduals res = madelung_residuals(traj, sc.params);
  const double e0 = energy(psi0, sc.params);
  const double ef = energy(traj.states.back(), sc.params);
  json results;
  results["sigma"] = sc.params.sigma();
  results["final_time"] = traj.times.back();
  results["initial_width"] = position_width(psi0);
  results["final_width"] = position_width(traj.states.back());
  results["final_mean"] = mean_position(traj.states.back());
  results["energy_initial"] = e0;
  results["energy_final"] = ef;
  results["energy_drift"] = std::abs(ef - e0);
  results["max_norm_drift"] = traj.max_norm_drift;
  results["max_masked_points"] = traj.max_masked_points;
  results["residual_continuity"] = res.continuity;
  results["residual_hj"] = res.hamilton_jacobi;

  ExperimentOutput out;
  out.results = std::move(results);
  out.series.push_back(std::move(series));
  out.note = "evolve: " + std::to_string(traj.size()) + " snapshots, final width " +
             fmt(position_width(traj.states.back()));
  return out;
}

ExperimentOutput run_born(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  const WaveField psi0 = sc.initial_state();
  const Trajectory traj = evolve(psi0, sc.params, sc.evolution);
  const WaveField& psi_final = traj.states.back();

  const ParticleEnsemble ens0 = sample_initial(psi0, cfg.n_particles, cfg.seed);
  const ParticleEnsemble ens =
      propagate_ensemble(ens0, traj, sc.params, cfg.sde_substeps);
  const ParticleEnsemble baseline =
      sample_initial(psi_final, cfg.n_particles, cfg.seed, rng_domain::kBaselineSample);
  const FitResult fit = born_fit(ens, psi_final, cfg.n_bins);
  const FitResult base_fit = born_fit(baseline, psi_final, cfg.n_bins);

  const Grid& grid = sc.grid;
  SeriesFile density;
  density.name = "born_density.csv";
  density.header = "x,rho_initial,rho_final";
  const auto rho0 = psi0.density();
  const auto rhof = psi_final.density();
  for (std::size_t j = 0; j < grid.n; ++j)
    density.rows.push_back(fmt(grid.x(j)) + "," + fmt(rho0[j]) + "," + fmt(rhof[j]));

  SeriesFile hist;
  hist.name = "born_histogram.csv";
  hist.header = "bin_lo,bin_hi,model_mass,sde_mass,baseline_mass";
  const double bin_w = grid.length() / static_cast<double>(cfg.n_bins);
  std::vector<double> sde_mass(cfg.n_bins, 0.0), base_mass(cfg.n_bins, 0.0);
  const double inv_n = 1.0 / static_cast<double>(cfg.n_particles);
  auto bin_of = [&](double x) {
    auto b = static_cast<std::size_t>((grid.wrap(x) - grid.x_min) / bin_w);
    return b >= cfg.n_bins ? cfg.n_bins - 1 : b;
  };
  for (double x : ens.positions) sde_mass[bin_of(x)] += inv_n;
  for (double x : baseline.positions) base_mass[bin_of(x)] += inv_n;
  for (std::size_t b = 0; b < cfg.n_bins; ++b) {
    const double lo = grid.x_min + static_cast<double>(b) * bin_w;
    const double hi = lo + bin_w;
    const double model = model_cdf(psi_final, hi) - model_cdf(psi_final, lo);
    hist.rows.push_back(fmt(lo) + "," + fmt(hi) + "," + fmt(model) + "," +
                        fmt(sde_mass[b]) + "," + fmt(base_mass[b]));
  }

  SeriesFile pos;
  pos.name = "born_positions.csv";
  pos.header = "particle,x_sde,x_baseline";
  for (std::size_t i = 0; i < ens.size(); ++i)
    pos.rows.push_back(std::to_string(i) + "," + fmt(ens.positions[i]) + "," +
                       fmt(baseline.positions[i]));

  json results;
  results["sigma"] = sc.params.sigma();
  results["final_time"] = traj.times.back();
  results["final_width"] = position_width(psi_final);
  results["n_particles"] = fit.n_particles;
  results["n_bins"] = fit.n_bins;
  results["sde_dt"] =
      sc.evolution.dt * static_cast<double>(sc.evolution.record_every) /
      static_cast<double>(cfg.sde_substeps);
  results["sde"] = {{"l1_distance", fit.l1_distance},
                    {"ks_statistic", fit.ks_statistic}};
  results["baseline"] = {{"l1_distance", base_fit.l1_distance},
                         {"ks_statistic", base_fit.ks_statistic}};
  if (base_fit.l1_distance > 0.0)
    results["l1_ratio"] = fit.l1_distance / base_fit.l1_distance;

  ExperimentOutput out;
  out.results = std::move(results);
  out.series.push_back(std::move(density));
  out.series.push_back(std::move(hist));
  out.series.push_back(std::move(pos));
  out.note = "born: l1 " + fmt(fit.l1_distance) + " (baseline " +
             fmt(base_fit.l1_distance) + "), ks " + fmt(fit.ks_statistic);
  return out;
}

ExperimentOutput run_lambda_sweep(const RunConfig& cfg) {
  Scenario sc = cfg.scenario;
  const WaveField psi0 = sc.initial_state();
  const double rho_floor = default_rho_floor(sc.grid);

  SeriesFile series;
  series.name = "lambda_sweep_series.csv";
  series.header = "lambda,final_width,residual_continuity,residual_hj,q_max";
  json rows = json::array();
  for (double lam : cfg.lambda_values) {
    sc.params.lambda = lam;
    sc.evolution.lambda = lam;
    const Trajectory traj = evolve(psi0, sc.params, sc.evolution);
    const MadelungResiduals res = madelung_residuals(traj, sc.params);
    const auto pf = polar_decompose(traj.states.back(), rho_floor, sc.params.hbar);
    const auto q = quantum_potential(pf, sc.params);
    double q_max = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j)
      if (pf.valid[j]) q_max = std::max(q_max, std::abs(q[j]));
    const double width = position_width(traj.states.back());

    series.rows.push_back(fmt(lam) + "," + fmt(width) + "," + fmt(res.continuity) +
                          "," + fmt(res.hamilton_jacobi) + "," + fmt(q_max));
    rows.push_back({{"lambda", lam},
                    {"final_width", width},
                    {"residual_continuity", res.continuity},
                    {"residual_hj", res.hamilton_jacobi},
                    {"q_max", q_max}});
  }

  json results;
  results["sigma"] = cfg.scenario.params.sigma();
  results["rows"] = std::move(rows);

  ExperimentOutput out;
  out.results = std::move(results);
  out.series.push_back(std::move(series));
  out.note = "lambda_sweep: " + std::to_string(cfg.lambda_values.size()) + " values";
  return out;
}

ExperimentOutput run_bell_scan(const RunConfig& cfg) {
  const auto& model = cfg.bell.model;
  const auto& angles = cfg.bell.angles;

  double l_star = 0.0;
  try {
    l_star = bell::critical_scale(model, angles, cfg.bell.bound);
  } catch (const std::domain_error& e) {
    // an uncrossable bound is a config problem, not a numerical one
    throw ConfigError(std::string("config: ") + e.what());
  }

  std::vector<double> ls = cfg.bell.separations;
  if (std::find(ls.begin(), ls.end(), l_star) == ls.end()) ls.push_back(l_star);
  std::sort(ls.begin(), ls.end());

  SeriesFile series;
  series.name = "bell_scan_series.csv";
  series.header = "l,e_ab,e_ab_prime,e_a_prime_b,e_a_prime_b_prime,s";
  for (double l : ls) {
    const auto r = bell::chsh(model, angles, l);
    series.rows.push_back(fmt(l) + "," + fmt(r.correlations[0]) + "," +
                          fmt(r.correlations[1]) + "," + fmt(r.correlations[2]) + "," +
                          fmt(r.correlations[3]) + "," + fmt(r.s_value));
  }

  json results;
  results["bound"] = cfg.bell.bound;
  results["l_star"] = l_star;
  results["s_at_l_star"] = bell::chsh(model, angles, l_star).s_value;
  results["s_at_smallest_l"] =
      bell::chsh(model, angles, cfg.bell.separations.front()).s_value;
  results["n_separations"] = cfg.bell.separations.size();

  ExperimentOutput out;
  out.results = std::move(results);
  out.series.push_back(std::move(series));
  out.note = "bell_scan: critical scale " + fmt(l_star);
  return out;
}

}  // namespace

void run_experiment(const RunConfig& cfg, const std::string& output_dir, bool quiet) {
  const auto t0 = std::chrono::steady_clock::now();

  const json inputs = echo_inputs(cfg);
  const std::string config_hash = hex64(fnv1a(inputs.dump()));

  ExperimentOutput out;
  if (cfg.experiment == "evolve") out = run_evolve(cfg);
  else if (cfg.experiment == "born") out = run_born(cfg);
  else if (cfg.experiment == "lambda_sweep") out = run_lambda_sweep(cfg);
  else out = run_bell_scan(cfg);

  json summary;
  summary["config_hash"] = config_hash;
  summary["experiment"] = cfg.experiment;
  summary["inputs"] = inputs;
  summary["results"] = out.results;
  summary["seed"] = cfg.seed;
  json names = json::array();
  for (const auto& s : out.series) names.push_back(s.name);
  summary["series_files"] = names;
  summary["versions"] = {{"format", kFormatVersion}, {"tool", kToolVersion}};

  // all computation done; now write, in a fixed order
  namespace fs = std::filesystem;
  const fs::path dir(output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("config: cannot create output dir '" + output_dir + "'");

  auto write_file = [&](const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("config: cannot write '" + p.string() + "'");
    f << content;
  };

  write_file(dir / "summary.json", summary.dump(2) + "\n");
  const std::string preamble = "# config_hash: " + config_hash +
                               "\n# seed: " + std::to_string(cfg.seed) +
                               "\n# tool_version: " + kToolVersion + "\n";
  for (const auto& s : out.series) {
    std::string text = preamble + s.header + "\n";
    for (const auto& row : s.rows) {
      text += row;
      text += '\n';
    }
    write_file(dir / s.name, text);
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char secs_buf[32];
  std::snprintf(secs_buf, sizeof secs_buf, "%.3f", secs);
  write_file(dir / "run.log", "experiment: " + cfg.experiment +
                                  "\ntool_version: " + kToolVersion +
                                  "\nwall_clock_seconds: " + secs_buf + "\n");

  if (!quiet) {
    std::cout << out.note << "\n";
    std::cout << "wrote " << (dir / "summary.json").string();
    for (const auto& s : out.series) std::cout << ", " << (dir / s.name).string();
    std::cout << " (" << secs_buf << " s)\n";
  }
}

}  // namespace nelsim
