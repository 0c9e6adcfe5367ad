#include "entperc/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <system_error>
#include <tuple>

#include "entperc/disorder.hpp"
#include "entperc/dynamics.hpp"
#include "entperc/errors.hpp"
#include "entperc/frequency.hpp"
#include "entperc/lattice.hpp"
#include "entperc/mean_field.hpp"
#include "entperc/parallel.hpp"
#include "entperc/percolation.hpp"
#include "entperc/rng.hpp"
#include "entperc/two_colour.hpp"

namespace entperc::experiment {

namespace fs = std::filesystem;

namespace {

constexpr std::array kSubcommands = {"simulate", "two-colour", "meanfield", "correlations", "analytic-p", "lattice-dump"};
constexpr std::array kModels = {"uniform", "gaussian", "bernoulli", "exponential", "threshold"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

template <std::size_t N>
std::string join(const std::array<const char*, N>& items) {
  return join(std::vector<std::string>(items.begin(), items.end()));
}

const Json& default_times() {
  static const Json times = {{"start", 0.0}, {"stop", 30.0}, {"count", 600}};
  return times;
}

bool is_integral(const Json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15;
}

// A list of reals: a number, an array of numbers, or {"start", "stop", "count"}
// (count evenly spaced points including both ends).
std::vector<double> expand_grid(const Json& spec, const std::string& key) {
  auto bad = [&] {
    return ConfigError("key " + key + ": expected a number, an array of numbers or {\"start\", \"stop\", \"count\"}");
  };
  if (spec.is_number()) return {spec.get<double>()};
  if (spec.is_array()) {
    std::vector<double> out;
    for (const auto& v : spec) {
      if (!v.is_number()) throw bad();
      out.push_back(v.get<double>());
    }
    if (out.empty()) throw ConfigError("key " + key + ": empty list");
    return out;
  }
  if (spec.is_object()) {
    for (const auto& [k, v] : spec.items())
      if (k != "start" && k != "stop" && k != "count") throw ConfigError("key " + key + ": unknown field " + k);
    if (!spec.contains("start") || !spec.contains("stop") || !spec.contains("count")) throw bad();
    const Json& a = spec["start"];
    const Json& b = spec["stop"];
    const Json& n = spec["count"];
    if (!a.is_number() || !b.is_number() || !is_integral(n)) throw bad();
    const auto count = n.get<std::int64_t>();
    if (count < 1) throw ConfigError("key " + key + ": count must be >= 1");
    const double start = a.get<double>(), stop = b.get<double>();
    std::vector<double> out(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] =
          count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
  }
  throw bad();
}

// Pulls typed keys out of a raw config, materializing defaults into
// `resolved`. Keys never requested are reported as unknown by finish().
class Reader {
 public:
  explicit Reader(const Json& raw) : raw_(raw) {
    if (!raw.is_object()) throw ConfigError("config must be a JSON object");
  }

  bool has(const std::string& key) const { return raw_.contains(key); }

  std::optional<Json> take(const std::string& key, const std::optional<Json>& def) {
    seen_.insert(key);
    if (raw_.contains(key) && !raw_[key].is_null()) return raw_[key];
    if (def) return *def;
    missing_.push_back(key);
    return std::nullopt;
  }

  double number(const std::string& key, std::optional<double> def) {
    auto v = take(key, def ? std::optional<Json>(*def) : std::nullopt);
    if (!v) return 0.0;
    if (!v->is_number()) throw ConfigError("key " + key + ": expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError("key " + key + ": must be finite");
    resolved[key] = d;
    return d;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> def) {
    auto v = take(key, def ? std::optional<Json>(*def) : std::nullopt);
    if (!v) return 0;
    if (!is_integral(*v)) throw ConfigError("key " + key + ": expected an integer");
    const auto i = v->is_number_float() ? static_cast<std::int64_t>(v->get<double>()) : v->get<std::int64_t>();
    resolved[key] = i;
    return i;
  }

  std::uint64_t seed(const std::string& key) {
    auto v = take(key, Json(0));
    if (v->is_number_unsigned()) {
      resolved[key] = v->get<std::uint64_t>();
    } else if (is_integral(*v) && v->get<double>() >= 0.0) {
      resolved[key] = static_cast<std::uint64_t>(v->get<double>());
    } else {
      throw ConfigError("key " + key + ": expected a nonnegative integer");
    }
    return resolved[key].get<std::uint64_t>();
  }

  bool boolean(const std::string& key, std::optional<bool> def) {
    auto v = take(key, def ? std::optional<Json>(*def) : std::nullopt);
    if (!v) return false;
    if (!v->is_boolean()) throw ConfigError("key " + key + ": expected true or false");
    resolved[key] = v->get<bool>();
    return v->get<bool>();
  }

  std::optional<std::string> text(const std::string& key, std::optional<std::string> def,
                                  std::initializer_list<const char*> choices = {}) {
    auto v = take(key, def ? std::optional<Json>(*def) : std::nullopt);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError("key " + key + ": expected a string");
    const auto s = v->get<std::string>();
    if (choices.size() > 0 && std::find(choices.begin(), choices.end(), s) == choices.end()) {
      std::vector<std::string> names(choices.begin(), choices.end());
      throw ConfigError("key " + key + ": unknown value " + s + " (expected one of " + join(names) + ")");
    }
    resolved[key] = s;
    return s;
  }

  std::vector<double> grid(const std::string& key, std::optional<Json> def, bool sorted = false) {
    auto v = take(key, def);
    if (!v) return {};
    auto values = expand_grid(*v, key);
    if (sorted && !std::is_sorted(values.begin(), values.end()))
      throw ConfigError("key " + key + ": values must be sorted");
    resolved[key] = *v;
    return values;
  }

  void finish() const {
    if (!missing_.empty()) throw ConfigError("missing required keys: " + join(missing_));
    std::vector<std::string> unknown;
    for (const auto& [k, v] : raw_.items())
      if (!seen_.contains(k)) unknown.push_back(k);
    if (!unknown.empty()) throw ConfigError("unknown keys: " + join(unknown));
  }

  Json resolved = Json::object();

 private:
  const Json& raw_;
  std::set<std::string> seen_;
  std::vector<std::string> missing_;
};

void read_lattice(Reader& r, bool required) {
  const std::optional<std::string> none = required ? std::nullopt : std::optional<std::string>("square");
  r.text("topology", none, {"square", "triangular"});
  const auto L = r.integer("L", required ? std::nullopt : std::optional<std::int64_t>(256));
  if (r.resolved.contains("L") && L < 2) throw ConfigError("key L: must be >= 2");
  r.text("boundary", "periodic", {"periodic", "open"});
}

void read_model_params(Reader& r, const std::string& model) {
  if (model == "uniform") {
    r.number("omega", 1.0);
  } else if (model == "gaussian") {
    r.number("mean", 1.0);
    r.number("stddev", 0.1);
  } else if (model == "bernoulli") {
    r.number("eta", 0.5);
    r.number("omega1", 1.0);
    r.number("omega2", 2.0);
  } else if (model == "exponential") {
    r.number("amplitude", 2.0);
    r.number("decay_length", 2.0);
  } else if (model == "threshold") {
    r.number("omega1", 1.0);
    r.number("omega2", 2.0);
    r.number("threshold", 1.0);
  }
}

void read_simulate(Reader& r) {
  const auto mode = r.text("mode", "trajectory", {"trajectory", "static"});
  read_lattice(r, true);
  if (mode == "static") {
    r.grid("p_grid", Json{{"start", 0.0}, {"stop", 1.0}, {"count", 101}}, true);
    if (r.integer("n_samples", 20) < 1) throw ConfigError("key n_samples: must be >= 1");
    return;
  }
  r.number("sigma", 0.0);
  const auto model = r.text("model", std::nullopt,
                            {kModels[0], kModels[1], kModels[2], kModels[3], kModels[4]});
  if (model) read_model_params(r, *model);
  r.grid("times", std::nullopt, true);
  if (r.integer("n_disorder", 1) < 1) throw ConfigError("key n_disorder: must be >= 1");
  if (r.integer("n_activation", 1) < 1) throw ConfigError("key n_activation: must be >= 1");
  r.boolean("reshuffle", false);
  r.boolean("coupled", false);
}

void read_two_colour(Reader& r) {
  const auto mode = r.text("mode", "sweep", {"sweep", "dynamic"});
  r.integer("L", 256);
  if (r.integer("n_samples", 20) < 1) throw ConfigError("key n_samples: must be >= 1");
  r.boolean("constrained", true);
  if (mode == "sweep") {
    r.number("grid_step", 0.02);
  } else {
    r.number("ratio", 2.0);
    r.grid("times", default_times(), true);
  }
}

void read_meanfield(Reader& r) {
  const auto mode = r.text("mode", "grid", {"point", "grid", "critical-line", "dynamic"});
  if (mode == "critical-line") {
    if (r.integer("n_points", 101) < 2) throw ConfigError("key n_points: must be >= 2");
    return;
  }
  if (r.number("tol", kMeanFieldTolerance) <= 0.0) throw ConfigError("key tol: must be > 0");
  if (r.integer("max_iter", kMeanFieldMaxIter) < 1) throw ConfigError("key max_iter: must be >= 1");
  if (mode == "point") {
    r.number("phi1", std::nullopt);
    r.number("phi2", std::nullopt);
  } else if (mode == "grid") {
    r.number("grid_step", 0.02);
  } else {
    r.number("ratio", 2.0);
    r.grid("times", default_times(), true);
  }
}

void read_correlations(Reader& r) {
  r.grid("sigma", std::nullopt);
  r.grid("lambda", std::nullopt);
  if (r.integer("n_samples", 1'000'000) < 1) throw ConfigError("key n_samples: must be >= 1");
}

void read_analytic(Reader& r) {
  const auto kind = r.text("kind", std::nullopt,
                           {"uniform", "bernoulli", "gaussian", "gaussian-asymptotic", "gaussian-numeric"});
  if (kind) {
    if (*kind == "uniform") {
      r.number("omega", 1.0);
    } else if (*kind == "bernoulli") {
      r.number("eta", std::nullopt);
      r.number("omega1", std::nullopt);
      r.number("omega2", std::nullopt);
    } else {
      r.number("mean", 1.0);
      r.number("stddev", std::nullopt);
      if (*kind == "gaussian" && r.integer("k_max", kDefaultSeriesTerms) < 1)
        throw ConfigError("key k_max: must be >= 1");
      if (*kind == "gaussian-numeric" && r.number("tolerance", 1e-10) <= 0.0)
        throw ConfigError("key tolerance: must be > 0");
    }
  }
  r.grid("times", default_times(), true);
}

void read_lattice_dump(Reader& r) {
  read_lattice(r, true);
  r.number("sigma", 0.0);
  const auto model = r.text("model", "none",
                            {"none", kModels[0], kModels[1], kModels[2], kModels[3], kModels[4]});
  if (model) read_model_params(r, *model);
}

LatticeSpec lattice_from(const Json& c) {
  LatticeSpec spec{parse_topology(c["topology"].get<std::string>()), c["L"].get<std::int64_t>(),
                   parse_boundary(c["boundary"].get<std::string>())};
  spec.validate();
  return spec;
}

freq::ModelSpec model_from(const Json& c) {
  const auto m = c["model"].get<std::string>();
  if (m == "uniform") return freq::Uniform{c["omega"].get<double>()};
  if (m == "gaussian") return freq::GaussianIid{c["mean"].get<double>(), c["stddev"].get<double>()};
  if (m == "bernoulli")
    return freq::BernoulliIid{c["eta"].get<double>(), c["omega1"].get<double>(), c["omega2"].get<double>()};
  if (m == "exponential")
    return freq::ExponentialDistance{c["amplitude"].get<double>(), c["decay_length"].get<double>()};
  if (m == "threshold")
    return freq::ThresholdDistance{c["omega1"].get<double>(), c["omega2"].get<double>(),
                                   c["threshold"].get<double>()};
  throw ConfigError("unknown model " + m);
}

void check_budget(double cost, double budget) {
  if (cost > budget)
    throw BudgetError("run needs " + std::to_string(std::llround(cost)) + " node-evaluations, budget is " +
                      std::to_string(std::llround(budget)));
}

std::string stem(const Json& c) { return c["name"].get<std::string>(); }
unsigned threads_of(const Json& c) { return static_cast<unsigned>(c["threads"].get<std::int64_t>()); }
std::uint64_t seed_of(const Json& c) { return c["master_seed"].get<std::uint64_t>(); }

std::vector<Table> exec_simulate(const Json& c) {
  const LatticeSpec spec = lattice_from(c);
  const double budget = c["budget"].get<double>();
  if (c["mode"] == "static") {
    const auto grid = expand_grid(c["p_grid"], "p_grid");
    const auto n = c["n_samples"].get<std::int64_t>();
    check_budget(static_cast<double>(spec.node_count()) * static_cast<double>(grid.size()) * static_cast<double>(n),
                 budget);
    const auto curve = static_percolation_curve(spec, grid, static_cast<int>(n), seed_of(c), threads_of(c));
    Table t{stem(c), {"p", "P0", "stderr_P", "p_hat"}, {}};
    for (const auto& pt : curve) t.rows.push_back({pt.p, pt.P, pt.stderr_P, pt.p_hat});
    return {t};
  }
  TrajectoryConfig tc;
  tc.lattice = spec;
  tc.sigma = c["sigma"].get<double>();
  tc.model = model_from(c);
  tc.times = expand_grid(c["times"], "times");
  tc.n_disorder = static_cast<int>(c["n_disorder"].get<std::int64_t>());
  tc.n_activation = static_cast<int>(c["n_activation"].get<std::int64_t>());
  tc.seed = seed_of(c);
  tc.reshuffle = c["reshuffle"].get<bool>();
  tc.coupled = c["coupled"].get<bool>();
  tc.threads = threads_of(c);
  tc.budget = budget;
  const TrajectoryRecord rec = run_trajectory(tc);
  Table t{stem(c), {"t", "p_hat", "P_hat", "stderr_P"}, {}};
  for (std::size_t i = 0; i < rec.size(); ++i) t.rows.push_back({rec.times[i], rec.p_hat[i], rec.P_hat[i], rec.stderr_P[i]});
  return {t};
}

std::vector<Table> exec_two_colour(const Json& c) {
  SurfaceConfig sc;
  sc.L = c["L"].get<std::int64_t>();
  sc.n_samples = static_cast<int>(c["n_samples"].get<std::int64_t>());
  sc.constrained = c["constrained"].get<bool>();
  sc.seed = seed_of(c);
  sc.threads = threads_of(c);
  sc.budget = c["budget"].get<double>();
  if (c["mode"] == "sweep") {
    const PhaseDiagram d = sweep_phase_diagram(sc, c["grid_step"].get<double>());
    Table t{stem(c), {"phi1", "phi2", "S", "stderr"}, {}};
    for (std::size_t i = 0; i < d.phi1_grid.size(); ++i)
      for (std::size_t j = 0; j < d.phi2_grid.size(); ++j)
        t.rows.push_back({d.phi1_grid[i], d.phi2_grid[j], d.at(i, j), d.std_error[i * d.phi2_grid.size() + j]});
    return {t};
  }
  const auto times = expand_grid(c["times"], "times");
  const TwoColourTrajectory tr = dynamic_two_colour(sc, c["ratio"].get<double>(), times);
  Table t{stem(c), {"t", "phi1", "phi2", "p", "P", "stderr_P"}, {}};
  for (std::size_t i = 0; i < tr.gamma.size(); ++i) {
    const auto& g = tr.gamma[i];
    t.rows.push_back({g.t, g.phi1, g.phi2, g.p, tr.P[i], tr.stderr_P[i]});
  }
  return {t};
}

std::vector<Table> exec_meanfield(const Json& c) {
  const auto mode = c["mode"].get<std::string>();
  if (mode == "critical-line") {
    const auto n = c["n_points"].get<std::int64_t>();
    Table t{stem(c), {"phi1", "phi2", "Lambda"}, {}};
    for (std::int64_t i = 0; i < n; ++i) {
      const double a = static_cast<double>(i) / static_cast<double>(n - 1);
      const double b = critical_line_phi2(a);
      t.rows.push_back({a, b, jacobian_eigenvalue(a, b)});
    }
    return {t};
  }
  const double tol = c["tol"].get<double>();
  const auto max_iter = c["max_iter"].get<std::int64_t>();
  const std::vector<std::string> surface_cols = {"phi1", "phi2", "S", "stderr", "m1", "m2", "converged"};
  auto surface_row = [](const MeanFieldSolution& s) {
    return std::vector<double>{s.phi1, s.phi2, s.S, 0.0, s.m1, s.m2, s.converged ? 1.0 : 0.0};
  };
  if (mode == "point") {
    const auto s = solve_fixed_point(c["phi1"].get<double>(), c["phi2"].get<double>(), tol, max_iter);
    if (!s.converged)
      throw ConvergenceError("mean-field iteration did not converge within " + std::to_string(max_iter) +
                             " iterations");
    return {Table{stem(c), surface_cols, {surface_row(s)}}};
  }
  if (mode == "grid") {
    const auto grid = unit_grid(c["grid_step"].get<double>());
    const std::size_t n = grid.size();
    std::vector<MeanFieldSolution> sols(n * n);
    parallel_for(n * n, threads_of(c),
                 [&](std::size_t k, unsigned) { sols[k] = solve_fixed_point(grid[k / n], grid[k % n], tol, max_iter); });
    Table t{stem(c), surface_cols, {}};
    for (const auto& s : sols) t.rows.push_back(surface_row(s));
    return {t};
  }
  const auto times = expand_grid(c["times"], "times");
  Table t{stem(c), {"t", "phi1", "phi2", "p", "P", "stderr_P", "P_uniform", "converged"}, {}};
  for (const auto& pt : meanfield_dynamic(c["ratio"].get<double>(), times, tol, max_iter))
    t.rows.push_back({pt.t, pt.phi1, pt.phi2, pt.p, pt.P, 0.0, pt.P_uniform, pt.converged ? 1.0 : 0.0});
  return {t};
}

std::vector<Table> exec_correlations(const Json& c) {
  const auto sigmas = expand_grid(c["sigma"], "sigma");
  const auto lambdas = expand_grid(c["lambda"], "lambda");
  const auto n = static_cast<std::uint64_t>(c["n_samples"].get<std::int64_t>());
  const std::size_t cells = sigmas.size() * lambdas.size();
  check_budget(4.0 * static_cast<double>(n) * static_cast<double>(cells), c["budget"].get<double>());
  std::vector<CorrelationStats> stats(cells);
  const std::uint64_t master = seed_of(c);
  parallel_for(cells, threads_of(c), [&](std::size_t k, unsigned) {
    stats[k] = correlation_stats(sigmas[k / lambdas.size()], lambdas[k % lambdas.size()], n,
                                 derive_seed(master, {tag(StreamTag::motif), k}));
  });
  Table t{stem(c), {"sigma", "lambda", "eta", "beta_par", "beta_perp", "rho_par", "rho_perp", "n_samples"}, {}};
  for (const auto& s : stats)
    t.rows.push_back({s.sigma, s.lambda, s.eta, s.beta_par, s.beta_perp, s.rho_par, s.rho_perp,
                      static_cast<double>(s.n_samples)});
  return {t};
}

std::vector<Table> exec_analytic(const Json& c) {
  const auto kind = c["kind"].get<std::string>();
  const auto times = expand_grid(c["times"], "times");
  Table t{stem(c), {"t", "p"}, {}};
  std::optional<FrequencyDensity> density;
  if (kind == "gaussian-numeric") {
    const double sd = c["stddev"].get<double>();
    if (!(sd > 0.0)) throw ConfigError("key stddev: gaussian-numeric needs stddev > 0");
    density = gaussian_density(c["mean"].get<double>(), sd);
  }
  if (kind == "bernoulli") {
    const double eta = c["eta"].get<double>();
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("key eta: must lie in [0, 1]");
  }
  if ((kind == "gaussian" || kind == "gaussian-asymptotic") && !(c["stddev"].get<double>() >= 0.0))
    throw ConfigError("key stddev: must be >= 0");
  for (double tv : times) {
    double p = 0.0;
    if (kind == "uniform") {
      p = conversion_probability(c["omega"].get<double>(), tv);
    } else if (kind == "bernoulli") {
      p = p_bernoulli(tv, c["eta"].get<double>(), c["omega1"].get<double>(), c["omega2"].get<double>());
    } else if (kind == "gaussian") {
      p = p_gaussian(tv, c["mean"].get<double>(), c["stddev"].get<double>(),
                     static_cast<int>(c["k_max"].get<std::int64_t>()));
    } else if (kind == "gaussian-asymptotic") {
      p = p_asymptotic_gaussian(tv, c["mean"].get<double>(), c["stddev"].get<double>());
    } else {
      p = p_numeric(*density, tv, c["tolerance"].get<double>());
    }
    t.rows.push_back({tv, p});
  }
  return {t};
}

std::vector<Table> exec_lattice_dump(const Json& c) {
  const LatticeSpec spec = lattice_from(c);
  check_budget(static_cast<double>(spec.node_count()), c["budget"].get<double>());
  const std::uint64_t seed = seed_of(c);
  const PerturbedLattice lattice = perturb(generate_lattice(spec), c["sigma"].get<double>(), seed);
  Table nodes{stem(c) + "_nodes", {"node", "x", "y"}, {}};
  const auto pos = lattice.positions();
  for (std::size_t i = 0; i < pos.size(); ++i) nodes.rows.push_back({static_cast<double>(i), pos[i].x, pos[i].y});
  Table edges{stem(c) + "_edges", {"edge", "a", "b", "length"}, {}};
  const auto es = lattice.edges();
  const auto len = lattice.lengths();
  for (std::size_t e = 0; e < es.size(); ++e)
    edges.rows.push_back({static_cast<double>(e), static_cast<double>(es[e].a), static_cast<double>(es[e].b), len[e]});
  std::vector<Table> out{nodes, edges};
  if (c["model"] != "none") {
    const FrequencyAssignment fa = assign(lattice, model_from(c), seed);
    Table f{stem(c) + "_frequencies", {"edge", "omega"}, {}};
    for (std::size_t e = 0; e < fa.omegas.size(); ++e) f.rows.push_back({static_cast<double>(e), fa.omegas[e]});
    out.push_back(std::move(f));
  }
  return out;
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomically(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::size_t count_nonconverged(const std::vector<Table>& tables) {
  std::size_t n = 0;
  for (const auto& t : tables) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), "converged");
    if (it == t.columns.end()) continue;
    const auto col = static_cast<std::size_t>(it - t.columns.begin());
    for (const auto& row : t.rows)
      if (row[col] == 0.0) ++n;
  }
  return n;
}

// Writes every table, then the manifest; removes what was written on failure.
RunSummary write_bundle(const fs::path& dir, const std::string& manifest_stem, const std::vector<Table>& tables,
                        Json manifest) {
  std::set<std::string> names;
  for (const auto& t : tables)
    if (!names.insert(t.name).second) throw ConfigError("duplicate output name " + t.name);

  RunSummary summary;
  summary.manifest = dir / (manifest_stem + ".manifest.json");
  summary.nonconverged = count_nonconverged(tables);
  try {
    fs::create_directories(dir);
    Json outputs = Json::array();
    for (const auto& t : tables) {
      const std::string csv = to_csv(t);
      const fs::path path = dir / (t.name + ".csv");
      write_atomically(path, csv);
      summary.outputs.push_back(path);
      outputs.push_back({{"file", path.filename().string()},
                         {"columns", t.columns},
                         {"rows", t.rows.size()},
                         {"bytes", csv.size()},
                         {"sha256", sha256_hex(csv)}});
    }
    manifest["outputs"] = outputs;
    manifest["nonconverged_points"] = summary.nonconverged;
    write_atomically(summary.manifest, manifest.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    for (const auto& p : summary.outputs) fs::remove(p, ec);
    throw;
  }
  return summary;
}

Json manifest_header() {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"started_utc", utc_now()}};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

fs::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "entperc-out";
}

Json resolve_config(const Json& raw) {
  Reader r(raw);
  const auto sub = r.text("subcommand", std::nullopt,
                          {kSubcommands[0], kSubcommands[1], kSubcommands[2], kSubcommands[3], kSubcommands[4],
                           kSubcommands[5]});
  r.seed("master_seed");
  r.text("output_dir", default_output_dir().string());
  if (r.number("budget", 1e12) <= 0.0) throw ConfigError("key budget: must be > 0");
  if (r.integer("threads", 0) < 0) throw ConfigError("key threads: must be >= 0");
  if (sub) {
    const auto name = r.text("name", *sub);
    if (name->empty() || name->find('/') != std::string::npos) throw ConfigError("key name: must be a plain file stem");
    if (*sub == "simulate") read_simulate(r);
    if (*sub == "two-colour") read_two_colour(r);
    if (*sub == "meanfield") read_meanfield(r);
    if (*sub == "correlations") read_correlations(r);
    if (*sub == "analytic-p") read_analytic(r);
    if (*sub == "lattice-dump") read_lattice_dump(r);
  }
  r.finish();
  return r.resolved;
}

Json parse_override(std::string_view text) {
  Json v = Json::parse(text, nullptr, false);
  if (v.is_discarded()) return std::string(text);
  return v;
}

std::vector<Table> execute(const Json& c) {
  const auto sub = c["subcommand"].get<std::string>();
  if (sub == "simulate") return exec_simulate(c);
  if (sub == "two-colour") return exec_two_colour(c);
  if (sub == "meanfield") return exec_meanfield(c);
  if (sub == "correlations") return exec_correlations(c);
  if (sub == "analytic-p") return exec_analytic(c);
  if (sub == "lattice-dump") return exec_lattice_dump(c);
  throw ConfigError("unknown subcommand " + sub);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += format_real(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

RunSummary run(const Json& raw) {
  const auto start = std::chrono::steady_clock::now();
  Json manifest = manifest_header();
  const Json config = resolve_config(raw);
  const auto tables = execute(config);
  manifest["config"] = config;
  manifest["wall_clock_seconds"] = seconds_since(start);
  return write_bundle(config["output_dir"].get<std::string>(), config["name"].get<std::string>(), tables, manifest);
}

namespace {

struct Scale {
  bool full;
  std::int64_t L() const { return full ? 1000 : 256; }
  std::int64_t n_disorder() const { return full ? 10 : 4; }
  std::int64_t n_activation() const { return full ? 100 : 20; }
  std::int64_t colour_samples() const { return full ? 100 : 20; }
  std::int64_t motif_samples() const { return full ? 1'000'000 : 100'000; }
};

std::string label(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

Json simulate_run(const std::string& name, const Scale& s, Json model) {
  Json run = {{"subcommand", "simulate"},
              {"name", name},
              {"topology", "square"},
              {"L", s.L()},
              {"times", default_times()},
              {"n_disorder", s.n_disorder()},
              {"n_activation", s.n_activation()}};
  run.update(model);
  return run;
}

Json static_run(const std::string& name, const Scale& s) {
  return {{"subcommand", "simulate"}, {"name", name},  {"mode", "static"},
          {"topology", "square"},     {"L", s.L()},    {"p_grid", {{"start", 0.0}, {"stop", 1.0}, {"count", 101}}},
          {"n_samples", s.n_activation()}};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
}

Json preset(std::string_view name, bool full, const Json& overrides) {
  const Scale s{full};
  Json runs = Json::array();
  std::string caption;
  if (name == "fig2") {
    caption =
        "Square lattice with i.i.d. Gaussian frequencies (mean 1, sigma_omega in {0, 0.1, 0.2, 0.3}): p(t) and P(t) "
        "averaged over disorder and activation realizations, plus the uniform bond percolation reference P0(p).";
    for (double sd : {0.0, 0.1, 0.2, 0.3})
      runs.push_back(simulate_run("fig2_sigma_omega_" + label(sd), s, {{"model", "gaussian"}, {"mean", 1.0}, {"stddev", sd}}));
    runs.push_back(static_run("fig2_P0", s));
  } else if (name == "fig3") {
    caption =
        "Perturbed square lattice with distance-dependent frequencies omega(d) = 2 exp(-d/2), noise sigma in {0.1, "
        "0.2}: p(t), P(t) and the parametric P(p).";
    for (double sg : {0.1, 0.2})
      runs.push_back(simulate_run("fig3_sigma_" + label(sg), s,
                                  {{"model", "exponential"}, {"amplitude", 2.0}, {"decay_length", 2.0}, {"sigma", sg}}));
  } else if (name == "fig4") {
    caption =
        "Perturbed square lattice with two-valued threshold frequencies (lambda = 1): sigma = 0.1 with ratio 2 and "
        "sigma = 0.2 with ratio 5/2, correlated and reshuffled (uncorrelated) runs.";
    for (auto [sg, ratio] : {std::pair{0.1, 2.0}, std::pair{0.2, 2.5}}) {
      for (bool reshuffled : {false, true}) {
        Json run = simulate_run("fig4_sigma_" + label(sg) + "_ratio_" + label(ratio) + (reshuffled ? "_U" : "_C"), s,
                                {{"model", "threshold"},
                                 {"omega1", 1.0},
                                 {"omega2", ratio},
                                 {"threshold", 1.0},
                                 {"sigma", sg},
                                 {"reshuffle", reshuffled}});
        runs.push_back(run);
      }
    }
  } else if (name == "fig5") {
    caption =
        "Two-colour bond percolation on the square lattice: S(phi1, phi2) on a 1/50 grid for the alternating and the "
        "reshuffled colourings, and P(t) along phi1 = 1-|cos t|, phi2 = 1-|cos(ratio t)| for ratio in {2, 5/2}.";
    for (bool constrained : {true, false}) {
      runs.push_back({{"subcommand", "two-colour"},
                      {"name", std::string("fig5_sweep_") + (constrained ? "C" : "U")},
                      {"mode", "sweep"},
                      {"L", s.L()},
                      {"n_samples", s.colour_samples()},
                      {"constrained", constrained},
                      {"grid_step", 0.02}});
    }
    for (double ratio : {2.0, 2.5})
      for (bool constrained : {true, false})
        runs.push_back({{"subcommand", "two-colour"},
                        {"name", "fig5_dynamic_ratio_" + label(ratio) + (constrained ? "_C" : "_U")},
                        {"mode", "dynamic"},
                        {"L", s.L()},
                        {"n_samples", s.colour_samples()},
                        {"constrained", constrained},
                        {"ratio", ratio},
                        {"times", default_times()}});
  } else if (name == "fig6") {
    caption =
        "Four-node motif statistics of the perturbed lattice over (sigma, lambda): eta = P[d > lambda], joint "
        "probabilities and Pearson coefficients of collinear and perpendicular edge pairs.";
    runs.push_back({{"subcommand", "correlations"},
                    {"name", "fig6_correlations"},
                    {"sigma", {{"start", 0.02}, {"stop", 0.3}, {"count", 15}}},
                    {"lambda", {{"start", 0.7}, {"stop", 1.3}, {"count", 31}}},
                    {"n_samples", s.motif_samples()}});
  } else if (name == "fig7") {
    caption =
        "Expected active fraction p(t) for i.i.d. two-valued frequencies: (eta, ratio) in {(1/4, 2), (1/2, 2), (1/2, "
        "5/2), (1/2, pi)}; periodic for rational ratios, quasi-periodic for pi.";
    for (auto [eta, ratio, tag] : {std::tuple{0.25, 2.0, "eta_0.25_ratio_2"}, std::tuple{0.5, 2.0, "eta_0.5_ratio_2"},
                                   std::tuple{0.5, 2.5, "eta_0.5_ratio_2.5"},
                                   std::tuple{0.5, std::numbers::pi, "eta_0.5_ratio_pi"}})
      runs.push_back({{"subcommand", "analytic-p"},
                      {"name", std::string("fig7_") + tag},
                      {"kind", "bernoulli"},
                      {"eta", eta},
                      {"omega1", 1.0},
                      {"omega2", ratio},
                      {"times", default_times()}});
  } else if (name == "fig8") {
    caption =
        "Expected active fraction p(t) for i.i.d. Gaussian frequencies (mean 1, sigma_omega in {0.1, 0.2, 0.3}): "
        "Fourier series, leading asymptotic form and direct quadrature.";
    for (double sd : {0.1, 0.2, 0.3})
      for (const char* kind : {"gaussian", "gaussian-asymptotic", "gaussian-numeric"})
        runs.push_back({{"subcommand", "analytic-p"},
                        {"name", "fig8_" + std::string(kind) + "_sigma_omega_" + label(sd)},
                        {"kind", kind},
                        {"mean", 1.0},
                        {"stddev", sd},
                        {"times", default_times()}});
  } else if (name == "fig9") {
    caption =
        "Mean-field two-colour percolation on a 4-regular random graph: S(phi1, phi2) on a 1/50 grid, the critical "
        "line Lambda = 1, and P(t) along the dynamical curves for ratio in {2, 5/2}.";
    runs.push_back({{"subcommand", "meanfield"}, {"name", "fig9_grid"}, {"mode", "grid"}, {"grid_step", 0.02}});
    runs.push_back({{"subcommand", "meanfield"}, {"name", "fig9_critical_line"}, {"mode", "critical-line"}});
    for (double ratio : {2.0, 2.5})
      runs.push_back({{"subcommand", "meanfield"},
                      {"name", "fig9_dynamic_ratio_" + label(ratio)},
                      {"mode", "dynamic"},
                      {"ratio", ratio},
                      {"times", default_times()}});
  } else {
    std::vector<std::string> names = preset_names();
    throw ConfigError("unknown preset " + std::string(name) + " (expected one of " + join(names) + ")");
  }
  if (!overrides.is_object()) throw ConfigError("preset overrides must be an object");
  for (auto& run : runs)
    for (const auto& [k, v] : overrides.items()) run[k] = v;
  return {{"preset", name}, {"caption", caption}, {"full", full}, {"runs", runs}};
}

RunSummary run_preset(std::string_view name, bool full, const Json& overrides) {
  const auto start = std::chrono::steady_clock::now();
  Json manifest = manifest_header();
  const Json def = preset(name, full, overrides);
  Json resolved = Json::array();
  for (const auto& raw : def["runs"]) resolved.push_back(resolve_config(raw));
  std::vector<Table> tables;
  for (const auto& c : resolved)
    for (auto& t : execute(c)) tables.push_back(std::move(t));
  manifest["preset"] = def["preset"];
  manifest["caption"] = def["caption"];
  manifest["full"] = full;
  manifest["runs"] = resolved;
  manifest["wall_clock_seconds"] = seconds_since(start);
  return write_bundle(resolved.front()["output_dir"].get<std::string>(), std::string(name), tables, manifest);
}

VerifyReport verify_manifest(const fs::path& manifest_path, bool rerun) {
  const Json manifest = Json::parse(read_file(manifest_path), nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object() || !manifest.contains("outputs"))
    throw ConfigError("not a manifest: " + manifest_path.string());
  VerifyReport report;
  std::map<std::string, std::string> recorded;
  const fs::path dir = manifest_path.parent_path();
  for (const auto& out : manifest["outputs"]) {
    const auto file = out["file"].get<std::string>();
    const auto sha = out["sha256"].get<std::string>();
    recorded[file] = sha;
    const fs::path path = dir / file;
    if (!fs::exists(path)) {
      report.ok = false;
      report.lines.push_back("missing " + file);
      continue;
    }
    const bool same = sha256_hex(read_file(path)) == sha;
    report.ok = report.ok && same;
    report.lines.push_back((same ? "ok " : "modified ") + file);
  }
  if (rerun) {
    Json configs = manifest.contains("runs") ? manifest["runs"] : Json::array({manifest["config"]});
    for (const auto& c : configs) {
      for (const auto& t : execute(resolve_config(c))) {
        const std::string file = t.name + ".csv";
        const auto it = recorded.find(file);
        const bool same = it != recorded.end() && it->second == sha256_hex(to_csv(t));
        report.ok = report.ok && same;
        report.lines.push_back((same ? "reproduced " : "differs ") + file);
      }
    }
  }
  return report;
}

std::string error_line(std::string_view kind, std::string_view message) {
  return Json{{"error", kind}, {"message", message}}.dump();
}

}  // namespace entperc::experiment
