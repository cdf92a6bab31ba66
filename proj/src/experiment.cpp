#include "cantorlab/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <set>

#include "cantorlab/coeffs.hpp"
#include "cantorlab/diagnostics.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/ifs.hpp"
#include "cantorlab/io.hpp"
#include "cantorlab/jacobi.hpp"
#include "cantorlab/julia.hpp"
#include "cantorlab/parallel.hpp"
#include "cantorlab/potential.hpp"

namespace cantorlab {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 3> kRoutes = {"exact", "lanczos", "chebyshev"};
constexpr std::array<const char*, 8> kDiagnostics = {
    "capacity", "widom", "regularity", "apscan", "dos", "green-lyapunov", "identities", "report"};

const std::array<std::pair<const char*, const char*>, 5> kDefaultGrid = {{
    {"1", "1"}, {"0", "2"}, {"3", "0"}, {"-3", "0"}, {"0.5", "0.5"}}};

const char* kind_name(MeasureKind k) {
  switch (k) {
    case MeasureKind::quadratic_julia: return "quadratic-julia";
    case MeasureKind::gamma_julia: return "gamma-julia";
    case MeasureKind::ifs: return "ifs";
  }
  return "?";
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Numbers may be given as JSON numbers or as strings ("0.125", "1/8").
std::string number_text(const json& j, const std::string& field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw ConfigError(field, "expected a number or a numeric string");
}

Real parse_field(const std::string& text, const std::string& field, Precision bits) {
  try {
    Real x = parse_real(text, bits);
    if (!x.is_finite()) throw DomainError("not finite");
    return x;
  } catch (const Error&) {
    throw ConfigError(field, "cannot parse '" + text + "' as a number");
  }
}

std::size_t count_field(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::vector<std::size_t> count_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(count_field(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::string> string_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError(field, "expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::string> number_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_text(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// Keeps the canonical order of `allowed` so the run order never depends on
// how the user listed them.
std::vector<std::string> canonical_subset(const std::vector<std::string>& requested,
                                          const auto& allowed, const std::string& field) {
  for (const std::string& r : requested) {
    if (std::find(allowed.begin(), allowed.end(), r) == allowed.end()) {
      throw ConfigError(field, "unknown entry '" + r + "'");
    }
  }
  std::vector<std::string> out;
  for (const char* a : allowed) {
    if (contains(requested, a)) out.emplace_back(a);
  }
  return out;
}

std::size_t saturating_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > (std::size_t{1} << 62) / base) return std::size_t{1} << 62;
    out *= base;
  }
  return out;
}

MeasureConfig parse_measure(const json& j, Precision bits) {
  if (!j.is_object()) throw ConfigError("measure", "expected an object");
  static const std::set<std::string> known = {"kind",   "c",          "gamma",   "gamma_constant",
                                              "gamma_length", "maps", "weights", "base_nodes",
                                              "anchor"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("measure." + key, "unknown field");
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError("measure.kind", "required: quadratic-julia, gamma-julia, ifs or cantor");
  }
  MeasureConfig m;
  const std::string kind = j["kind"].get<std::string>();
  if (j.contains("anchor")) m.anchor = number_text(j["anchor"], "measure.anchor");

  if (kind == "quadratic-julia") {
    m.kind = MeasureKind::quadratic_julia;
    if (!j.contains("c")) throw ConfigError("measure.c", "required for quadratic-julia");
    m.c = number_text(j["c"], "measure.c");
    if (parse_field(m.c, "measure.c", bits) <= 2) {
      throw ConfigError("measure.c", "c must exceed 2");
    }
  } else if (kind == "gamma-julia") {
    m.kind = MeasureKind::gamma_julia;
    if (j.contains("gamma")) {
      m.gamma = number_list(j["gamma"], "measure.gamma");
    } else if (j.contains("gamma_constant") && j.contains("gamma_length")) {
      const std::string g = number_text(j["gamma_constant"], "measure.gamma_constant");
      m.gamma.assign(count_field(j["gamma_length"], "measure.gamma_length"), g);
    } else {
      throw ConfigError("measure.gamma",
                        "gamma-julia needs 'gamma' or 'gamma_constant' with 'gamma_length'");
    }
    if (m.gamma.empty()) throw ConfigError("measure.gamma", "must not be empty");
    for (std::size_t i = 0; i < m.gamma.size(); ++i) {
      const Real g = parse_field(m.gamma[i], "measure.gamma", bits);
      if (g <= 0 || g >= Real(0.25, bits)) {
        throw ConfigError("measure.gamma[" + std::to_string(i) + "]",
                          "every gamma must lie in (0, 1/4)");
      }
    }
  } else if (kind == "ifs" || kind == "cantor") {
    m.kind = MeasureKind::ifs;
    if (kind == "cantor") {
      m.maps = {{"1/3", "0"}, {"1/3", "2/3"}};
      m.weights = {"1/2", "1/2"};
    } else {
      if (!j.contains("maps") || !j["maps"].is_array()) {
        throw ConfigError("measure.maps", "ifs needs an array of {ratio, offset}");
      }
      for (std::size_t i = 0; i < j["maps"].size(); ++i) {
        const json& mj = j["maps"][i];
        const std::string f = "measure.maps[" + std::to_string(i) + "]";
        if (!mj.is_object() || !mj.contains("ratio") || !mj.contains("offset")) {
          throw ConfigError(f, "expected {ratio, offset}");
        }
        m.maps.push_back({number_text(mj["ratio"], f + ".ratio"),
                          number_text(mj["offset"], f + ".offset")});
      }
      if (!j.contains("weights")) throw ConfigError("measure.weights", "required for ifs");
      m.weights = number_list(j["weights"], "measure.weights");
    }
    if (j.contains("base_nodes")) m.base_nodes = count_field(j["base_nodes"], "measure.base_nodes");
    if (m.base_nodes == 0) throw ConfigError("measure.base_nodes", "must be at least 1");
  } else {
    throw ConfigError("measure.kind", "unknown kind '" + kind + "'");
  }
  return m;
}

AffineIFS build_ifs(const MeasureConfig& m, Precision bits) {
  std::vector<AffineMap> maps;
  for (const MapConfig& mc : m.maps) {
    maps.push_back({parse_real(mc.ratio, bits), parse_real(mc.offset, bits)});
  }
  std::vector<Real> weights;
  for (const std::string& w : m.weights) weights.push_back(parse_real(w, bits));
  return AffineIFS(std::move(maps), std::move(weights));
}

PolySequenceSpec build_poly(const MeasureConfig& m, Precision bits) {
  if (m.kind == MeasureKind::quadratic_julia) {
    return PolySequenceSpec::quadratic(parse_real(m.c, bits));
  }
  std::vector<Real> g;
  for (const std::string& s : m.gamma) g.push_back(parse_real(s, bits));
  return PolySequenceSpec::gamma(std::move(g));
}

std::size_t approximant_atoms(const ExperimentConfig& cfg) {
  if (cfg.measure.kind == MeasureKind::ifs) {
    return cfg.measure.base_nodes * saturating_pow(cfg.measure.maps.size(), cfg.level);
  }
  return saturating_pow(2, cfg.level);
}

}  // namespace

Precision env_default_precision() {
  if (const char* env = std::getenv(kPrecisionEnvVar)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= kMinPrecisionBits) return v;
  }
  return kDefaultPrecisionBits;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
  static const std::set<std::string> known = {
      "measure",      "level",        "n_coeffs",        "precision_bits",
      "routes",       "diagnostics",  "output_dir",      "epsilon_grid",
      "windows",      "tails",        "untrusted",       "threads",
      "lanczos_reorthogonalization",  "crossval_tolerance", "chebyshev_tolerance",
      "grid",         "green_levels", "lyapunov_orders", "dos_orders",
      "robin_levels", "report_targets", "emit_measure"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown field");
  }

  ExperimentConfig cfg;
  cfg.precision_bits = env_default_precision();
  if (doc.contains("precision_bits")) {
    cfg.precision_bits = static_cast<Precision>(count_field(doc["precision_bits"], "precision_bits"));
  }
  if (cfg.precision_bits < kMinPrecisionBits || cfg.precision_bits > (1 << 20)) {
    throw ConfigError("precision_bits",
                      "must lie in [" + std::to_string(kMinPrecisionBits) + ", 1048576]");
  }
  const Precision bits = cfg.precision_bits;

  if (!doc.contains("measure")) throw ConfigError("measure", "required");
  cfg.measure = parse_measure(doc["measure"], bits);
  const MeasureKind kind = cfg.measure.kind;
  if (cfg.measure.anchor) parse_field(*cfg.measure.anchor, "measure.anchor", bits);

  if (doc.contains("level")) cfg.level = count_field(doc["level"], "level");
  if (doc.contains("n_coeffs")) cfg.n_coeffs = count_field(doc["n_coeffs"], "n_coeffs");
  if (cfg.n_coeffs == 0) throw ConfigError("n_coeffs", "must be at least 1");
  if (doc.contains("untrusted")) {
    if (!doc["untrusted"].is_boolean()) throw ConfigError("untrusted", "expected a boolean");
    cfg.untrusted = doc["untrusted"].get<bool>();
  }
  if (doc.contains("emit_measure")) {
    if (!doc["emit_measure"].is_boolean()) throw ConfigError("emit_measure", "expected a boolean");
    cfg.emit_measure = doc["emit_measure"].get<bool>();
  }
  if (doc.contains("threads")) cfg.threads = count_field(doc["threads"], "threads");
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ConfigError("output_dir", "expected a path string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }

  if (!doc.contains("routes")) throw ConfigError("routes", "required");
  cfg.routes = canonical_subset(string_list(doc["routes"], "routes"), kRoutes, "routes");
  if (cfg.routes.empty()) throw ConfigError("routes", "at least one route is required");
  if (contains(cfg.routes, "exact") && kind != MeasureKind::quadratic_julia) {
    throw ConfigError("routes", "the exact route exists only for quadratic-julia");
  }
  if (contains(cfg.routes, "chebyshev") && kind != MeasureKind::ifs) {
    throw ConfigError("routes", "the chebyshev route needs exact moments and exists only for ifs");
  }
  if (doc.contains("diagnostics")) {
    cfg.diagnostics =
        canonical_subset(string_list(doc["diagnostics"], "diagnostics"), kDiagnostics,
                         "diagnostics");
  }
  if (contains(cfg.diagnostics, "identities") && kind != MeasureKind::quadratic_julia) {
    throw ConfigError("diagnostics", "identities apply only to quadratic-julia");
  }

  const bool needs_approximant = contains(cfg.routes, "lanczos") ||
                                 contains(cfg.diagnostics, "dos") || cfg.emit_measure;
  if (needs_approximant && cfg.level == 0) throw ConfigError("level", "must be at least 1");
  if (kind == MeasureKind::gamma_julia && needs_approximant &&
      cfg.level > cfg.measure.gamma.size()) {
    throw ConfigError("level", "exceeds the " + std::to_string(cfg.measure.gamma.size()) +
                                   " gamma values supplied");
  }
  if (contains(cfg.routes, "lanczos") && !cfg.untrusted) {
    const std::size_t trusted = trusted_prefix(approximant_atoms(cfg));
    if (cfg.n_coeffs > trusted) {
      throw ConfigError("n_coeffs", std::to_string(cfg.n_coeffs) +
                                        " exceeds the trusted prefix " + std::to_string(trusted) +
                                        " of the level-" + std::to_string(cfg.level) +
                                        " approximant; raise level or set untrusted");
    }
  }

  if (doc.contains("lanczos_reorthogonalization")) {
    const json& r = doc["lanczos_reorthogonalization"];
    if (!r.is_string() || (r != "full" && r != "none")) {
      throw ConfigError("lanczos_reorthogonalization", "expected \"full\" or \"none\"");
    }
    cfg.lanczos_reorthogonalization = r.get<std::string>();
  }
  for (auto [name, target] : {std::pair{"crossval_tolerance", &cfg.crossval_tolerance},
                              std::pair{"chebyshev_tolerance", &cfg.chebyshev_tolerance}}) {
    if (doc.contains(name)) {
      *target = number_text(doc[name], name);
      if (parse_field(*target, name, bits) <= 0) throw ConfigError(name, "must be positive");
    }
  }

  if (doc.contains("epsilon_grid")) {
    cfg.epsilon_grid = number_list(doc["epsilon_grid"], "epsilon_grid");
    for (const std::string& e : cfg.epsilon_grid) {
      if (parse_field(e, "epsilon_grid", bits) <= 0) {
        throw ConfigError("epsilon_grid", "every epsilon must be positive");
      }
    }
  }
  if (doc.contains("windows")) cfg.windows = count_list(doc["windows"], "windows");
  for (std::size_t w : cfg.windows) {
    if (w == 0) throw ConfigError("windows", "every window must be at least 1");
  }
  if (doc.contains("tails")) cfg.tails = count_list(doc["tails"], "tails");
  for (std::size_t t : cfg.tails) {
    if (t == 0) throw ConfigError("tails", "tails are 1-based");
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_array()) throw ConfigError("grid", "expected an array of [re, im] pairs");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string f = "grid[" + std::to_string(i) + "]";
      if (!g[i].is_array() || g[i].size() != 2) throw ConfigError(f, "expected [re, im]");
      std::string re = number_text(g[i][0], f), im = number_text(g[i][1], f);
      parse_field(re, f, bits);
      if (parse_field(im, f, bits) < 0) {
        throw ConfigError(f, "points must lie in the closed upper half-plane");
      }
      cfg.grid.emplace_back(std::move(re), std::move(im));
    }
  } else {
    for (const auto& [re, im] : kDefaultGrid) cfg.grid.emplace_back(re, im);
  }
  if (doc.contains("green_levels")) cfg.green_levels = count_field(doc["green_levels"], "green_levels");
  if (cfg.green_levels == 0) throw ConfigError("green_levels", "must be at least 1");
  if (kind == MeasureKind::gamma_julia && contains(cfg.diagnostics, "green-lyapunov") &&
      cfg.green_levels > cfg.measure.gamma.size()) {
    throw ConfigError("green_levels", "exceeds the gamma values supplied");
  }
  if (doc.contains("robin_levels")) cfg.robin_levels = count_field(doc["robin_levels"], "robin_levels");
  if (cfg.robin_levels == 0) throw ConfigError("robin_levels", "must be at least 1");

  if (doc.contains("lyapunov_orders")) {
    cfg.lyapunov_orders = count_list(doc["lyapunov_orders"], "lyapunov_orders");
  } else {
    cfg.lyapunov_orders = {cfg.n_coeffs};
  }
  if (doc.contains("dos_orders")) {
    cfg.dos_orders = count_list(doc["dos_orders"], "dos_orders");
  } else {
    for (std::size_t k : {cfg.n_coeffs / 4, cfg.n_coeffs / 2, cfg.n_coeffs}) {
      if (k >= 1 && (cfg.dos_orders.empty() || cfg.dos_orders.back() != k)) {
        cfg.dos_orders.push_back(k);
      }
    }
  }
  for (auto [name, list] : {std::pair{"lyapunov_orders", &cfg.lyapunov_orders},
                            std::pair{"dos_orders", &cfg.dos_orders}}) {
    for (std::size_t k : *list) {
      if (k == 0 || k > cfg.n_coeffs) throw ConfigError(name, "orders must lie in [1, n_coeffs]");
    }
  }

  if (doc.contains("report_targets")) {
    for (const std::string& t : string_list(doc["report_targets"], "report_targets")) {
      try {
        parse_conjecture_target(t);
      } catch (const DomainError&) {
        throw ConfigError("report_targets", "unknown target '" + t + "'");
      }
      if (t == "julia-identities" && kind != MeasureKind::quadratic_julia) {
        throw ConfigError("report_targets", "julia-identities needs quadratic-julia");
      }
      cfg.report_targets.push_back(t);
    }
  } else {
    switch (kind) {
      case MeasureKind::quadratic_julia: cfg.report_targets = {"julia-identities"}; break;
      case MeasureKind::gamma_julia: cfg.report_targets = {"gamma-ap"}; break;
      case MeasureKind::ifs: cfg.report_targets = {"cantor-ap", "cantor-widom"}; break;
    }
  }

  if (kind == MeasureKind::ifs) {
    try {
      build_ifs(cfg.measure, bits);
    } catch (const DomainError& e) {
      throw ConfigError("measure", e.what());
    }
  }
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json m;
  m["kind"] = kind_name(cfg.measure.kind);
  switch (cfg.measure.kind) {
    case MeasureKind::quadratic_julia: m["c"] = cfg.measure.c; break;
    case MeasureKind::gamma_julia: m["gamma"] = cfg.measure.gamma; break;
    case MeasureKind::ifs: {
      json maps = json::array();
      for (const MapConfig& mc : cfg.measure.maps) {
        maps.push_back({{"ratio", mc.ratio}, {"offset", mc.offset}});
      }
      m["maps"] = maps;
      m["weights"] = cfg.measure.weights;
      m["base_nodes"] = cfg.measure.base_nodes;
      break;
    }
  }
  if (cfg.measure.anchor) m["anchor"] = *cfg.measure.anchor;

  json grid = json::array();
  for (const auto& [re, im] : cfg.grid) grid.push_back({re, im});

  // output_dir is deliberately left out: where the files go is not part of
  // what was computed, and reruns into another directory must match.
  return {{"measure", m},
          {"level", cfg.level},
          {"n_coeffs", cfg.n_coeffs},
          {"precision_bits", cfg.precision_bits},
          {"routes", cfg.routes},
          {"diagnostics", cfg.diagnostics},
          {"epsilon_grid", cfg.epsilon_grid},
          {"windows", cfg.windows},
          {"tails", cfg.tails},
          {"untrusted", cfg.untrusted},
          {"threads", cfg.threads},
          {"lanczos_reorthogonalization", cfg.lanczos_reorthogonalization},
          {"crossval_tolerance", cfg.crossval_tolerance},
          {"chebyshev_tolerance", cfg.chebyshev_tolerance},
          {"grid", grid},
          {"green_levels", cfg.green_levels},
          {"lyapunov_orders", cfg.lyapunov_orders},
          {"dos_orders", cfg.dos_orders},
          {"robin_levels", cfg.robin_levels},
          {"report_targets", cfg.report_targets},
          {"emit_measure", cfg.emit_measure}};
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ResourceError*>(&e)) return 4;
  return 3;
}

namespace {

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config-error";
  if (dynamic_cast<const ResourceError*>(&e)) return "resource-cap";
  if (dynamic_cast<const ConsistencyError*>(&e)) return "consistency-error";
  if (dynamic_cast<const NumericalFailure*>(&e)) return "numerical-failure";
  if (dynamic_cast<const LengthError*>(&e)) return "length-error";
  if (dynamic_cast<const DomainError*>(&e)) return "domain-error";
  return "error";
}

json double_str(double x) { return Real(Real(x), 53).to_string(); }

class Runner {
 public:
  explicit Runner(const ExperimentConfig& cfg) : cfg_(cfg), bits_(cfg.precision_bits) {}

  void run() {
    if (cfg_.measure.kind == MeasureKind::ifs) {
      ifs_.emplace(build_ifs(cfg_.measure, bits_));
    } else {
      poly_.emplace(build_poly(cfg_.measure, bits_));
    }
    for (const std::string& route : cfg_.routes) compute_route(route);
    cross_validate_routes();
    if (cfg_.emit_measure) emit("measure.csv", io::measure_csv(approximant()));
    for (const std::string& d : cfg_.diagnostics) run_diagnostic(d);
  }

  json artifacts() const { return artifacts_; }

 private:
  void emit(const std::string& name, const std::string& content) {
    io::atomic_write(cfg_.output_dir / name, content);
    artifacts_.push_back(
        {{"path", name}, {"sha256", io::sha256_hex(content)}, {"bytes", content.size()}});
  }

  const DiscreteMeasure& approximant() {
    if (!approximant_) {
      if (ifs_) {
        approximant_.emplace(ifs_gauss_refine(*ifs_, cfg_.measure.base_nodes, cfg_.level));
      } else if (cfg_.measure.anchor) {
        approximant_.emplace(
            julia_inverse_orbit(*poly_, cfg_.level, parse_real(*cfg_.measure.anchor, bits_)));
      } else {
        approximant_.emplace(julia_inverse_orbit(*poly_, cfg_.level));
      }
    }
    return *approximant_;
  }

  void compute_route(const std::string& route) {
    const std::size_t n = cfg_.n_coeffs;
    if (route == "exact") {
      coeffs_.emplace_back(route, julia_exact_coeffs(poly_->c(), n));
    } else if (route == "lanczos") {
      LanczosOptions opt;
      opt.reorthogonalization = cfg_.lanczos_reorthogonalization == "none"
                                    ? Reorthogonalization::none
                                    : Reorthogonalization::full;
      coeffs_.emplace_back(route, lanczos_from_discrete(approximant(), n, opt));
    } else {
      const MeasureConfig mc = cfg_.measure;
      auto moments = [mc, n](Precision b) { return ifs_moments(build_ifs(mc, b), 2 * n); };
      const Real tol = parse_real(cfg_.chebyshev_tolerance, bits_);
      EscalationResult esc = chebyshev_escalated(moments, n, tol);
      std::vector<Real> a, b;
      for (std::size_t k = 1; k <= n; ++k) {
        a.emplace_back(esc.coeffs.a(k), bits_);
        b.emplace_back(esc.coeffs.b(k), bits_);
      }
      coeffs_.emplace_back(route, JacobiCoeffs(std::move(a), std::move(b), bits_,
                                               Provenance::chebyshev_moments));
      emit("chebyshev_escalation.json",
           io::dump({{"bits_used", esc.bits_used},
                     {"attempts", esc.attempts},
                     {"tolerance", cfg_.chebyshev_tolerance}}));
    }
    const JacobiCoeffs& c = coeffs_.back().second;
    emit("coeffs_" + route + ".csv", io::coeffs_csv(c));
    emit("coeffs_" + route + ".json", io::dump(io::coeffs_json(c)));
  }

  void cross_validate_routes() {
    const Real tol = parse_real(cfg_.crossval_tolerance, bits_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      for (std::size_t j = i + 1; j < coeffs_.size(); ++j) {
        const auto& [ln, lc] = coeffs_[i];
        const auto& [rn, rc] = coeffs_[j];
        json report = io::crossval_json(cross_validate(lc, rc, cfg_.n_coeffs, tol));
        report["lhs"] = ln;
        report["rhs"] = rn;
        report["tolerance"] = cfg_.crossval_tolerance;
        emit("crossval_" + ln + "_" + rn + ".json", io::dump(report));
      }
    }
  }

  const JacobiCoeffs& primary() const { return coeffs_.front().second; }
  const std::string& primary_route() const { return coeffs_.front().first; }

  const CapacityEstimate& capacity() {
    if (!capacity_) {
      if (poly_) {
        std::size_t levels = cfg_.robin_levels;
        if (auto avail = poly_->available_levels()) levels = std::min(levels, *avail);
        capacity_.emplace(robin_capacity(*poly_, levels));
      } else {
        capacity_.emplace(capacity_from_coeffs(primary(), cfg_.n_coeffs));
      }
    }
    return *capacity_;
  }

  std::vector<Real> epsilon_grid() const {
    std::vector<Real> out;
    for (const std::string& e : cfg_.epsilon_grid) out.push_back(parse_real(e, bits_));
    return out;
  }

  void run_diagnostic(const std::string& d) {
    const JacobiCoeffs& c = primary();
    const std::size_t n = cfg_.n_coeffs;
    if (d == "capacity") {
      json j = io::capacity_json(capacity());
      if (ifs_) {
        try {
          const CapacitySandwich s = capacity_sandwich(*ifs_, 5);
          j["sandwich"] = {{"lower", double_str(s.lower)},
                           {"upper", double_str(s.upper)},
                           {"energy", double_str(s.energy)},
                           {"cylinders", s.cylinders},
                           {"level", 5}};
        } catch (const DomainError&) {
          j["sandwich"] = nullptr;
        }
      }
      emit("capacity.json", io::dump(j));
    } else if (d == "widom") {
      const WidomSeries w = widom_series(c, capacity(), n);
      emit("widom.csv", io::widom_csv(w));
      emit("widom_summary.json", io::dump(io::widom_summary_json(w)));
    } else if (d == "regularity") {
      emit("regularity.csv", io::regularity_csv(regularity_index(c, n)));
    } else if (d == "apscan") {
      run_apscan(c);
    } else if (d == "dos") {
      run_dos(c);
    } else if (d == "green-lyapunov") {
      run_green(c);
    } else if (d == "identities") {
      ConjectureInputs in;
      in.coeffs = &c;
      in.c = poly_->c();
      in.description = {{"route", primary_route()}};
      emit("identities.json",
           io::dump(io::conjecture_json(conjecture_report(ConjectureTarget::julia_identities, in))));
    } else if (d == "report") {
      for (const std::string& t : cfg_.report_targets) {
        const ConjectureTarget target = parse_conjecture_target(t);
        ConjectureInputs in;
        in.coeffs = &c;
        if (poly_ && poly_->kind() == PolyFamily::quadratic_julia) in.c = poly_->c();
        if (target == ConjectureTarget::cantor_widom) in.capacity = capacity();
        in.epsilon_grid = epsilon_grid();
        in.windows = cfg_.windows;
        in.tails = cfg_.tails;
        in.description = {{"measure", kind_name(cfg_.measure.kind)},
                          {"route", primary_route()},
                          {"level", cfg_.level}};
        emit("report_" + t + ".json",
             io::dump(io::conjecture_json(conjecture_report(target, in))));
      }
    }
  }

  void run_apscan(const JacobiCoeffs& c) {
    std::vector<Real> eps = epsilon_grid();
    if (eps.empty()) {
      for (const char* e : {"0.1", "0.05", "0.02", "0.01"}) eps.push_back(parse_real(e, bits_));
    }
    std::vector<std::size_t> windows = cfg_.windows;
    if (windows.empty()) windows = {std::clamp<std::size_t>(c.length() / 8, 1, 512)};
    const std::vector<std::size_t> requested =
        cfg_.tails.empty() ? std::vector<std::size_t>{1024, 2048, 4096} : cfg_.tails;
    json results = json::array();
    for (std::size_t w : windows) {
      const auto ladder = fit_tail_ladder(c.length(), w, requested);
      results.push_back(io::asymptotic_json(asymptotic_ap_scan(c, eps, {w}, ladder)));
    }
    json grid = json::array();
    for (const Real& e : eps) grid.push_back(e.to_string());
    emit("apscan.json", io::dump({{"epsilon_grid", grid}, {"results", results}}));
  }

  void run_dos(const JacobiCoeffs& c) {
    const DiscreteMeasure& ref = approximant();
    json comparisons = json::array();
    std::vector<Real> ks;
    for (std::size_t k : cfg_.dos_orders) {
      const DiscreteMeasure dos = dos_measure(c, k);
      emit("dos_" + std::to_string(k) + ".csv", io::measure_csv(dos));
      ks.push_back(dos_compare(dos, ref));
      comparisons.push_back({{"n", k}, {"ks_distance", ks.back().to_string()}});
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < ks.size(); ++i) decreasing = decreasing && ks[i] < ks[i - 1];
    emit("dos.json", io::dump({{"reference", {{"level", cfg_.level}, {"atoms", ref.size()}}},
                               {"comparisons", comparisons},
                               {"strictly_decreasing", decreasing}}));
  }

  void run_green(const JacobiCoeffs& c) {
    std::vector<Complex> points;
    for (const auto& [re, im] : cfg_.grid) {
      points.push_back({parse_real(re, bits_), parse_real(im, bits_)});
    }
    std::vector<std::optional<GreenValue>> green(points.size());
    if (poly_) {
      std::vector<io::GridRow> rows;
      for (std::size_t i = 0; i < points.size(); ++i) {
        green[i] = green_julia(*poly_, points[i], cfg_.green_levels);
        rows.push_back({points[i], green[i]->value, green[i]->uncertainty});
      }
      emit("green.csv", io::grid_csv(rows));
    }

    json per_order = json::array();
    for (std::size_t k : cfg_.lyapunov_orders) {
      std::vector<io::GridRow> rows;
      std::optional<Real> max_dev;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const Real value = lyapunov_approx(c, points[i], k);
        // Change against half the order: a plain convergence indicator.
        const Real spread = k >= 2 ? abs(value - lyapunov_approx(c, points[i], k / 2))
                                   : Real::zero(bits_);
        rows.push_back({points[i], value, spread});
        if (green[i]) {
          const Real dev = abs(value - green[i]->value);
          max_dev = max_dev ? max(*max_dev, dev) : dev;
        }
      }
      emit("lyapunov_" + std::to_string(k) + ".csv", io::grid_csv(rows));
      per_order.push_back({{"n", k},
                           {"max_abs_dev_from_green",
                            max_dev ? json(max_dev->to_string()) : json(nullptr)}});
    }
    emit("green_lyapunov.json", io::dump({{"green_levels", cfg_.green_levels},
                                          {"green_available", poly_.has_value()},
                                          {"orders", per_order}}));
  }

  const ExperimentConfig& cfg_;
  Precision bits_;
  std::optional<AffineIFS> ifs_;
  std::optional<PolySequenceSpec> poly_;
  std::optional<DiscreteMeasure> approximant_;
  std::optional<CapacityEstimate> capacity_;
  std::vector<std::pair<std::string, JacobiCoeffs>> coeffs_;
  json artifacts_ = json::array();
};

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ScopedPrecision precision(cfg.precision_bits);
  const unsigned saved_threads = thread_count();
  if (cfg.threads > 0) set_thread_count(static_cast<unsigned>(cfg.threads));

  RunOutcome out;
  Runner runner(cfg);
  try {
    std::filesystem::create_directories(cfg.output_dir);
    runner.run();
    out.status = "ok";
  } catch (const std::exception& e) {
    out.exit_code = exit_code_for(e);
    out.status = error_kind(e);
    out.message = e.what();
  }
  if (cfg.threads > 0) set_thread_count(saved_threads);

  out.manifest = {{"tool", "cantorlab"},
                  {"tool_version", kToolVersion},
                  {"config", config_to_json(cfg)},
                  {"precision_bits", cfg.precision_bits},
                  {"artifacts", runner.artifacts()},
                  {"status", out.status},
                  {"error", out.message.empty() ? json(nullptr) : json(out.message)},
                  {"timing_file", "timing.json"}};
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    io::atomic_write(cfg.output_dir / "manifest.json", io::dump(out.manifest));
    io::atomic_write(cfg.output_dir / "timing.json", io::dump({{"wall_seconds", seconds}}));
  } catch (const std::exception& e) {
    if (out.exit_code == 0) {
      out.exit_code = 3;
      out.status = "error";
      out.message = e.what();
    }
  }
  return out;
}

}  // namespace cantorlab
