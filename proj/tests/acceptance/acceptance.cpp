// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance <cli-binary> <config-dir> <work-dir>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cantorlab/coeffs.hpp"
#include "cantorlab/diagnostics.hpp"
#include "cantorlab/ifs.hpp"
#include "cantorlab/io.hpp"
#include "cantorlab/jacobi.hpp"
#include "cantorlab/julia.hpp"
#include "cantorlab/potential.hpp"
#include "oracles.hpp"

using namespace cantorlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Real> constant_gamma(double g, std::size_t len) { return std::vector<Real>(len, Real(g)); }

// 1. Exact recursion against Lanczos on the level-14 inverse orbit.
Outcome exact_vs_lanczos() {
  ScopedPrecision p(256);
  const auto t0 = std::chrono::steady_clock::now();
  const JacobiCoeffs exact = julia_exact_coeffs(Real(3.0), 64);
  const DiscreteMeasure orbit = julia_inverse_orbit(PolySequenceSpec::quadratic(Real(3.0)), 14);
  const JacobiCoeffs lz = lanczos_from_discrete(orbit, 64);
  const CrossValidationReport r = cross_validate(exact, lz, 64, Real(1e-8));
  const double secs = seconds_since(t0);
  const double dev = max(r.max_abs_dev_a, r.max_abs_dev_b).to_double();
  return {!r.first_divergence_index && dev <= 1e-8 && secs < 120,
          "max deviation " + fmt(dev) + ", " + fmt(secs) + " s"};
}

// 2. Identity residuals of the exact recursion.
Outcome identity_residuals() {
  ScopedPrecision p(128);
  double worst = 0;
  for (double cv : {2.5, 3.0, 4.0}) {
    const Real c(cv);
    worst = std::max(worst, julia_identity_residual(julia_exact_coeffs(c, 10000), c).to_double());
  }
  return {worst <= 1e-30, "max residual " + fmt(worst)};
}

// 3. Widom lower bound for equilibrium measures.
Outcome widom_lower_bound() {
  ScopedPrecision p(256);
  double worst = 1e300;
  for (double cv : {2.5, 3.0, 4.0}) {
    const auto spec = PolySequenceSpec::quadratic(Real(cv));
    const WidomSeries w = widom_series(julia_exact_coeffs(Real(cv), 10000), robin_capacity(spec, 64), 10000);
    worst = std::min(worst, w.inf_observed.to_double());
  }
  const auto gamma = PolySequenceSpec::gamma(constant_gamma(0.125, 64));
  const DiscreteMeasure orbit = julia_inverse_orbit(gamma, 15);
  const std::size_t n = trusted_prefix(orbit.size());
  LanczosOptions opt;
  opt.reorthogonalization = Reorthogonalization::none;
  const JacobiCoeffs lz = lanczos_from_discrete(orbit, n, opt);
  const WidomSeries wg = widom_series(lz, robin_capacity(gamma, 64), n);
  const double gamma_inf = wg.inf_observed.to_double();
  return {worst >= 1 - 1e-8 && gamma_inf >= 1 - 1e-8,
          "inf W_n exact " + fmt(worst) + ", gamma 1/8 (n=" + std::to_string(n) + ") " + fmt(gamma_inf)};
}

// 4 and 9 share the Cantor Lanczos run; 6 reuses its prefix.
struct CantorRun {
  JacobiCoeffs coeffs;
  std::size_t trusted = 0;
};

const CantorRun& cantor_run() {
  static const CantorRun run = [] {
    ScopedPrecision p(128);
    const DiscreteMeasure m = ifs_gauss_refine(AffineIFS::cantor(128), 8, 13);
    LanczosOptions opt;
    opt.reorthogonalization = Reorthogonalization::none;
    return CantorRun{lanczos_from_discrete(m, 4096, opt), trusted_prefix(m.size())};
  }();
  return run;
}

Outcome cantor_regularity() {
  ScopedPrecision p(128);
  const JacobiCoeffs& c = cantor_run().coeffs;
  const Real g = exp(log_monic_norm(c, 4096) / 4096.0);
  const CapacityEstimate cap = capacity_from_coeffs(c, 4096);
  const CapacitySandwich s = capacity_sandwich(AffineIFS::cantor(128), 5);
  const double gv = g.to_double(), cv = cap.value.to_double(), unc = cap.uncertainty.to_double();
  const bool within = std::abs(gv - cv) <= unc;
  const bool tight = unc < 0.01 * cv;
  const bool sandwich = cv >= 0.99 * s.lower && cv <= 1.01 * s.upper;
  return {within && tight && sandwich,
          "g_4096 " + fmt(gv) + ", extrapolated " + fmt(cv) + " +- " + fmt(unc) + ", sandwich [" +
              fmt(s.lower) + ", " + fmt(s.upper) + "]"};
}

// 5. Lyapunov exponent against the Green function on the exterior grid.
Outcome lyapunov_green() {
  ScopedPrecision p(256);
  const Real c(3.0);
  const auto spec = PolySequenceSpec::quadratic(c);
  const JacobiCoeffs coeffs = julia_exact_coeffs(c, 4096);
  const std::vector<Complex> grid = {{Real(1.0), Real(1.0)}, {Real(0.0), Real(2.0)}, {Real(3.0), Real(0.0)},
                                     {Real(-3.0), Real(0.0)}, {Real(0.5), Real(0.5)}};
  std::vector<double> dev;
  for (std::size_t n : {1024, 2048, 4096}) {
    double d = 0;
    for (const Complex& z : grid) {
      d = std::max(d, abs(lyapunov_approx(coeffs, z, n) - green_julia(spec, z, 20).value).to_double());
    }
    dev.push_back(d);
  }
  return {dev[2] <= 1e-2 && dev[1] < dev[0] && dev[2] < dev[1],
          "max deviation " + fmt(dev[0]) + ", " + fmt(dev[1]) + ", " + fmt(dev[2])};
}

// 6. Interlacing, symmetry and brute-force roots.
bool interlaces(const std::vector<Real>& inner, const std::vector<Real>& outer) {
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (!(outer[i] < inner[i] && inner[i] < outer[i + 1])) return false;
  }
  return true;
}

Outcome interlacing_suite() {
  ScopedPrecision p(128);
  const JacobiCoeffs julia = julia_exact_coeffs(Real(3.0), 257);
  const auto gamma = PolySequenceSpec::gamma(constant_gamma(0.125, 64));
  LanczosOptions opt;
  opt.reorthogonalization = Reorthogonalization::none;
  const JacobiCoeffs gl = lanczos_from_discrete(julia_inverse_orbit(gamma, 15), 257, opt);
  const JacobiCoeffs cantor = cantor_run().coeffs.prefix(257);

  std::size_t failures = 0;
  double asym = 0;
  for (const JacobiCoeffs* c : {&julia, &gl, &cantor}) {
    std::vector<Real> prev = truncation_zeros(*c, 1).eigenvalues;
    for (std::size_t n = 1; n <= 256; ++n) {
      std::vector<Real> next = truncation_zeros(*c, n + 1).eigenvalues;
      if (!interlaces(prev, next)) ++failures;
      if (c == &julia) {
        for (std::size_t i = 0; i < next.size(); ++i) {
          asym = std::max(asym, abs(next[i] + next[next.size() - 1 - i]).to_double());
        }
      }
      prev = std::move(next);
    }
  }

  double root_err = 0;
  oracle::Rng rng(71);
  std::vector<JacobiCoeffs> small = {julia, gl, cantor};
  for (int i = 0; i < 5; ++i) small.push_back(oracle::random_jacobi(rng, 8, 128));
  for (const JacobiCoeffs& c : small) {
    for (std::size_t n = 1; n <= 8; ++n) {
      const std::vector<Real> brute = oracle::char_poly_roots(c, n);
      const std::vector<Real> ev = truncation_zeros(c, n).eigenvalues;
      if (brute.size() != ev.size()) {
        root_err = 1;
        continue;
      }
      for (std::size_t k = 0; k < ev.size(); ++k) root_err = std::max(root_err, abs(brute[k] - ev[k]).to_double());
    }
  }
  return {failures == 0 && asym <= 1e-30 && root_err <= 1e-20,
          std::to_string(failures) + " interlacing failures, asymmetry " + fmt(asym) +
              ", root error " + fmt(root_err)};
}

// 7. Zero-counting measures approach the orbit measure.
Outcome dos_trend() {
  ScopedPrecision p(256);
  const DiscreteMeasure orbit = julia_inverse_orbit(PolySequenceSpec::quadratic(Real(3.0)), 14);
  const JacobiCoeffs c = julia_exact_coeffs(Real(3.0), 256);
  std::vector<double> ks;
  for (std::size_t n : {64, 128, 256}) ks.push_back(dos_compare(dos_measure(c, n), orbit).to_double());
  return {ks[1] < ks[0] && ks[2] < ks[1], "KS " + fmt(ks[0]) + ", " + fmt(ks[1]) + ", " + fmt(ks[2])};
}

// 8. Almost-period scan sanity.
Outcome ap_sanity() {
  ScopedPrecision p(256);
  const std::size_t period = 6, len = 2000;
  std::vector<Real> a, b;
  for (std::size_t k = 1; k <= len; ++k) {
    a.emplace_back(0.5 + 0.1 * static_cast<double>(k % period));
    b.emplace_back(0.03 * static_cast<double>((k * 5) % period));
  }
  const JacobiCoeffs periodic(std::move(a), std::move(b), 256, Provenance::lanczos);
  bool all_multiples = true;
  for (double eps : {0.1, 0.05, 0.02, 0.01, 1e-6}) {
    const APScanReport r = ap_scan(periodic, Real(eps), 256, 512);
    std::vector<std::size_t> expect;
    for (std::size_t k = period; k <= r.scan_bound; k += period) expect.push_back(k);
    all_multiples = all_multiples && r.almost_periods == expect;
  }
  const JacobiCoeffs julia = julia_exact_coeffs(Real(3.0), 8192);
  const APScanReport jr = ap_scan(julia, Real(0.05), 512, 1024, 4096);
  const bool found = !jr.almost_periods.empty();
  return {all_multiples && found,
          std::string(all_multiples ? "periodic ok" : "periodic mismatch") + ", first 0.05-almost period " +
              (found ? std::to_string(jr.almost_periods.front()) : "none")};
}

// 9. Affine conjugation of the Cantor measure.
Outcome scale_invariance() {
  ScopedPrecision p(256);
  const Real alpha = parse_real("5/2"), beta(-1.0);
  const AffineIFS base = AffineIFS::cantor(256);
  const std::size_t levels = 8, n = 32;
  const DiscreteMeasure m0 = ifs_gauss_refine(base, 8, levels);
  const DiscreteMeasure m1 = ifs_gauss_refine(base.conjugated(alpha, beta), 8, levels);
  const JacobiCoeffs c0 = lanczos_from_discrete(m0, n);
  const JacobiCoeffs c1 = lanczos_from_discrete(m1, n);
  double law = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    law = std::max(law, abs(c1.a(k) - alpha * c0.a(k)).to_double());
    law = std::max(law, abs(c1.b(k) - (alpha * c0.b(k) + beta)).to_double());
  }
  const CapacityEstimate cap0 = capacity_from_coeffs(c0, n);
  CapacityEstimate cap1 = cap0;
  cap1.value = cap0.value * alpha;
  const WidomSeries w0 = widom_series(c0, cap0, n), w1 = widom_series(c1, cap1, n);
  double widom = 0;
  for (std::size_t k = 0; k < n; ++k) widom = std::max(widom, abs(w0.values[k] - w1.values[k]).to_double());
  return {law <= 1e-60 && widom <= 1e-10, "affine law error " + fmt(law) + ", Widom change " + fmt(widom)};
}

// 10. Byte-identical CLI reruns.
std::string manifest_problem(const fs::path& dir) {
  const nlohmann::json m = nlohmann::json::parse(io::read_file(dir / "manifest.json"));
  if (m.at("status") != "ok") return dir.string() + ": status " + m.at("status").get<std::string>();
  for (const auto& art : m.at("artifacts")) {
    const std::string body = io::read_file(dir / art.at("path").get<std::string>());
    if (io::sha256_hex(body) != art.at("sha256")) return "digest mismatch for " + art.at("path").get<std::string>();
  }
  return "";
}

Outcome determinism(const fs::path& cli, const fs::path& configs, const fs::path& work) {
  std::size_t runs = 0, files = 0;
  for (const auto& entry : fs::directory_iterator(configs)) {
    if (entry.path().extension() != ".json") continue;
    const std::string stem = entry.path().stem().string();
    std::vector<fs::path> dirs;
    for (const char* tag : {"first", "second"}) {
      const fs::path out = work / stem / tag;
      fs::remove_all(out);
      const std::string cmd = "\"" + cli.string() + "\" run --config \"" + entry.path().string() +
                              "\" --output-dir \"" + out.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, stem + ": CLI run failed"};
      if (const std::string why = manifest_problem(out); !why.empty()) return {false, why};
      dirs.push_back(out);
      ++runs;
    }
    for (const auto& f : fs::directory_iterator(dirs[0])) {
      const std::string name = f.path().filename().string();
      if (name == "timing.json") continue;
      if (io::read_file(f.path()) != io::read_file(dirs[1] / name)) return {false, stem + "/" + name + " differs"};
      ++files;
    }
  }
  return {runs >= 6, std::to_string(runs) + " runs, " + std::to_string(files) + " files identical"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: acceptance <cli-binary> <config-dir> <work-dir>\n";
    return 2;
  }
  const fs::path cli = argv[1], configs = argv[2], work = argv[3];
  const std::vector<std::function<Outcome()>> criteria = {
      exact_vs_lanczos, identity_residuals, widom_lower_bound, cantor_regularity, lyapunov_green,
      interlacing_suite, dos_trend, ap_sanity, scale_invariance,
      [&] { return determinism(cli, configs, work); }};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << "; "
              << fmt(seconds_since(t0)) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
