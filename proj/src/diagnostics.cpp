#include "cantorlab/diagnostics.hpp"

#include <algorithm>

#include "cantorlab/errors.hpp"
#include "cantorlab/parallel.hpp"

namespace cantorlab {

using nlohmann::json;

WidomSeries widom_series(const JacobiCoeffs& coeffs, const CapacityEstimate& cap, std::size_t n) {
  if (n > coeffs.length()) {
    throw LengthError("Widom series of length " + std::to_string(n) + " from " +
                      std::to_string(coeffs.length()) + " coefficients");
  }
  if (!(cap.value > 0.0)) throw DomainError("capacity must be positive");
  const Precision p = std::max(coeffs.precision_bits(), cap.value.precision());
  const Real log_cap = log(Real(cap.value, p));
  WidomSeries w{{}, cap, Real::zero(p), Real::zero(p)};
  w.values.reserve(n);
  Real acc = Real::zero(p);
  for (std::size_t k = 1; k <= n; ++k) {
    acc += log(coeffs.a(k)) - log_cap;
    w.values.push_back(exp(acc));
    if (k == 1 || w.values.back() < w.inf_observed) w.inf_observed = w.values.back();
    if (k == 1 || w.values.back() > w.sup_observed) w.sup_observed = w.values.back();
  }
  return w;
}

std::vector<Real> regularity_index(const JacobiCoeffs& coeffs, std::size_t n) {
  if (n > coeffs.length()) {
    throw LengthError("regularity index of length " + std::to_string(n) + " from " +
                      std::to_string(coeffs.length()) + " coefficients");
  }
  std::vector<Real> g;
  g.reserve(n);
  Real acc = Real::zero(coeffs.precision_bits());
  for (std::size_t k = 1; k <= n; ++k) {
    acc += log(coeffs.a(k));
    g.push_back(exp(acc / static_cast<double>(k)));
  }
  return g;
}

std::vector<Real> shift_deviations(const JacobiCoeffs& coeffs, std::size_t window,
                                   std::size_t tail_start, std::size_t max_shift) {
  const std::size_t len = coeffs.length();
  if (tail_start == 0) throw DomainError("tail_start is 1-based and must be positive");
  if (tail_start + window + max_shift > len || max_shift == 0) {
    throw LengthError("scan of window " + std::to_string(window) + " from n=" +
                      std::to_string(tail_start) + " with " + std::to_string(max_shift) +
                      " shifts needs " + std::to_string(tail_start + window + max_shift) +
                      " coefficients, have " + std::to_string(len));
  }
  const Precision p = coeffs.precision_bits();
  const auto& a = coeffs.a_values();
  const auto& b = coeffs.b_values();
  std::vector<Real> dev(max_shift, Real::zero(p));
  parallel_for(max_shift, [&](std::size_t idx) {
    const std::size_t k = idx + 1;
    Real t = Real::zero(p);
    Real& d = dev[idx];
    for (std::size_t n = tail_start; n <= tail_start + window; ++n) {
      mpfr_sub(t.raw(), a[n + k - 1].raw(), a[n - 1].raw(), MPFR_RNDN);
      if (mpfr_cmpabs(t.raw(), d.raw()) > 0) mpfr_abs(d.raw(), t.raw(), MPFR_RNDN);
      mpfr_sub(t.raw(), b[n + k - 1].raw(), b[n - 1].raw(), MPFR_RNDN);
      if (mpfr_cmpabs(t.raw(), d.raw()) > 0) mpfr_abs(d.raw(), t.raw(), MPFR_RNDN);
    }
  });
  return dev;
}

APScanReport ap_report_from_deviations(const std::vector<Real>& deviations, const Real& epsilon,
                                       std::size_t window, std::size_t tail_start,
                                       std::size_t declared_gap) {
  APScanReport r;
  r.epsilon = epsilon;
  r.window_length = window;
  r.tail_start = tail_start;
  r.scan_bound = deviations.size();
  r.declared_gap = declared_gap == 0 ? window : declared_gap;
  std::size_t last = 0;
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    if (deviations[i] <= epsilon) {
      const std::size_t k = i + 1;
      r.almost_periods.push_back(k);
      r.max_gap = std::max(r.max_gap, k - last);
      last = k;
    }
    if (i == 0 || deviations[i] < r.best_deviation) {
      r.best_deviation = deviations[i];
      r.best_shift = i + 1;
    }
  }
  r.max_gap = std::max(r.max_gap, r.scan_bound + 1 - last);
  r.relatively_dense = r.max_gap <= r.declared_gap;
  return r;
}

APScanReport ap_scan(const JacobiCoeffs& coeffs, const Real& epsilon, std::size_t window,
                     std::size_t tail_start, std::size_t max_shift, std::size_t declared_gap) {
  if (max_shift == 0) {
    if (tail_start + window >= coeffs.length()) {
      throw LengthError("window " + std::to_string(window) + " at n=" +
                        std::to_string(tail_start) + " leaves no room for shifts in " +
                        std::to_string(coeffs.length()) + " coefficients");
    }
    max_shift = coeffs.length() - tail_start - window;
  }
  return ap_report_from_deviations(shift_deviations(coeffs, window, tail_start, max_shift),
                                   epsilon, window, tail_start, declared_gap);
}

AsymptoticAPReport asymptotic_ap_scan(const JacobiCoeffs& coeffs,
                                      const std::vector<Real>& epsilon_grid,
                                      const std::vector<std::size_t>& windows,
                                      const std::vector<std::size_t>& tails) {
  if (epsilon_grid.empty() || windows.empty() || tails.empty()) {
    throw DomainError("epsilon grid, windows and tails must be non-empty");
  }
  std::vector<std::size_t> ladder = tails;
  std::sort(ladder.begin(), ladder.end());
  AsymptoticAPReport out;
  for (std::size_t w : windows) {
    const std::size_t top = ladder.back() + w;
    if (top >= coeffs.length()) {
      throw LengthError("tail " + std::to_string(ladder.back()) + " with window " +
                        std::to_string(w) + " exceeds " + std::to_string(coeffs.length()) +
                        " coefficients");
    }
    const std::size_t shifts = coeffs.length() - top;
    out.scan_bound = out.scan_bound == 0 ? shifts : std::min(out.scan_bound, shifts);
    TailProfile prof;
    prof.window = w;
    prof.tails = ladder;
    for (std::size_t t : ladder) {
      const std::vector<Real> dev = shift_deviations(coeffs, w, t, shifts);
      for (const Real& eps : epsilon_grid) {
        out.reports.push_back(ap_report_from_deviations(dev, eps, w, t, 0));
      }
      prof.best_deviation.push_back(out.reports.back().best_deviation);
      prof.best_shift.push_back(out.reports.back().best_shift);
    }
    prof.deviation_decreasing = true;
    for (std::size_t i = 1; i < prof.best_deviation.size(); ++i) {
      if (!(prof.best_deviation[i] < prof.best_deviation[i - 1])) prof.deviation_decreasing = false;
    }
    out.profiles.push_back(std::move(prof));
  }
  return out;
}

Real julia_identity_residual(const JacobiCoeffs& coeffs, const Real& c) {
  const std::size_t n = coeffs.length();
  const Precision p = std::max(coeffs.precision_bits(), c.precision());
  Real worst = Real::zero(p);
  auto sq = [&](std::size_t k) { return Real(coeffs.a(k), p) * coeffs.a(k); };
  for (std::size_t m = 1; 2 * m <= n; ++m) {
    const Real s2 = sq(2 * m);
    worst = max(worst, abs(s2 * sq(2 * m - 1) - sq(m)));
    if (2 * m + 1 <= n) worst = max(worst, abs(s2 + sq(2 * m + 1) - c));
  }
  return worst;
}

Real dos_compare(const DiscreteMeasure& lhs, const DiscreteMeasure& rhs) {
  const Precision p = std::max(lhs.precision(), rhs.precision());
  Real fl = Real::zero(p), fr = Real::zero(p), best = Real::zero(p), diff = Real::zero(p);
  std::size_t i = 0, j = 0;
  const auto& la = lhs.atoms();
  const auto& ra = rhs.atoms();
  while (i < la.size() || j < ra.size()) {
    const Real* x = nullptr;
    if (i < la.size() && (j >= ra.size() || la[i].position <= ra[j].position)) {
      x = &la[i].position;
    } else {
      x = &ra[j].position;
    }
    const Real at(*x, p);
    while (i < la.size() && la[i].position == at) fl += la[i++].weight;
    while (j < ra.size() && ra[j].position == at) fr += ra[j++].weight;
    mpfr_sub(diff.raw(), fl.raw(), fr.raw(), MPFR_RNDN);
    if (mpfr_cmpabs(diff.raw(), best.raw()) > 0) mpfr_abs(best.raw(), diff.raw(), MPFR_RNDN);
  }
  return best;
}

std::string_view to_string(ConjectureTarget t) noexcept {
  switch (t) {
    case ConjectureTarget::cantor_ap:
      return "cantor-ap";
    case ConjectureTarget::cantor_widom:
      return "cantor-widom";
    case ConjectureTarget::gamma_ap:
      return "gamma-ap";
    case ConjectureTarget::julia_identities:
      return "julia-identities";
  }
  return "julia-identities";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::consistent:
      return "consistent";
    case Verdict::inconsistent:
      return "inconsistent";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

ConjectureTarget parse_conjecture_target(std::string_view s) {
  for (auto t : {ConjectureTarget::cantor_ap, ConjectureTarget::cantor_widom,
                 ConjectureTarget::gamma_ap, ConjectureTarget::julia_identities}) {
    if (to_string(t) == s) return t;
  }
  throw DomainError("unknown conjecture target '" + std::string(s) + "'");
}

std::vector<std::size_t> fit_tail_ladder(std::size_t length, std::size_t window,
                                         const std::vector<std::size_t>& requested) {
  std::vector<std::size_t> kept;
  for (std::size_t t : requested) {
    if (t >= 1 && t + 2 * window <= length) kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.size() >= 2) return kept;
  if (length < 2 * window + 1) {
    throw LengthError("window " + std::to_string(window) + " is too large for " +
                      std::to_string(length) + " coefficients");
  }
  std::size_t top = 1;
  while (2 * top + 2 * window <= length) top *= 2;
  std::vector<std::size_t> ladder;
  for (std::size_t t = top, i = 0; i < 4 && t >= 1; t /= 2, ++i) ladder.insert(ladder.begin(), t);
  return ladder;
}

namespace {

json str(const Real& x) { return x.to_string(); }

json input_echo(ConjectureTarget target, const ConjectureInputs& in, std::size_t n) {
  json j;
  j["target"] = std::string(to_string(target));
  j["n"] = n;
  j["precision_bits"] = in.coeffs->precision_bits();
  j["provenance"] = std::string(to_string(in.coeffs->provenance()));
  j["source"] = in.description;
  return j;
}

ConjectureReport identities_report(const ConjectureInputs& in, const JacobiCoeffs& coeffs) {
  if (!in.c) throw DomainError("julia-identities report needs c");
  const Precision p = coeffs.precision_bits();
  const Real threshold =
      in.residual_threshold ? *in.residual_threshold : pow2(-p + 10, p) * max(*in.c, Real(1.0, p));
  const Real residual = julia_identity_residual(coeffs, *in.c);
  ConjectureReport r;
  r.findings["c"] = str(*in.c);
  r.findings["max_residual"] = str(residual);
  r.findings["threshold"] = str(threshold);
  r.verdict = residual <= threshold ? Verdict::consistent : Verdict::inconsistent;
  r.criterion =
      "consistent iff max_n max(|a_2n^2 + a_2n+1^2 - c|, |a_2n^2 a_2n-1^2 - a_n^2|) <= "
      "threshold; inconsistent otherwise";
  return r;
}

ConjectureReport widom_report(const ConjectureInputs& in, const JacobiCoeffs& coeffs,
                              std::size_t n) {
  if (!in.capacity) throw DomainError("cantor-widom report needs a capacity estimate");
  const WidomSeries w = widom_series(coeffs, *in.capacity, n);
  ConjectureReport r;
  json& f = r.findings;
  f["capacity"] = {{"value", str(in.capacity->value)},
                   {"uncertainty", str(in.capacity->uncertainty)},
                   {"method", std::string(to_string(in.capacity->method))},
                   {"inflated", in.capacity->inflated}};
  std::size_t arg_inf = 0, arg_sup = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (arg_inf == 0 && w.values[k - 1] == w.inf_observed) arg_inf = k;
    if (arg_sup == 0 && w.values[k - 1] == w.sup_observed) arg_sup = k;
  }
  f["inf_W"] = str(w.inf_observed);
  f["sup_W"] = str(w.sup_observed);
  f["argmin_W"] = arg_inf;
  f["argmax_W"] = arg_sup;
  // Running minimum of a_n at powers of two and over the second half: the
  // finite-range proxy for liminf a_n.
  json running = json::array();
  Real run_min = coeffs.a(1);
  std::size_t next = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    run_min = min(run_min, coeffs.a(k));
    if (k == next || k == n) {
      running.push_back({{"n", k}, {"min_a", str(run_min)}});
      if (k == next) next *= 2;
    }
  }
  Real tail_min = coeffs.a(n / 2 + 1);
  for (std::size_t k = n / 2 + 1; k <= n; ++k) tail_min = min(tail_min, coeffs.a(k));
  f["running_min_a"] = running;
  f["min_a_second_half"] = str(tail_min);
  r.verdict = Verdict::inconclusive;
  r.criterion =
      "finite data cannot decide 0 < inf W_n <= sup W_n < infinity; the verdict is always "
      "inconclusive and the findings report the observed extrema and running minima of a_n";
  return r;
}

ConjectureReport ap_report(const ConjectureInputs& in, const JacobiCoeffs& coeffs) {
  std::vector<Real> eps = in.epsilon_grid;
  const Precision p = coeffs.precision_bits();
  if (eps.empty()) {
    for (double e : {0.1, 0.05, 0.02, 0.01}) eps.push_back(parse_real(std::to_string(e), p));
  }
  std::vector<std::size_t> windows = in.windows;
  if (windows.empty()) windows = {std::clamp<std::size_t>(coeffs.length() / 8, 1, 512)};
  const std::vector<std::size_t> requested =
      in.tails.empty() ? std::vector<std::size_t>{1024, 2048, 4096} : in.tails;

  ConjectureReport r;
  json profiles = json::array();
  bool all_decreasing = true, any_increasing = false, ladder_long_enough = true;
  for (std::size_t w : windows) {
    const std::vector<std::size_t> ladder = fit_tail_ladder(coeffs.length(), w, requested);
    const AsymptoticAPReport rep = asymptotic_ap_scan(coeffs, eps, {w}, ladder);
    const TailProfile& prof = rep.profiles.front();
    json pj;
    pj["window"] = w;
    pj["tails"] = prof.tails;
    pj["scan_bound"] = rep.scan_bound;
    json best = json::array();
    for (std::size_t i = 0; i < prof.tails.size(); ++i) {
      best.push_back({{"tail", prof.tails[i]},
                      {"best_shift", prof.best_shift[i]},
                      {"best_deviation", str(prof.best_deviation[i])}});
    }
    pj["best"] = best;
    pj["deviation_decreasing"] = prof.deviation_decreasing;
    json table = json::array();
    for (const APScanReport& s : rep.reports) {
      table.push_back({{"tail", s.tail_start},
                       {"epsilon", str(s.epsilon)},
                       {"almost_period_count", s.almost_periods.size()},
                       {"first_almost_period", s.almost_periods.empty()
                                                   ? json(nullptr)
                                                   : json(s.almost_periods.front())},
                       {"max_gap", s.max_gap},
                       {"relatively_dense", s.relatively_dense}});
    }
    pj["density_table"] = table;
    profiles.push_back(pj);

    all_decreasing = all_decreasing && prof.deviation_decreasing;
    if (prof.tails.size() < 4) ladder_long_enough = false;
    if (prof.best_deviation.size() >= 2 &&
        prof.best_deviation.back() >= prof.best_deviation.front()) {
      any_increasing = true;
    }
  }
  r.findings["profiles"] = profiles;
  if (any_increasing) {
    r.verdict = Verdict::inconsistent;
  } else if (all_decreasing && ladder_long_enough) {
    r.verdict = Verdict::consistent;
  } else {
    r.verdict = Verdict::inconclusive;
  }
  r.criterion =
      "per window, the best shift deviation over a common shift range is tracked along a "
      "doubling tail ladder; consistent iff it strictly decreases for every window across at "
      "least 3 doublings (4 tails); inconsistent iff for some window the last tail's "
      "deviation is not below the first's; inconclusive otherwise. This is a finite-data "
      "heuristic, never a proof";
  return r;
}

}  // namespace

ConjectureReport conjecture_report(ConjectureTarget target, const ConjectureInputs& inputs) {
  if (inputs.coeffs == nullptr) throw DomainError("conjecture report needs coefficients");
  const std::size_t n = inputs.n == 0 ? inputs.coeffs->length() : inputs.n;
  const JacobiCoeffs coeffs = inputs.coeffs->prefix(n);
  ConjectureReport r;
  switch (target) {
    case ConjectureTarget::julia_identities:
      r = identities_report(inputs, coeffs);
      break;
    case ConjectureTarget::cantor_widom:
      r = widom_report(inputs, coeffs, n);
      break;
    case ConjectureTarget::cantor_ap:
    case ConjectureTarget::gamma_ap:
      r = ap_report(inputs, coeffs);
      break;
  }
  r.target = target;
  r.inputs = input_echo(target, inputs, n);
  return r;
}

}  // namespace cantorlab
