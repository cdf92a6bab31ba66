#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cantorlab/bigfloat.hpp"
#include "cantorlab/jacobi.hpp"
#include "cantorlab/measure.hpp"
#include "cantorlab/potential.hpp"

namespace cantorlab {

struct WidomSeries {
  /// W_1..W_N.
  std::vector<Real> values;
  CapacityEstimate capacity_used;
  Real inf_observed;
  Real sup_observed;
};

/// W_n = exp(sum_{k<=n} log a_k - n log cap).
WidomSeries widom_series(const JacobiCoeffs& coeffs, const CapacityEstimate& cap, std::size_t n);

/// g_n = (a_1...a_n)^(1/n) for n = 1..N.
std::vector<Real> regularity_index(const JacobiCoeffs& coeffs, std::size_t n);

/// d_k = max over n in [tail_start, tail_start + window] of
/// max(|a_{n+k} - a_n|, |b_{n+k} - b_n|), for k = 1..max_shift (index k-1).
std::vector<Real> shift_deviations(const JacobiCoeffs& coeffs, std::size_t window,
                                   std::size_t tail_start, std::size_t max_shift);

struct APScanReport {
  Real epsilon;
  std::size_t window_length = 0;
  std::size_t tail_start = 0;
  std::size_t scan_bound = 0;
  std::size_t declared_gap = 0;
  /// Every k in [1, scan_bound] with d_k <= epsilon, ascending.
  std::vector<std::size_t> almost_periods;
  /// Largest gap in {0} U almost_periods U {scan_bound + 1}.
  std::size_t max_gap = 0;
  bool relatively_dense = false;
  std::size_t best_shift = 0;
  Real best_deviation;
};

/// Scans shifts 1..max_shift (0 = as many as the data allows). The relative
/// density verdict compares max_gap with `declared_gap` (0 = the window).
APScanReport ap_scan(const JacobiCoeffs& coeffs, const Real& epsilon, std::size_t window,
                     std::size_t tail_start, std::size_t max_shift = 0,
                     std::size_t declared_gap = 0);

/// Builds the reports for one deviation table without rescanning.
APScanReport ap_report_from_deviations(const std::vector<Real>& deviations, const Real& epsilon,
                                       std::size_t window, std::size_t tail_start,
                                       std::size_t declared_gap);

struct TailProfile {
  std::size_t window = 0;
  std::vector<std::size_t> tails;
  /// Best (smallest) shift deviation per tail over the common shift range.
  std::vector<Real> best_deviation;
  std::vector<std::size_t> best_shift;
  /// Strictly decreasing along the ladder.
  bool deviation_decreasing = false;
};

struct AsymptoticAPReport {
  std::size_t scan_bound = 0;
  std::vector<APScanReport> reports;  // ordered by window, tail, epsilon
  std::vector<TailProfile> profiles;  // one per window
};

/// ap_scan over every (epsilon, window, tail). All tails of one window share
/// the shift range 1..N - max(tails) - window so their deviations compare.
AsymptoticAPReport asymptotic_ap_scan(const JacobiCoeffs& coeffs,
                                      const std::vector<Real>& epsilon_grid,
                                      const std::vector<std::size_t>& windows,
                                      const std::vector<std::size_t>& tails);

/// Max over valid n of |a_2n^2 + a_2n+1^2 - c| and |a_2n^2 a_2n-1^2 - a_n^2|.
Real julia_identity_residual(const JacobiCoeffs& coeffs, const Real& c);

/// Kolmogorov-Smirnov distance sup_x |F_lhs(x) - F_rhs(x)|.
Real dos_compare(const DiscreteMeasure& lhs, const DiscreteMeasure& rhs);

enum class ConjectureTarget { cantor_ap, cantor_widom, gamma_ap, julia_identities };
enum class Verdict { consistent, inconsistent, inconclusive };

std::string_view to_string(ConjectureTarget t) noexcept;
std::string_view to_string(Verdict v) noexcept;
ConjectureTarget parse_conjecture_target(std::string_view s);

struct ConjectureInputs {
  const JacobiCoeffs* coeffs = nullptr;
  /// Coefficients to use (0 = all).
  std::size_t n = 0;
  std::optional<CapacityEstimate> capacity;  // cantor-widom
  std::optional<Real> c;                     // julia-identities
  std::optional<Real> residual_threshold;    // julia-identities (default 2^(-p+10) * c)
  std::vector<Real> epsilon_grid;            // AP targets
  std::vector<std::size_t> windows;
  std::vector<std::size_t> tails;
  /// Free-form description of how the coefficients were produced.
  nlohmann::json description = nlohmann::json::object();
};

struct ConjectureReport {
  ConjectureTarget target = ConjectureTarget::julia_identities;
  nlohmann::json inputs;
  nlohmann::json findings;
  Verdict verdict = Verdict::inconclusive;
  std::string criterion;
};

ConjectureReport conjecture_report(ConjectureTarget target, const ConjectureInputs& inputs);

/// Tails from `requested` that leave at least `window` shifts; if fewer than
/// two qualify, a doubling ladder of four tails ending at the largest power
/// of two that does.
std::vector<std::size_t> fit_tail_ladder(std::size_t length, std::size_t window,
                                         const std::vector<std::size_t>& requested);

}  // namespace cantorlab
