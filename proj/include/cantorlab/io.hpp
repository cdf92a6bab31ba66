#pragma once

// File formats. Every number is written as a decimal string with enough
// digits to round-trip at its precision.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cantorlab/coeffs.hpp"
#include "cantorlab/diagnostics.hpp"
#include "cantorlab/jacobi.hpp"
#include "cantorlab/measure.hpp"
#include "cantorlab/potential.hpp"

namespace cantorlab::io {

using nlohmann::json;

/// CSV with header `n,a,b`.
std::string coeffs_csv(const JacobiCoeffs& c);
JacobiCoeffs parse_coeffs_csv(std::string_view text, Precision bits, Provenance provenance);

/// {length, precision_bits, provenance, a: [...], b: [...]}.
json coeffs_json(const JacobiCoeffs& c);
JacobiCoeffs coeffs_from_json(const json& j);

/// CSV with header `position,weight`.
std::string measure_csv(const DiscreteMeasure& m);
DiscreteMeasure parse_measure_csv(std::string_view text, Precision bits);

/// CSV with header `n,W_n`.
std::string widom_csv(const WidomSeries& w);
/// CSV with header `n,g_n`.
std::string regularity_csv(const std::vector<Real>& g);

struct GridRow {
  Complex z;
  Real value;
  Real uncertainty;
};
/// CSV with header `re_z,im_z,value,uncertainty`.
std::string grid_csv(const std::vector<GridRow>& rows);

json crossval_json(const CrossValidationReport& r);
json capacity_json(const CapacityEstimate& c);
json widom_summary_json(const WidomSeries& w);
json ap_report_json(const APScanReport& r);
json asymptotic_json(const AsymptoticAPReport& r);
json conjecture_json(const ConjectureReport& r);

/// Pretty JSON with sorted keys and a trailing newline.
std::string dump(const json& j);

/// Writes through a temporary file in the same directory and renames it.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view content);

}  // namespace cantorlab::io
