#include "cantorlab/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cantorlab/errors.hpp"

namespace cantorlab::io {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::vector<std::string_view>> csv_rows(std::string_view text,
                                                    std::string_view header) {
  std::vector<std::vector<std::string_view>> rows;
  bool first = true;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (first) {
      if (line != header) {
        throw DomainError("expected CSV header '" + std::string(header) + "', got '" +
                          std::string(line) + "'");
      }
      first = false;
      continue;
    }
    rows.push_back(split(line, ','));
  }
  if (first) throw DomainError("CSV is missing its header");
  return rows;
}

json str(const Real& x) { return x.to_string(); }

}  // namespace

std::string coeffs_csv(const JacobiCoeffs& c) {
  std::string out = "n,a,b\n";
  for (std::size_t k = 1; k <= c.length(); ++k) {
    out += std::to_string(k) + "," + c.a(k).to_string() + "," + c.b(k).to_string() + "\n";
  }
  return out;
}

JacobiCoeffs parse_coeffs_csv(std::string_view text, Precision bits, Provenance provenance) {
  std::vector<Real> a, b;
  std::size_t expect = 1;
  for (const auto& row : csv_rows(text, "n,a,b")) {
    if (row.size() != 3) throw DomainError("coefficient rows need three fields");
    if (std::string(row[0]) != std::to_string(expect)) {
      throw DomainError("coefficient rows must be numbered 1, 2, ... in order");
    }
    a.push_back(parse_real(row[1], bits));
    b.push_back(parse_real(row[2], bits));
    ++expect;
  }
  return JacobiCoeffs(std::move(a), std::move(b), bits, provenance);
}

json coeffs_json(const JacobiCoeffs& c) {
  json j;
  j["length"] = c.length();
  j["precision_bits"] = c.precision_bits();
  j["provenance"] = std::string(to_string(c.provenance()));
  json a = json::array(), b = json::array();
  for (std::size_t k = 1; k <= c.length(); ++k) {
    a.push_back(c.a(k).to_string());
    b.push_back(c.b(k).to_string());
  }
  j["a"] = std::move(a);
  j["b"] = std::move(b);
  return j;
}

JacobiCoeffs coeffs_from_json(const json& j) {
  const Precision bits = j.at("precision_bits").get<Precision>();
  const auto prov = parse_provenance(j.at("provenance").get<std::string>());
  std::vector<Real> a, b;
  for (const auto& v : j.at("a")) a.push_back(parse_real(v.get<std::string>(), bits));
  for (const auto& v : j.at("b")) b.push_back(parse_real(v.get<std::string>(), bits));
  if (a.size() != j.at("length").get<std::size_t>()) {
    throw LengthError("coefficient record length does not match its arrays");
  }
  return JacobiCoeffs(std::move(a), std::move(b), bits, prov);
}

std::string measure_csv(const DiscreteMeasure& m) {
  std::string out = "position,weight\n";
  for (const Atom& a : m.atoms()) {
    out += a.position.to_string() + "," + a.weight.to_string() + "\n";
  }
  return out;
}

DiscreteMeasure parse_measure_csv(std::string_view text, Precision bits) {
  std::vector<Atom> atoms;
  for (const auto& row : csv_rows(text, "position,weight")) {
    if (row.size() != 2) throw DomainError("measure rows need two fields");
    atoms.push_back({parse_real(row[0], bits), parse_real(row[1], bits)});
  }
  return DiscreteMeasure(std::move(atoms));
}

std::string widom_csv(const WidomSeries& w) {
  std::string out = "n,W_n\n";
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    out += std::to_string(k + 1) + "," + w.values[k].to_string() + "\n";
  }
  return out;
}

std::string regularity_csv(const std::vector<Real>& g) {
  std::string out = "n,g_n\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    out += std::to_string(k + 1) + "," + g[k].to_string() + "\n";
  }
  return out;
}

std::string grid_csv(const std::vector<GridRow>& rows) {
  std::string out = "re_z,im_z,value,uncertainty\n";
  for (const GridRow& r : rows) {
    out += r.z.re.to_string() + "," + r.z.im.to_string() + "," + r.value.to_string() + "," +
           r.uncertainty.to_string() + "\n";
  }
  return out;
}

json crossval_json(const CrossValidationReport& r) {
  json j;
  j["n_compared"] = r.n_compared;
  j["max_abs_dev_a"] = str(r.max_abs_dev_a);
  j["max_abs_dev_b"] = str(r.max_abs_dev_b);
  j["first_divergence_index"] =
      r.first_divergence_index ? json(*r.first_divergence_index) : json(nullptr);
  return j;
}

json capacity_json(const CapacityEstimate& c) {
  return {{"value", str(c.value)},
          {"uncertainty", str(c.uncertainty)},
          {"method", std::string(to_string(c.method))},
          {"inflated", c.inflated}};
}

json widom_summary_json(const WidomSeries& w) {
  return {{"length", w.values.size()},
          {"capacity_used", capacity_json(w.capacity_used)},
          {"inf_observed", str(w.inf_observed)},
          {"sup_observed", str(w.sup_observed)}};
}

json ap_report_json(const APScanReport& r) {
  return {{"epsilon", str(r.epsilon)},
          {"window_length", r.window_length},
          {"tail_start", r.tail_start},
          {"scan_bound", r.scan_bound},
          {"declared_gap", r.declared_gap},
          {"almost_periods", r.almost_periods},
          {"max_gap", r.max_gap},
          {"relatively_dense", r.relatively_dense},
          {"best_shift", r.best_shift},
          {"best_deviation", str(r.best_deviation)}};
}

json asymptotic_json(const AsymptoticAPReport& r) {
  json reports = json::array();
  for (const APScanReport& s : r.reports) reports.push_back(ap_report_json(s));
  json profiles = json::array();
  for (const TailProfile& p : r.profiles) {
    json best = json::array();
    for (const Real& d : p.best_deviation) best.push_back(str(d));
    profiles.push_back({{"window", p.window},
                        {"tails", p.tails},
                        {"best_deviation", best},
                        {"best_shift", p.best_shift},
                        {"deviation_decreasing", p.deviation_decreasing}});
  }
  return {{"scan_bound", r.scan_bound}, {"reports", reports}, {"profiles", profiles}};
}

json conjecture_json(const ConjectureReport& r) {
  return {{"target", std::string(to_string(r.target))},
          {"inputs", r.inputs},
          {"findings", r.findings},
          {"verdict", std::string(to_string(r.verdict))},
          {"criterion", r.criterion}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace cantorlab::io
