// Batch front end. Each subcommand builds an experiment config and runs it;
// `run --config` takes a full config document.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cantorlab/errors.hpp"
#include "cantorlab/experiment.hpp"
#include "cantorlab/io.hpp"

namespace {

using nlohmann::json;
using cantorlab::ConfigError;

struct CommonOptions {
  std::optional<long> precision_bits;
  std::optional<std::size_t> threads;
  std::optional<std::string> output_dir;
  bool untrusted = false;
  bool print_config = false;
};

struct MeasureOptions {
  std::string kind = "quadratic-julia";
  std::string c = "3";
  std::vector<std::string> gamma;
  std::string gamma_constant = "1/8";
  std::size_t gamma_length = 64;
  std::size_t level = 14;
  std::size_t base_nodes = 8;
  std::size_t n_coeffs = 64;
  std::vector<std::string> routes;
  std::string reorthogonalization = "full";
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--precision-bits", o.precision_bits,
                  "working precision in bits (default $CANTORLAB_PRECISION_BITS or 256)");
  app->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  app->add_option("--output-dir", o.output_dir, "directory for artifacts");
  app->add_flag("--untrusted", o.untrusted, "allow coefficient counts beyond the trust rule");
  app->add_flag("--print-config", o.print_config, "print the synthesized config and exit");
}

void add_measure(CLI::App* app, MeasureOptions& m) {
  app->add_option("--measure", m.kind, "quadratic-julia, gamma-julia or cantor")
      ->check(CLI::IsMember({"quadratic-julia", "gamma-julia", "cantor"}));
  app->add_option("--c", m.c, "parameter of z^2 - c");
  app->add_option("--gamma", m.gamma, "explicit gamma sequence");
  app->add_option("--gamma-constant", m.gamma_constant, "constant gamma value");
  app->add_option("--gamma-length", m.gamma_length, "length of the constant gamma sequence");
  app->add_option("--level", m.level, "refinement level of the discrete approximant");
  app->add_option("--base-nodes", m.base_nodes, "Gauss nodes of the IFS base rule");
  app->add_option("-n,--n-coeffs", m.n_coeffs, "number of coefficients");
  app->add_option("--routes", m.routes, "exact, lanczos, chebyshev");
  app->add_option("--reorthogonalization", m.reorthogonalization, "full or none")
      ->check(CLI::IsMember({"full", "none"}));
}

json build_config(const MeasureOptions& m, std::vector<std::string> diagnostics) {
  json measure = {{"kind", m.kind}};
  if (m.kind == "quadratic-julia") {
    measure["c"] = m.c;
  } else if (m.kind == "gamma-julia") {
    if (!m.gamma.empty()) {
      measure["gamma"] = m.gamma;
    } else {
      measure["gamma_constant"] = m.gamma_constant;
      measure["gamma_length"] = m.gamma_length;
    }
  } else {
    measure["base_nodes"] = m.base_nodes;
  }
  std::vector<std::string> routes = m.routes;
  if (routes.empty()) routes = {m.kind == "quadratic-julia" ? "exact" : "lanczos"};
  return {{"measure", measure},
          {"level", m.level},
          {"n_coeffs", m.n_coeffs},
          {"routes", routes},
          {"diagnostics", diagnostics},
          {"lanczos_reorthogonalization", m.reorthogonalization}};
}

void apply_common(json& doc, const CommonOptions& o) {
  if (o.precision_bits) doc["precision_bits"] = *o.precision_bits;
  if (o.threads) doc["threads"] = *o.threads;
  if (o.output_dir) doc["output_dir"] = *o.output_dir;
  if (o.untrusted) doc["untrusted"] = true;
}

int execute(const json& doc, bool print_only) {
  try {
    const cantorlab::ExperimentConfig cfg = cantorlab::parse_config(doc);
    if (print_only) {
      json echo = cantorlab::config_to_json(cfg);
      echo["output_dir"] = cfg.output_dir.string();
      std::cout << cantorlab::io::dump(echo);
      return 0;
    }
    const cantorlab::RunOutcome out = cantorlab::run_experiment(cfg);
    if (out.exit_code != 0) {
      std::cerr << "cantorlab: " << out.status << ": " << out.message << "\n";
    } else {
      std::cout << (cfg.output_dir / "manifest.json").string() << "\n";
    }
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "cantorlab: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cantorlab: " << e.what() << "\n";
    return cantorlab::exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cantorlab: recurrence coefficients and potential theory of fractal measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cantorlab::kToolVersion);

  CommonOptions common;
  MeasureOptions measure;
  json doc;
  bool print_only = false;

  auto simple = [&](const char* name, const char* help, std::vector<std::string> diagnostics) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, common);
    add_measure(sub, measure);
    sub->callback([&, diagnostics] {
      doc = build_config(measure, diagnostics);
      print_only = common.print_config;
    });
    return sub;
  };

  simple("coeffs", "compute recurrence coefficients by the requested routes", {});
  simple("widom", "Widom factors and regularity index", {"capacity", "widom", "regularity"});
  simple("capacity", "capacity estimate", {"capacity"});

  std::vector<std::string> epsilons;
  std::vector<std::size_t> windows, tails;
  CLI::App* apscan = simple("apscan", "almost-periodicity scan", {"apscan"});
  apscan->add_option("--epsilon", epsilons, "epsilon grid");
  apscan->add_option("--window", windows, "window lengths");
  apscan->add_option("--tail", tails, "tail starts");

  std::vector<std::size_t> dos_orders;
  CLI::App* dos = simple("dos", "zero-counting measures against the level approximant", {"dos"});
  dos->add_option("--order", dos_orders, "truncation orders");

  std::vector<std::string> points;
  std::optional<std::size_t> green_levels;
  std::vector<std::size_t> lyapunov_orders;
  CLI::App* green = simple("green", "Green function and Lyapunov exponents", {"green-lyapunov"});
  green->add_option("--point", points, "grid point as re,im (upper half-plane)");
  green->add_option("--green-levels", green_levels, "composition depth");
  green->add_option("--lyapunov-order", lyapunov_orders, "transfer-matrix lengths");

  std::vector<std::string> targets;
  CLI::App* report = simple("report", "conjecture consistency report", {"report"});
  report->add_option("--target", targets,
                     "cantor-ap, cantor-widom, gamma-ap or julia-identities");
  report->add_option("--epsilon", epsilons, "epsilon grid");
  report->add_option("--window", windows, "window lengths");
  report->add_option("--tail", tails, "tail starts");

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run a full experiment from a JSON config");
  run->add_option("--config", config_path, "config file")->required();
  add_common(run, common);
  run->callback([&] {
    try {
      doc = json::parse(cantorlab::io::read_file(config_path));
    } catch (const json::parse_error& e) {
      throw CLI::ValidationError("--config", e.what());
    } catch (const cantorlab::Error& e) {
      throw CLI::ValidationError("--config", e.what());
    }
    print_only = common.print_config;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!epsilons.empty()) doc["epsilon_grid"] = epsilons;
  if (!windows.empty()) doc["windows"] = windows;
  if (!tails.empty()) doc["tails"] = tails;
  if (!dos_orders.empty()) doc["dos_orders"] = dos_orders;
  if (!lyapunov_orders.empty()) doc["lyapunov_orders"] = lyapunov_orders;
  if (green_levels) doc["green_levels"] = *green_levels;
  if (!targets.empty()) doc["report_targets"] = targets;
  if (!points.empty()) {
    json grid = json::array();
    for (const std::string& p : points) {
      const auto comma = p.find(',');
      if (comma == std::string::npos) {
        std::cerr << "cantorlab: config error: --point expects re,im\n";
        return 2;
      }
      grid.push_back({p.substr(0, comma), p.substr(comma + 1)});
    }
    doc["grid"] = grid;
  }
  if (doc.is_object() && !doc.contains("output_dir") && !common.output_dir) {
    doc["output_dir"] = "out";
  }
  apply_common(doc, common);
  return execute(doc, print_only);
}
