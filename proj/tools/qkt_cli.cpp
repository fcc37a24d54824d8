// qkt verify: builds an example manifold, runs the identity suites and writes
// a JSON report. Exit code 0 iff every selected identity passes, 1 if some
// identity fails, 2 on bad input.

#include "qkt/suite.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference verification of quaternionic Kaehler-with-torsion identities"};
  app.require_subcommand(1);

  CLI::App* verify = app.add_subcommand("verify", "Run the identity suites on an example manifold");
  verify->set_help_flag("--help", "Print this help message and exit");
  std::string kind = "flat";
  int n = 1;
  std::string f, t, probe_f, suite = "all", report_path, domain;
  std::uint64_t seed = 42;
  int points = 20;
  double h = 1e-4, h2 = 1e-3, perturb = 0.0;
  int threads = 1;
  bool quiet = false;
  std::vector<std::string> overrides;

  verify->add_option("--manifold", kind, "flat | conformal_flat | dim4_torsion | hopf_local")->required();
  verify->add_option("--n", n, "Quaternionic dimension (real dimension 4n)");
  verify->add_option("--f", f, "Conformal factor expression in x1..x4n");
  verify->add_option("--t", t, "Torsion 1-form components e1,e2,e3,e4 (dimension 4)");
  verify->add_option("--points", points, "Number of sample points");
  verify->add_option("--seed", seed, "Halton index offset");
  verify->add_option("--h", h, "First-level FD step");
  verify->add_option("--h2", h2, "Nested FD step");
  verify->add_option("--suite", suite, "all | connection | conformal | curvature | dim4 (comma list allowed)");
  verify->add_option("--report", report_path, "Write the JSON report here");
  verify->add_option("--tol-override", overrides, "id=value, repeatable");
  verify->add_option("--domain", domain, "lo,hi for every coordinate");
  verify->add_option("--probe-f", probe_f, "Factor used by the conformal suite on non-rescaled kinds");
  verify->add_option("--perturb-j2", perturb, "Rotate J2 by this many degrees (negative control)");
  verify->add_option("--threads", threads, "Worker threads for point evaluation")->check(CLI::PositiveNumber);
  verify->add_flag("--quiet", quiet, "Suppress the per-identity summary");

  CLI11_PARSE(app, argc, argv);

  try {
    qkt::ManifoldSpec spec;
    spec.kind = qkt::parse_manifold_kind(kind);
    spec.n = n;
    if (!f.empty()) spec.f = f;
    if (!t.empty()) {
      const auto parts = split(t, ',');
      if (parts.size() != 4) throw qkt::DomainError("--t needs exactly four comma-separated components");
      spec.t = std::array<std::string, 4>{parts[0], parts[1], parts[2], parts[3]};
    }
    if (!probe_f.empty()) spec.probe_f = probe_f;
    spec.seed = seed;
    spec.points = points;
    spec.scheme.h = h;
    spec.scheme.h2 = h2;
    spec.perturb_j2_degrees = perturb;
    if (!domain.empty()) {
      const auto parts = split(domain, ',');
      if (parts.size() != 2) throw qkt::DomainError("--domain needs lo,hi");
      spec.domain = qkt::Box::cube(4 * n, std::stod(parts[0]), std::stod(parts[1]));
    }
    for (const std::string& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw qkt::DomainError("--tol-override needs id=value, got '" + o + "'");
      spec.tolerance_overrides[o.substr(0, eq)] = std::stod(o.substr(eq + 1));
    }

    const qkt::VerificationReport report =
        qkt::run_suite(spec, qkt::SuiteSelection::parse(suite), qkt::RunOptions{threads});
    if (!quiet) std::cout << report.summary();
    if (!report_path.empty()) {
      std::ofstream out(report_path);
      if (!out) throw qkt::DomainError("cannot write report to '" + report_path + "'");
      out << report.to_json().dump(2) << "\n";
    }
    return report.all_pass() ? 0 : 1;
  } catch (const qkt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed number (" << e.what() << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
