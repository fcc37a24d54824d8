#pragma once

#include "qkt/zoo.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qkt {

enum class Suite { Connection, Conformal, Curvature, Dim4 };

std::string to_string(Suite s);

struct SuiteSelection {
  bool connection = true;
  bool conformal = true;
  bool curvature = true;
  bool dim4 = true;

  bool includes(Suite s) const;
  /// "all", "connection", "conformal", "curvature", "dim4", or a comma list.
  static SuiteSelection parse(const std::string& text);
  static SuiteSelection only(Suite s);
};

struct IdentityInfo {
  std::string id;
  std::string formula;
  Suite suite;
  double tolerance;
};

/// The fixed list of identities in report order.
const std::vector<IdentityInfo>& identity_catalogue();
/// Throws DomainError for an unknown id.
const IdentityInfo& identity_info(const std::string& id);

struct IdentityRecord {
  std::string identity_id;
  std::string paper_equation;
  int points = 0;
  double max_residual = 0.0;  // NaN if any evaluation produced NaN
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  nlohmann::json meta;
  std::vector<IdentityRecord> results;
  /// Diagnostic quantities (classification flags, λ, Einstein deviations, ...).
  nlohmann::json classification;

  bool all_pass() const;
  const IdentityRecord* find(const std::string& id) const;
  nlohmann::json to_json() const;
  /// JSON without the timestamp, for run-to-run comparison.
  std::string body() const;
  std::string summary() const;
};

struct RunOptions {
  int threads = 1;
};

/// Builds the manifold and evaluates every applicable identity of the selected
/// suites at the sample points. A structure that fails the existence condition
/// yields a failing report carrying the residual; other build errors propagate.
VerificationReport run_suite(const ManifoldSpec& spec, const SuiteSelection& selection, const RunOptions& options = {});

std::string artifact_version();

}  // namespace qkt
