// Config-driven scenario runner: JSON world/learner specs in, deterministic
// CSV/JSON artifacts out.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pacman/bounds.hpp"
#include "pacman/verify.hpp"

namespace pacman {

struct RandomHypothesesSpec {
  Eigen::Index count = 1;
  std::uint64_t seed = 0;
};

struct Scenario {
  int schema_version = 1;
  World world;
  HypothesisSet hypotheses;
  Learner learner;
  std::vector<BoundSpec> bounds;
  VerifyMode mode = VerifyMode::exact;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  // Present when hypotheses were generated, so sweeps can regenerate.
  std::optional<RandomHypothesesSpec> random_hypotheses;
  bool explicit_prior = false;
};

Scenario scenario_from_json(const nlohmann::json& config);
Scenario load_scenario(const std::filesystem::path& path);

// Reads PACMAN_ENUM_CAP, falling back to the default cap.
std::int64_t enum_cap_from_env();

// Fixed-width float formatting for CSV cells: 17 significant digits.
std::string format_double(double v);

struct RunArtifacts {
  std::filesystem::path analysis_csv;  // empty when enumeration was skipped
  std::filesystem::path summary_json;
  bool enumeration_ok = true;
};

// Writes analysis.csv (per-(S,h) rows with per-bound epsilon columns) and
// summary.json. With mode mc/both an enumeration-cap overflow downgrades to
// sampling-only verification of the bounds that need no exact analysis.
RunArtifacts run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                          std::int64_t enum_cap = kDefaultEnumCap);

// Long-format parameter sweep; one row per (value, bound).
// parameter is one of: gamma, n, delta, alpha, beta, h_count.
std::filesystem::path sweep_scenario(const Scenario& scenario, const std::string& parameter,
                                     const std::vector<double>& values,
                                     const std::filesystem::path& out_dir,
                                     std::int64_t enum_cap = kDefaultEnumCap);

// Runs verification for the given bounds; writes verify.csv when out_dir is
// nonempty and prints one line per bound. Returns the failing-bound count.
int verify_scenario(const Scenario& scenario, const std::vector<BoundSpec>& bounds,
                    const std::filesystem::path& out_dir,
                    std::int64_t enum_cap = kDefaultEnumCap);

// Applies a sweep parameter to a copy of the scenario.
Scenario scenario_with_parameter(const Scenario& scenario, const std::string& parameter,
                                 double value);

}  // namespace pacman
