#include "pacman/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "pacman/classifier.hpp"
#include "pacman/errors.hpp"
#include "pacman/logsum.hpp"

namespace pacman {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigParse(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end())
      throw ConfigParse(where + ": unknown field '" + key + "'");
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigParse(where + ": missing field '" + key + "'");
  return *it;
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigParse(where + ": expected a number");
  return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigParse(where + ": expected an integer");
  return v.get<std::int64_t>();
}

Eigen::VectorXd as_vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigParse(where + ": expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const auto& e : v) out[i++] = as_double(e, where);
  return out;
}

World world_from_json(const json& j) {
  check_keys(j, "world", {"x_size", "y_size", "probs", "n"});
  const auto x = as_int(require(j, "world", "x_size"), "world.x_size");
  const auto y = as_int(require(j, "world", "y_size"), "world.y_size");
  if (x < 1 || y < 1) throw ConfigParse("world.x_size/y_size: must be >= 1");
  const Eigen::VectorXd probs = as_vector(require(j, "world", "probs"), "world.probs");
  if (probs.size() != x * y)
    throw ConfigParse("world.probs: expected " + std::to_string(x * y) + " entries");
  const auto n = as_int(require(j, "world", "n"), "world.n");
  if (n < 1) throw ConfigParse("world.n: must be >= 1");
  Eigen::MatrixXd w(x, y);
  for (Eigen::Index i = 0; i < x; ++i)
    for (Eigen::Index k = 0; k < y; ++k) w(i, k) = probs[i * y + k];
  try {
    return World(JointDistribution::from_weights(w), static_cast<int>(n));
  } catch (const Error& e) {
    throw ConfigParse(std::string("world.probs: ") + e.what());
  }
}

SoftClassifier classifier_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"x_size", "y_size", "rows"});
  const auto x = as_int(require(j, where, "x_size"), where + ".x_size");
  const auto y = as_int(require(j, where, "y_size"), where + ".y_size");
  const Eigen::VectorXd rows = as_vector(require(j, where, "rows"), where + ".rows");
  if (rows.size() != x * y)
    throw ConfigParse(where + ".rows: expected " + std::to_string(x * y) + " entries");
  Eigen::MatrixXd m(x, y);
  for (Eigen::Index i = 0; i < x; ++i)
    for (Eigen::Index k = 0; k < y; ++k) m(i, k) = rows[i * y + k];
  try {
    return SoftClassifier::from_rows(m);
  } catch (const Error& e) {
    throw ConfigParse(where + ".rows: " + e.what());
  }
}

BoundSpec bound_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"name", "delta", "alpha", "beta", "sigma", "nu", "t_max",
             "expected_cs"});
  BoundSpec spec;
  const json& name = require(j, where, "name");
  if (!name.is_string()) throw ConfigParse(where + ".name: expected a string");
  spec.name = name.get<std::string>();
  static const std::set<std::string> known = {"bayes",    "hellchi",     "viallard",
                                              "little",   "chernoff",    "finite_h",
                                              "subgaussian", "regular",  "bassily",
                                              "esposito"};
  if (!known.count(spec.name)) throw ConfigParse(where + ".name: unknown bound '" + spec.name + "'");
  if (j.contains("delta")) spec.params.delta = as_double(j["delta"], where + ".delta");
  if (j.contains("alpha")) spec.params.alpha = as_double(j["alpha"], where + ".alpha");
  if (j.contains("beta")) spec.params.beta = as_double(j["beta"], where + ".beta");
  if (j.contains("nu")) spec.params.nu = as_double(j["nu"], where + ".nu");
  if (j.contains("t_max")) spec.params.t_max = as_double(j["t_max"], where + ".t_max");
  if (j.contains("expected_cs")) {
    if (!j["expected_cs"].is_boolean())
      throw ConfigParse(where + ".expected_cs: expected a boolean");
    spec.params.expected_cs = j["expected_cs"].get<bool>();
  }
  if (j.contains("sigma")) {
    const json& s = j["sigma"];
    if (s.is_string()) {
      if (s.get<std::string>() != "auto")
        throw ConfigParse(where + ".sigma: expected a number or \"auto\"");
      spec.params.sigma = -1.0;
    } else {
      spec.params.sigma = as_double(s, where + ".sigma");
      if (spec.params.sigma < 0.0) throw ConfigParse(where + ".sigma: must be >= 0");
    }
  }
  return spec;
}

}  // namespace

Scenario scenario_from_json(const json& config) {
  check_keys(config, "config",
             {"schema_version", "world", "learner", "n", "bounds", "verification"});
  const auto version = as_int(require(config, "config", "schema_version"), "schema_version");
  if (version != 1) throw ConfigParse("schema_version: unsupported version");

  World world = world_from_json(require(config, "config", "world"));
  if (config.contains("n")) {
    const auto n = as_int(config["n"], "n");
    if (n < 1) throw ConfigParse("n: must be >= 1");
    world = World(world.joint, static_cast<int>(n));
  }

  const json& lj = require(config, "config", "learner");
  check_keys(lj, "learner", {"kind", "gamma", "prior", "hypotheses", "random_hypotheses"});
  const json& kind_j = require(lj, "learner", "kind");
  if (!kind_j.is_string()) throw ConfigParse("learner.kind: expected a string");
  const std::string kind_s = kind_j.get<std::string>();
  LearnerKind kind;
  if (kind_s == "gibbs_erm")
    kind = LearnerKind::gibbs_erm;
  else if (kind_s == "deterministic_erm")
    kind = LearnerKind::deterministic_erm;
  else if (kind_s == "data_independent")
    kind = LearnerKind::data_independent;
  else
    throw ConfigParse("learner.kind: unknown kind '" + kind_s + "'");
  double gamma = 0.0;
  if (lj.contains("gamma")) {
    gamma = as_double(lj["gamma"], "learner.gamma");
    if (gamma < 0.0) throw ConfigParse("learner.gamma: must be >= 0");
  }

  HypothesisSet hs;
  std::optional<RandomHypothesesSpec> random_spec;
  if (lj.contains("hypotheses") && lj.contains("random_hypotheses"))
    throw ConfigParse("learner: give either 'hypotheses' or 'random_hypotheses', not both");
  if (lj.contains("hypotheses")) {
    const json& hj = lj["hypotheses"];
    if (!hj.is_array() || hj.empty())
      throw ConfigParse("learner.hypotheses: expected a nonempty array");
    int i = 0;
    for (const auto& cj : hj)
      hs.items.push_back(
          classifier_from_json(cj, "learner.hypotheses[" + std::to_string(i++) + "]"));
  } else if (lj.contains("random_hypotheses")) {
    const json& rj = lj["random_hypotheses"];
    check_keys(rj, "learner.random_hypotheses", {"count", "seed"});
    RandomHypothesesSpec spec;
    spec.count = as_int(require(rj, "learner.random_hypotheses", "count"),
                        "learner.random_hypotheses.count");
    if (spec.count < 1) throw ConfigParse("learner.random_hypotheses.count: must be >= 1");
    spec.seed = static_cast<std::uint64_t>(
        as_int(require(rj, "learner.random_hypotheses", "seed"),
               "learner.random_hypotheses.seed"));
    hs = HypothesisSet::random(spec.count, world.x_size(), world.y_size(), spec.seed);
    random_spec = spec;
  } else {
    throw ConfigParse("learner: missing 'hypotheses' or 'random_hypotheses'");
  }
  try {
    hs.validate();
    if (hs.x_size() != world.x_size() || hs.y_size() != world.y_size())
      throw DimensionMismatch("hypothesis dimensions do not match the world");
  } catch (const Error& e) {
    throw ConfigParse(std::string("learner.hypotheses: ") + e.what());
  }

  Distribution prior = Distribution::uniform(hs.size());
  bool explicit_prior = false;
  if (lj.contains("prior")) {
    const Eigen::VectorXd w = as_vector(lj["prior"], "learner.prior");
    if (w.size() != hs.size())
      throw ConfigParse("learner.prior: expected " + std::to_string(hs.size()) + " weights");
    try {
      prior = Distribution::from_weights(w);
    } catch (const Error& e) {
      throw ConfigParse(std::string("learner.prior: ") + e.what());
    }
    explicit_prior = true;
  }

  std::vector<BoundSpec> bounds;
  const json& bj = require(config, "config", "bounds");
  if (!bj.is_array()) throw ConfigParse("bounds: expected an array");
  int i = 0;
  for (const auto& b : bj) bounds.push_back(bound_from_json(b, "bounds[" + std::to_string(i++) + "]"));

  VerifyMode mode = VerifyMode::exact;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  if (config.contains("verification")) {
    const json& vj = config["verification"];
    check_keys(vj, "verification", {"mode", "trials", "seed"});
    const json& mj = require(vj, "verification", "mode");
    if (!mj.is_string()) throw ConfigParse("verification.mode: expected a string");
    const std::string m = mj.get<std::string>();
    if (m == "exact")
      mode = VerifyMode::exact;
    else if (m == "mc")
      mode = VerifyMode::mc;
    else if (m == "both")
      mode = VerifyMode::both;
    else
      throw ConfigParse("verification.mode: unknown mode '" + m + "'");
    if (vj.contains("trials")) {
      trials = as_int(vj["trials"], "verification.trials");
      if (trials < 1) throw ConfigParse("verification.trials: must be >= 1");
    }
    if (vj.contains("seed"))
      seed = static_cast<std::uint64_t>(as_int(vj["seed"], "verification.seed"));
  }

  Scenario scenario{static_cast<int>(version),
                    std::move(world),
                    std::move(hs),
                    Learner(kind, gamma, std::move(prior)),
                    std::move(bounds),
                    mode,
                    trials,
                    seed,
                    random_spec,
                    explicit_prior};
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw ConfigParse("config is not valid JSON: " + std::string(e.what()));
  }
  return scenario_from_json(config);
}

std::int64_t enum_cap_from_env() {
  const char* raw = std::getenv("PACMAN_ENUM_CAP");
  if (raw == nullptr) return kDefaultEnumCap;
  char* end = nullptr;
  const long long v = std::strtoll(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1)
    throw ConfigParse("PACMAN_ENUM_CAP: expected a positive integer");
  return static_cast<std::int64_t>(v);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open output file: " + path.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string bound_column_name(std::size_t index, const BoundSpec& spec) {
  return "eps_" + std::to_string(index) + "_" + spec.name;
}

json params_to_json(const BoundSpec& spec) {
  json p;
  p["delta"] = spec.params.delta;
  if (spec.name == "bayes" || spec.name == "esposito") p["alpha"] = spec.params.alpha;
  if (spec.name == "bayes" || spec.name == "viallard") p["beta"] = spec.params.beta;
  if (spec.name == "regular") p["nu"] = spec.params.nu;
  if (spec.name == "chernoff") p["t_max"] = spec.params.t_max;
  if (spec.name == "hellchi" && spec.params.expected_cs) p["expected_cs"] = true;
  if (spec.name == "subgaussian")
    p["sigma"] = spec.params.sigma < 0.0 ? json("auto") : json(spec.params.sigma);
  return p;
}

json mc_to_json(const McResult& mc) {
  json out;
  out["rate"] = mc.rate;
  out["violations"] = mc.violations;
  out["trials"] = mc.trials;
  out["seed"] = mc.seed;
  out["ci99"] = {mc.ci_lo, mc.ci_hi};
  return out;
}

// Sampling-only violation estimate for bounds whose epsilon needs no exact
// analysis (finite_h, regular); used when the enumeration cap is exceeded.
McResult mc_violation_direct(const World& world, const HypothesisSet& hs,
                             const Learner& learner, double epsilon, std::int64_t trials,
                             std::uint64_t seed) {
  McResult res;
  res.trials = trials;
  res.seed = seed;
  Rng rng(seed);
  Eigen::VectorXd log_mass(hs.size());
  for (Eigen::Index h = 0; h < hs.size(); ++h) log_mass[h] = log_correct_mass(world, hs[h]);
  for (std::int64_t t = 0; t < trials; ++t) {
    const Dataset s = sample_dataset(world, world.n, rng);
    const Distribution post = posterior(learner, hs, s);
    const Eigen::Index h = rng.categorical(post.probs());
    KahanSum sum;
    for (const auto& [x, y] : s.pairs) sum.add(hs[h].log_prob(x, y) - log_mass[h]);
    const double gap = sum.value() / static_cast<double>(world.n);
    if (gap > epsilon) ++res.violations;
  }
  res.rate = static_cast<double>(res.violations) / static_cast<double>(trials);
  std::tie(res.ci_lo, res.ci_hi) = clopper_pearson(res.violations, trials);
  return res;
}

RunArtifacts run_degraded(const Scenario& scenario, const std::filesystem::path& out_dir,
                          const std::string& cap_message) {
  json summary;
  summary["schema_version"] = 1;
  summary["enumeration"] = "cap_exceeded";
  summary["enumeration_detail"] = cap_message;
  json bounds = json::array();
  for (std::size_t i = 0; i < scenario.bounds.size(); ++i) {
    const BoundSpec& spec = scenario.bounds[i];
    json entry;
    entry["name"] = spec.name;
    entry["params"] = params_to_json(spec);
    if (spec.name == "finite_h" || spec.name == "regular") {
      const double eps =
          spec.name == "finite_h"
              ? bound_finite_h(scenario.hypotheses.size(), scenario.world.n, spec.params.delta)
                    .epsilon
              : bound_regular(spec.params, scenario.world.n).epsilon;
      entry["epsilon"] = eps;
      const McResult mc =
          mc_violation_direct(scenario.world, scenario.hypotheses, scenario.learner, eps,
                              scenario.trials, scenario.seed + i);
      entry["mc"] = mc_to_json(mc);
      entry["pass"] = mc.ci_hi <= spec.params.delta;
    } else {
      entry["status"] = "skipped_enum_cap";
    }
    bounds.push_back(entry);
  }
  summary["bounds"] = bounds;

  RunArtifacts artifacts;
  artifacts.enumeration_ok = false;
  artifacts.summary_json = out_dir / "summary.json";
  std::ofstream out(artifacts.summary_json, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + artifacts.summary_json.string());
  out << summary.dump(2) << '\n';
  return artifacts;
}

}  // namespace

namespace {
void ensure_directory(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
}
}  // namespace

RunArtifacts run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                          std::int64_t enum_cap) {
  ensure_directory(out_dir);

  std::optional<LearnerAnalysis> analysis;
  try {
    analysis = LearnerAnalysis::analyze(scenario.world, scenario.hypotheses, scenario.learner,
                                        enum_cap);
  } catch (const EnumerationCapExceeded& e) {
    if (scenario.mode == VerifyMode::exact) throw;
    return run_degraded(scenario, out_dir, e.what());
  }
  const LearnerAnalysis& a = *analysis;

  std::vector<PreparedBound> prepared;
  prepared.reserve(scenario.bounds.size());
  for (const BoundSpec& spec : scenario.bounds) prepared.push_back(prepare_bound(a, spec));

  RunArtifacts artifacts;
  artifacts.analysis_csv = out_dir / "analysis.csv";
  artifacts.summary_json = out_dir / "summary.json";

  // Per-(S,h) table. Column order is part of the output contract: the eight
  // fixed columns below, then one epsilon column per configured bound.
  {
    CsvWriter csv(artifacts.analysis_csv);
    std::vector<std::string> header = {"s_index", "h_index",  "p_s",  "p_h_given_s",
                                       "ce_s",    "tilde_ce", "gap",  "log_ratio"};
    for (std::size_t i = 0; i < scenario.bounds.size(); ++i)
      header.push_back(bound_column_name(i, scenario.bounds[i]));
    csv.row(header);
    std::vector<std::string> cells(header.size());
    for (std::int64_t s = 0; s < a.num_datasets(); ++s) {
      for (Eigen::Index h = 0; h < a.num_hypotheses(); ++h) {
        const double tilde = a.tilde_ce_per_h()[h];
        const double ce = a.ce_s(s, h);
        cells[0] = std::to_string(s);
        cells[1] = std::to_string(h);
        cells[2] = format_double(std::exp(a.log_p_s()[s]));
        cells[3] = format_double(std::exp(a.log_posterior()(s, h)));
        cells[4] = format_double(ce);
        cells[5] = format_double(tilde);
        cells[6] = format_double(tilde - ce);
        cells[7] = format_double(a.gap()(s, h));
        for (std::size_t i = 0; i < prepared.size(); ++i)
          cells[8 + i] = format_double(prepared[i].eps(s, h));
        csv.row(cells);
      }
    }
  }

  json summary;
  summary["schema_version"] = 1;
  summary["enumeration"] = "exact";
  {
    json w;
    w["x_size"] = a.world().x_size();
    w["y_size"] = a.world().y_size();
    w["n"] = a.n();
    summary["world"] = w;
  }
  summary["h_count"] = a.num_hypotheses();
  summary["num_datasets"] = a.num_datasets();
  summary["mutual_information"] = a.mutual_information();
  summary["expected_gap"] = a.expected_gap();
  {
    json prior = json::array();
    for (Eigen::Index h = 0; h < a.num_hypotheses(); ++h)
      prior.push_back(std::exp(a.log_prior()[h]));
    summary["induced_prior"] = prior;
  }
  {
    json cn;
    json ts = json::array(), values = json::array();
    const double n = a.n();
    for (const double t : {n / 4.0, n / 2.0, n, 2.0 * n}) {
      ts.push_back(t);
      values.push_back(a.log_mgf(t));
    }
    cn["t"] = ts;
    cn["log_cn"] = values;
    summary["cn_samples"] = cn;
  }
  {
    // Hard/soft sandwich extremes over the hypothesis set.
    double min_lower = kInf, min_upper = kInf, min_ece_slack = kInf;
    for (Eigen::Index h = 0; h < a.num_hypotheses(); ++h) {
      const SoftClassifier& cls = a.hypotheses()[h];
      const double risk = soft_risk(a.world(), cls);
      const RiskSandwich sandwich = hard_soft_bounds(a.world(), cls);
      const double conf = confidence(a.world(), cls);
      const double hard = hard_risk(a.world(), hard_decision(cls));
      const double ece = expected_calibration_error(a.world(), cls);
      min_lower = std::min(min_lower, risk - sandwich.lower);
      min_upper = std::min(min_upper, sandwich.upper - risk);
      min_ece_slack = std::min(min_ece_slack, ece - std::abs(1.0 - hard - conf));
    }
    json hs;
    hs["min_lower_margin"] = min_lower;
    hs["min_upper_margin"] = min_upper;
    hs["min_ece_slack"] = min_ece_slack;
    summary["hard_soft"] = hs;
  }
  {
    std::set<double> deltas;
    for (const BoundSpec& spec : scenario.bounds) deltas.insert(spec.params.delta);
    json np = json::array();
    for (const double delta : deltas) {
      const NpTestResult res = np_test(a, delta);
      json entry;
      entry["delta"] = delta;
      entry["type1"] = res.type1;
      entry["power"] = res.power;
      np.push_back(entry);
    }
    summary["np_test"] = np;
  }
  {
    json bounds = json::array();
    for (std::size_t i = 0; i < scenario.bounds.size(); ++i) {
      const BoundSpec& spec = scenario.bounds[i];
      const PreparedBound& b = prepared[i];
      json entry;
      entry["name"] = spec.name;
      entry["column"] = bound_column_name(i, spec);
      entry["params"] = params_to_json(spec);
      entry["scope"] = to_string(b.scope);
      entry["comparison_only"] = b.comparison_only;
      entry["epsilon_mean"] = b.mass_weighted_mean(a);
      entry["epsilon_max"] = b.max_over_support(a);
      if (spec.name == "chernoff") {
        entry["minimizing_t"] = b.minimizing_t;
        entry["not_attained"] = b.not_attained;
      }
      if (spec.name == "subgaussian") {
        entry["sigma"] = b.sigma;
        entry["certificate_ok"] = b.certificate_ok;
      }
      if (!b.comparison_only) {
        if (scenario.mode == VerifyMode::exact || scenario.mode == VerifyMode::both) {
          const ViolationResult res = exact_violation(a, b);
          entry["exact_violation"] = res.probability;
          entry["worst_margin"] = res.worst_margin;
          entry["pass"] = res.probability <= spec.params.delta;
        }
        if (scenario.mode == VerifyMode::mc || scenario.mode == VerifyMode::both) {
          const McResult mc = mc_violation(a, b, scenario.trials, scenario.seed + i);
          entry["mc"] = mc_to_json(mc);
          if (!entry.contains("pass")) entry["pass"] = mc.ci_hi <= spec.params.delta;
        }
      }
      bounds.push_back(entry);
    }
    summary["bounds"] = bounds;
  }

  std::ofstream out(artifacts.summary_json, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + artifacts.summary_json.string());
  out << summary.dump(2) << '\n';
  return artifacts;
}

Scenario scenario_with_parameter(const Scenario& scenario, const std::string& parameter,
                                 double value) {
  Scenario out = scenario;
  if (parameter == "gamma") {
    if (value < 0.0) throw ConfigParse("sweep gamma: must be >= 0");
    out.learner = Learner(out.learner.kind, value, out.learner.prior);
  } else if (parameter == "n") {
    const auto n = static_cast<int>(value);
    if (n < 1 || static_cast<double>(n) != value)
      throw ConfigParse("sweep n: must be a positive integer");
    out.world = World(out.world.joint, n);
  } else if (parameter == "delta") {
    if (!(value > 0.0) || value > 1.0) throw ConfigParse("sweep delta: must be in (0, 1]");
    for (auto& spec : out.bounds) spec.params.delta = value;
  } else if (parameter == "alpha") {
    for (auto& spec : out.bounds)
      if (spec.name == "bayes" || spec.name == "esposito") spec.params.alpha = value;
  } else if (parameter == "beta") {
    for (auto& spec : out.bounds)
      if (spec.name == "bayes" || spec.name == "viallard") spec.params.beta = value;
  } else if (parameter == "h_count") {
    const auto count = static_cast<Eigen::Index>(value);
    if (count < 1 || static_cast<double>(count) != value)
      throw ConfigParse("sweep h_count: must be a positive integer");
    if (!scenario.random_hypotheses.has_value())
      throw ConfigParse("sweep h_count: requires learner.random_hypotheses in the config");
    if (scenario.explicit_prior)
      throw ConfigParse("sweep h_count: incompatible with an explicit learner.prior");
    out.hypotheses = HypothesisSet::random(count, out.world.x_size(), out.world.y_size(),
                                           scenario.random_hypotheses->seed);
    out.random_hypotheses->count = count;
    out.learner = Learner(out.learner.kind, out.learner.gamma, Distribution::uniform(count));
  } else {
    throw ConfigParse("sweep parameter must be one of gamma, n, delta, alpha, beta, h_count");
  }
  return out;
}

std::filesystem::path sweep_scenario(const Scenario& scenario, const std::string& parameter,
                                     const std::vector<double>& values,
                                     const std::filesystem::path& out_dir,
                                     std::int64_t enum_cap) {
  if (values.empty()) throw ConfigParse("sweep: need at least one value");
  ensure_directory(out_dir);
  const std::filesystem::path path = out_dir / "sweep.csv";
  CsvWriter csv(path);
  csv.row({"param", "value", "bound", "eps_mean", "eps_max", "exact_violation",
           "expected_gap", "mi_over_n"});
  for (const double value : values) {
    const Scenario variant = scenario_with_parameter(scenario, parameter, value);
    const LearnerAnalysis a = LearnerAnalysis::analyze(variant.world, variant.hypotheses,
                                                       variant.learner, enum_cap);
    for (const BoundSpec& spec : variant.bounds) {
      const PreparedBound b = prepare_bound(a, spec);
      std::vector<std::string> cells(8);
      cells[0] = parameter;
      cells[1] = format_double(value);
      cells[2] = spec.name;
      cells[3] = format_double(b.mass_weighted_mean(a));
      cells[4] = format_double(b.max_over_support(a));
      cells[5] = b.comparison_only
                     ? ""
                     : format_double(exact_violation(a, b).probability);
      cells[6] = format_double(a.expected_gap());
      cells[7] = format_double(a.mutual_information() / a.n());
      csv.row(cells);
    }
  }
  return path;
}

int verify_scenario(const Scenario& scenario, const std::vector<BoundSpec>& bounds,
                    const std::filesystem::path& out_dir, std::int64_t enum_cap) {
  const LearnerAnalysis a = LearnerAnalysis::analyze(scenario.world, scenario.hypotheses,
                                                     scenario.learner, enum_cap);
  std::optional<CsvWriter> csv;
  if (!out_dir.empty()) {
    ensure_directory(out_dir);
    csv.emplace(out_dir / "verify.csv");
    csv->row({"bound", "delta", "exact_violation", "mc_rate", "mc_trials", "mc_seed",
              "mc_ci_lo", "mc_ci_hi", "pass", "worst_margin"});
  }
  int failures = 0;
  std::uint64_t stream = 0;
  for (const BoundSpec& spec : bounds) {
    const VerificationReport rep =
        verify_bound(a, spec, scenario.mode, scenario.trials, scenario.seed + stream++);
    std::vector<std::string> cells(10);
    cells[0] = rep.bound;
    cells[1] = format_double(rep.delta);
    cells[2] = rep.exact_violation ? format_double(*rep.exact_violation) : "";
    if (rep.mc) {
      cells[3] = format_double(rep.mc->rate);
      cells[4] = std::to_string(rep.mc->trials);
      cells[5] = std::to_string(rep.mc->seed);
      cells[6] = format_double(rep.mc->ci_lo);
      cells[7] = format_double(rep.mc->ci_hi);
    }
    cells[8] = rep.pass.has_value() ? (*rep.pass ? "true" : "false") : "na";
    cells[9] = format_double(rep.worst_margin);
    if (csv) csv->row(cells);

    char delta_buf[32];
    std::snprintf(delta_buf, sizeof(delta_buf), "%g", rep.delta);
    std::string line = "bound " + rep.bound + " (delta=" + delta_buf + "): ";
    if (rep.comparison_only) {
      line += "comparison only";
    } else if (rep.exact_violation) {
      line += "exact_violation=" + format_double(*rep.exact_violation);
    } else if (rep.mc) {
      line += "mc_rate=" + format_double(rep.mc->rate);
    }
    if (rep.pass.has_value()) {
      line += *rep.pass ? " PASS" : " FAIL";
      if (!*rep.pass) ++failures;
    }
    std::cout << line << '\n';
  }
  return failures;
}

}  // namespace pacman
