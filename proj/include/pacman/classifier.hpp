// Soft classifiers and the per-hypothesis quantities built on them: risks,
// cross-entropies, the tilted example law, the two-route generalization gap,
// confidence, calibration error, and the hard/soft risk sandwich.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pacman/prob.hpp"
#include "pacman/rng.hpp"

namespace pacman {

// Row-stochastic map x -> probability vector over labels, entries strictly
// inside (0,1). Rows are normalized and clamped at construction so logs are
// always finite.
class SoftClassifier {
 public:
  static constexpr double kClampEps = 1e-12;

  static SoftClassifier from_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows);
  static SoftClassifier uniform(Eigen::Index x_size, Eigen::Index y_size);
  static SoftClassifier random(Eigen::Index x_size, Eigen::Index y_size, Rng& rng);

  Eigen::Index x_size() const { return rows_.rows(); }
  Eigen::Index y_size() const { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const { return rows_; }
  const Eigen::MatrixXd& log_rows() const { return log_rows_; }
  double prob(Eigen::Index x, Eigen::Index y) const { return rows_(x, y); }
  double log_prob(Eigen::Index x, Eigen::Index y) const { return log_rows_(x, y); }

 private:
  SoftClassifier(Eigen::MatrixXd rows, Eigen::MatrixXd log_rows)
      : rows_(std::move(rows)), log_rows_(std::move(log_rows)) {}
  Eigen::MatrixXd rows_;
  Eigen::MatrixXd log_rows_;
};

struct HardClassifier {
  std::vector<Eigen::Index> decisions;  // label per x
};

// Misclassification probability of the label sampled from h(x).
double soft_risk(const World& world, const SoftClassifier& h);
// log(1 - soft_risk), i.e. the log-mass of correct soft decisions.
double log_correct_mass(const World& world, const SoftClassifier& h);

// Argmax decision rule with lowest-index tie-break.
HardClassifier hard_decision(const SoftClassifier& h);
double hard_risk(const World& world, const HardClassifier& hc);
double empirical_hard_risk(const Dataset& s, const HardClassifier& hc);

double empirical_ce(const Dataset& s, const SoftClassifier& h);
double true_ce(const World& world, const SoftClassifier& h);
// -log(1 - soft_risk); throws DegenerateRisk below the 1e-300 mass floor.
double tilde_ce(const World& world, const SoftClassifier& h);

// Example law conditioned on the soft decision being correct:
// q(x,y|h) = h(x)_y p(x,y) / (1 - soft_risk).
JointDistribution tilted_distribution(const World& world, const SoftClassifier& h);

// Generalization gap record. `gap` is tilde_ce - empirical_ce computed from
// linear-domain risk; `log_ratio` is the same quantity via the per-pair
// likelihood ratio (1/n) sum log(h(x)_y / (1 - risk)). The two routes must
// agree within 1e-10.
struct GapRecord {
  Dataset dataset;
  std::int64_t dataset_index = -1;
  Eigen::Index hypothesis_id = -1;
  double ce_s = 0.0;
  double tilde_ce = 0.0;
  double gap = 0.0;
  double log_ratio = 0.0;
};

GapRecord pacman_gap(const World& world, const Dataset& s, const SoftClassifier& h,
                     std::int64_t dataset_index = -1, Eigen::Index hypothesis_id = -1);

// Expected confidence of the argmax decision, in (0, 1].
double confidence(const World& world, const SoftClassifier& h);
// Exact calibration error: x grouped by identical confidence value (finite X,
// no binning), sum over groups of P(group) |P(correct|group) - confidence|.
double expected_calibration_error(const World& world, const SoftClassifier& h);

struct RiskSandwich {
  double lower;  // 0.5 * hard_risk
  double upper;  // 1 - confidence + hard_risk
};
RiskSandwich hard_soft_bounds(const World& world, const SoftClassifier& h);

namespace detail {
// tilde-CE from the log correct mass; the DegenerateRisk threshold lives here.
double tilde_ce_from_log_mass(double log_mass);
}  // namespace detail

}  // namespace pacman
