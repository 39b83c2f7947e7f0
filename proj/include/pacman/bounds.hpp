// Bound evaluators: the Renyi-divergence family, the mutual-information
// bound, the Chernoff/MGF bound and its three closed-form relaxations, the
// risk conversion, the absolute-gap bound, and two literature comparison
// bounds computed on the same analysis object.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>

#include "pacman/learner.hpp"

namespace pacman {

struct BoundParams {
  double delta = 0.1;   // confidence level, in (0, 1]
  double alpha = 2.0;   // Renyi order for the dataset-law term / Sibson MI
  double beta = 2.0;    // Renyi order (> 1) for the posterior-to-prior term
  double sigma = -1.0;  // subgaussian proxy; < 0 means fit it from the MGF grid
  double nu = 1.0;      // parameter count for the regular-model bound
  double t_max = 0.0;   // Chernoff search ceiling; 0 means 64 * n
  // hellchi variant: replace log(1 + CS(S)) with E_S[log(1 + CS(S))]. The
  // constant is carried over unchanged from the per-S form.
  bool expected_cs = false;
};

enum class BoundScope { per_s_h, per_s, global, in_expectation };

const char* to_string(BoundScope scope);

struct BoundValue {
  double epsilon = 0.0;
  BoundScope scope = BoundScope::global;
  std::map<std::string, double> components;
};

// Two-sided Renyi decomposition bound on the gap at confidence delta:
//   ((alpha-1)/(alpha n)) D_alpha(q(S|h)||p(S|h)) + D_beta(p(h|S)||p(h))/n
//   + (1/(alpha n) + 1/((beta-1) n)) log(2/delta).
BoundValue bound_bayes(const LearnerAnalysis& a, std::int64_t s, Eigen::Index h,
                       const BoundParams& params);

// alpha = 1/2, beta = 2 specialization written with Hellinger / chi-square:
//   (2/n) log(1 - H(h)/2) + (1/n) log(1 + CS(S)) + (3/n) log(2/delta).
BoundValue bound_hellchi(const LearnerAnalysis& a, std::int64_t s, Eigen::Index h,
                         double delta);

// Posterior-to-prior bound, prior fixed to the induced p(h):
//   (1/n) [ D_beta(p(h|S)||p(h)) + (1 + beta/(beta-1)) log(2/delta) ].
BoundValue bound_viallard(const LearnerAnalysis& a, std::int64_t s, const BoundParams& params);

// (I(S;h) + 1) / (n delta).
BoundValue bound_little(const LearnerAnalysis& a, double delta);

// In-expectation bound E[gap] <= I(S;h)/n.
BoundValue expected_gap_bound(const LearnerAnalysis& a);

struct ChernoffResult {
  BoundValue value;
  double t = 0.0;
  bool not_attained = false;  // minimum sat on the t_max boundary
};
// inf_{t > 0} (1/t) log(C_n(t)/delta), golden-section seeded from a
// 64-point log grid on (1e-6, t_max].
ChernoffResult bound_chernoff(const LearnerAnalysis& a, const BoundParams& params);

// (1/n) log(|H|/delta); uses C_n(n) <= |H|.
BoundValue bound_finite_h(Eigen::Index h_count, int n, double delta);

// I(S;h)/n + (1/n) sqrt(2 sigma^2 log(1/delta)).
BoundValue bound_subgaussian(const LearnerAnalysis& a, const BoundParams& params);

struct SubgaussianCertificate {
  bool holds = true;
  double worst_violation = 0.0;  // max over the lambda grid of lhs - rhs
  double sigma = 0.0;
};
// Checks log C_n(lambda n) <= lambda n E[gap] + lambda^2 sigma^2 / 2 on the
// lambda grid {0.1, 0.2, ..., 4.0}.
SubgaussianCertificate subgaussian_certificate(const LearnerAnalysis& a, double sigma);
// Smallest sigma that satisfies the certificate on the grid.
double fit_sigma(const LearnerAnalysis& a);

// g(delta, nu) = inf_{0 < lambda < 1} (1/lambda)[-(nu/2) log(1-lambda) + log(1/delta)];
// delta = 1 degenerates to the lambda -> 0 limit nu/2.
double regular_g(double delta, double nu);
// g(delta, nu) / n.
BoundValue bound_regular(const BoundParams& params, int n);

// Converts a gap bound into a soft-risk bound: (1-e^-ce) + e^-ce * epsilon.
double risk_bound_convert(double ce_s, double epsilon);

// delta + P_{S,h}(CE_S(h) > epsilon), exact; upper-bounds P(|gap| > epsilon)
// given a valid one-sided bound at level delta.
double abs_gap_bound(const LearnerAnalysis& a, double epsilon, double delta);

// Comparison values for the 0-1 risk gap (not verified as PACMAN bounds):
// sqrt((I(S;h)+1+delta)/(2 n delta)) and
// sqrt((1/2n)(I_alpha(S;h) + log 2 - (alpha/(alpha-1)) log delta)).
double literature_bassily(const LearnerAnalysis& a, double delta);
double literature_esposito(const LearnerAnalysis& a, double alpha, double delta);

// ---------------------------------------------------------------------------
// Bulk evaluation: a bound prepared once per analysis, with O(1) epsilon
// lookups decomposed as const + s_term[s] + h_term[h].
struct BoundSpec {
  std::string name;  // bayes|hellchi|viallard|little|chernoff|finite_h|
                     // subgaussian|regular|bassily|esposito
  BoundParams params;
};

struct PreparedBound {
  std::string name;
  BoundParams params;
  BoundScope scope = BoundScope::global;
  double const_term = 0.0;
  Eigen::VectorXd s_term;  // empty when unused
  Eigen::VectorXd h_term;  // empty when unused; +inf marks dead hypotheses
  bool comparison_only = false;  // bassily / esposito
  // Chernoff / subgaussian extras.
  double minimizing_t = std::numeric_limits<double>::quiet_NaN();
  bool not_attained = false;
  double sigma = std::numeric_limits<double>::quiet_NaN();
  bool certificate_ok = true;

  double eps(std::int64_t s, Eigen::Index h) const {
    double e = const_term;
    if (s_term.size() > 0) e += s_term[s];
    if (h_term.size() > 0) e += h_term[h];
    return e;
  }
  // Mass-weighted mean and max of epsilon over positive-mass (S,h) pairs.
  double mass_weighted_mean(const LearnerAnalysis& a) const;
  double max_over_support(const LearnerAnalysis& a) const;
};

PreparedBound prepare_bound(const LearnerAnalysis& a, const BoundSpec& spec);

}  // namespace pacman
