// Turns each bound into a falsifiable experiment: exact violation
// probabilities by enumeration, seeded Monte Carlo with Clopper-Pearson
// intervals, and the likelihood-ratio (Neyman-Pearson) test.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pacman/bounds.hpp"
#include "pacman/learner.hpp"

namespace pacman {

// P_{S,h}(gap > eps(S,h)) over the exact joint p(S) p(h|S), plus the worst
// margin max(gap - eps) over positive-mass pairs.
struct ViolationResult {
  double probability = 0.0;
  double worst_margin = kNegInf;
};

ViolationResult exact_violation(const LearnerAnalysis& a, const PreparedBound& bound);
ViolationResult exact_violation(
    const LearnerAnalysis& a,
    const std::function<double(std::int64_t, Eigen::Index)>& epsilon);

struct McResult {
  double rate = 0.0;
  std::int64_t violations = 0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double ci_lo = 0.0;  // 99% Clopper-Pearson
  double ci_hi = 1.0;
};

// i.i.d. (S, h) draws from p(S) p(h|S); bound values reuse the exact
// analysis quantities computed once.
McResult mc_violation(const LearnerAnalysis& a, const PreparedBound& bound,
                      std::int64_t trials, std::uint64_t seed);

// Two-sided Clopper-Pearson interval for k successes in n trials.
std::pair<double, double> clopper_pearson(std::int64_t k, std::int64_t n,
                                          double confidence = 0.99);

// Likelihood-ratio test between H0 = p(S) p(h|S) and H1 = q~(S,h) with
// statistic gap - (1/n) log C_n(n) and threshold eps_alpha = -(1/n) log delta.
struct NpTestResult {
  double type1 = 0.0;       // exact P_{H0}(reject)
  double power = 0.0;       // exact P_{H1}(reject)
  double log_cn_n = 0.0;
  double eps_alpha = 0.0;
  double threshold = 0.0;   // (1/n) log C_n(n) + eps_alpha, on the gap scale
};
NpTestResult np_test(const LearnerAnalysis& a, double delta);

// P_p(E) <= (KL(p||q) + 1) / (-log P_q(E)) for an event mask.
struct EventBoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};
EventBoundCheck kl_event_bound_check(const Distribution& p, const Distribution& q,
                          const std::vector<bool>& event);

// Monte Carlo estimate of E[exp(s X)] for X ~ chi-square(dof), s < 1/2.
// The plain sample mean has infinite variance for s >= 1/4, so the estimate
// importance-samples from an exponentially tilted Gamma(dof/2, theta)
// proposal (theta = 1/(1/2 - s) + 1) driven by the same seeded chi-square
// draw stream; weights are bounded, giving ~0.1% error at 1e6 draws.
double chi_square_mgf_mc(int dof, double s, std::int64_t draws, std::uint64_t seed);

enum class VerifyMode { exact, mc, both };

struct VerificationReport {
  std::string bound;
  double delta = 0.0;
  std::optional<double> exact_violation;  // absent if enumeration infeasible
  double worst_margin = kNegInf;
  std::optional<McResult> mc;
  bool comparison_only = false;
  // Pass verdict: exact <= delta when enumeration succeeded, else the MC 99%
  // upper bound <= delta. Empty for comparison-only bounds.
  std::optional<bool> pass;
};

VerificationReport verify_bound(const LearnerAnalysis& a, const BoundSpec& spec,
                                VerifyMode mode, std::int64_t trials, std::uint64_t seed);

}  // namespace pacman
