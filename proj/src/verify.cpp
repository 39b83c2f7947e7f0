#include "pacman/verify.hpp"

#include <cmath>

#include "pacman/errors.hpp"
#include "pacman/info.hpp"
#include "pacman/logsum.hpp"

namespace pacman {

ViolationResult exact_violation(
    const LearnerAnalysis& a,
    const std::function<double(std::int64_t, Eigen::Index)>& epsilon) {
  Eigen::VectorXd terms(a.flat_log_weight().size());
  Eigen::Index count = 0;
  ViolationResult res;
  const auto& idx = a.flat_index();
  for (Eigen::Index i = 0; i < a.flat_log_weight().size(); ++i) {
    const auto& [s, h] = idx[static_cast<std::size_t>(i)];
    const double margin = a.gap()(s, h) - epsilon(s, h);
    if (margin > res.worst_margin) res.worst_margin = margin;
    if (margin > 0.0) terms[count++] = a.flat_log_weight()[i];
  }
  res.probability = count == 0 ? 0.0 : std::exp(log_sum_exp(terms.head(count)));
  return res;
}

ViolationResult exact_violation(const LearnerAnalysis& a, const PreparedBound& bound) {
  return exact_violation(
      a, [&bound](std::int64_t s, Eigen::Index h) { return bound.eps(s, h); });
}

McResult mc_violation(const LearnerAnalysis& a, const PreparedBound& bound,
                      std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw Error("trial count must be >= 1");
  McResult res;
  res.trials = trials;
  res.seed = seed;
  Rng rng(seed);
  const World& world = a.world();
  Eigen::VectorXd pair_probs(world.x_size() * world.y_size());
  {
    Eigen::Index k = 0;
    for (Eigen::Index x = 0; x < world.x_size(); ++x)
      for (Eigen::Index y = 0; y < world.y_size(); ++y)
        pair_probs[k++] = world.joint.prob(x, y);
  }
  const std::int64_t k_count = pair_probs.size();
  Eigen::VectorXd post(a.num_hypotheses());
  for (std::int64_t t = 0; t < trials; ++t) {
    std::int64_t s = 0;
    for (int i = 0; i < a.n(); ++i) s = s * k_count + rng.categorical(pair_probs);
    post = a.log_posterior().row(s).transpose().array().exp();
    const Eigen::Index h = rng.categorical(post);
    if (a.gap()(s, h) > bound.eps(s, h)) ++res.violations;
  }
  res.rate = static_cast<double>(res.violations) / static_cast<double>(trials);
  std::tie(res.ci_lo, res.ci_hi) = clopper_pearson(res.violations, trials);
  return res;
}

namespace {

// log P(Bin(n, p) <= k), stable for large n.
double log_binom_cdf(std::int64_t k, std::int64_t n, double p) {
  if (k < 0) return kNegInf;
  if (k >= n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return kNegInf;
  const double lp = std::log(p), lq = std::log1p(-p);
  // Walk i = k down to 0; terms fall off geometrically below the mode.
  double max_term = kNegInf;
  std::vector<double> terms;
  terms.reserve(64);
  for (std::int64_t i = k; i >= 0; --i) {
    const double lt = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                      i * lp + (n - i) * lq;
    terms.push_back(lt);
    max_term = std::max(max_term, lt);
    if (lt < max_term - 45.0) break;  // remainder below double precision
  }
  KahanSum sum;
  for (double lt : terms) sum.add(std::exp(lt - max_term));
  return max_term + std::log(sum.value());
}

}  // namespace

std::pair<double, double> clopper_pearson(std::int64_t k, std::int64_t n, double confidence) {
  if (n < 1 || k < 0 || k > n) throw Error("invalid Clopper-Pearson arguments");
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error("confidence must be in (0,1)");
  const double tail = (1.0 - confidence) / 2.0;
  const double log_tail = std::log(tail);
  double lo = 0.0, hi = 1.0;
  if (k > 0) {
    // Largest p with P(Bin(n,p) >= k) <= tail, via bisection on the CDF.
    double a = 0.0, b = static_cast<double>(k) / n;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      // P(X >= k) = 1 - P(X <= k-1)
      const double log_upper = std::log1p(-std::exp(log_binom_cdf(k - 1, n, mid)));
      if (log_upper > log_tail)
        b = mid;
      else
        a = mid;
    }
    lo = a;
  }
  if (k < n) {
    // Smallest p with P(Bin(n,p) <= k) <= tail.
    double a = static_cast<double>(k) / n, b = 1.0;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      if (log_binom_cdf(k, n, mid) > log_tail)
        a = mid;
      else
        b = mid;
    }
    hi = b;
  }
  return {lo, hi};
}

NpTestResult np_test(const LearnerAnalysis& a, double delta) {
  if (!(delta > 0.0) || delta > 1.0) throw Error("delta must be in (0, 1]");
  NpTestResult res;
  const double n = a.n();
  res.log_cn_n = a.log_mgf(n);
  if (!std::isfinite(res.log_cn_n)) throw InfiniteMGF("C_n(n) is not finite");
  res.eps_alpha = -std::log(delta) / n;
  res.threshold = res.log_cn_n / n + res.eps_alpha;

  // Type I error under H0 = p(S) p(h|S).
  Eigen::VectorXd terms(a.flat_log_weight().size());
  Eigen::Index count = 0;
  const auto& idx = a.flat_index();
  for (Eigen::Index i = 0; i < a.flat_log_weight().size(); ++i) {
    const auto& [s, h] = idx[static_cast<std::size_t>(i)];
    if (a.gap()(s, h) > res.threshold) terms[count++] = a.flat_log_weight()[i];
  }
  res.type1 = count == 0 ? 0.0 : std::exp(log_sum_exp(terms.head(count)));

  // Power under H1 = q~(S, h).
  const Eigen::MatrixXd lq = a.tilde_q_joint();
  count = 0;
  Eigen::VectorXd q_terms(lq.size());
  for (std::int64_t s = 0; s < a.num_datasets(); ++s)
    for (Eigen::Index h = 0; h < a.num_hypotheses(); ++h)
      if (lq(s, h) != kNegInf && a.gap()(s, h) > res.threshold) q_terms[count++] = lq(s, h);
  res.power = count == 0 ? 0.0 : std::exp(log_sum_exp(q_terms.head(count)));
  return res;
}

EventBoundCheck kl_event_bound_check(const Distribution& p, const Distribution& q,
                          const std::vector<bool>& event) {
  if (static_cast<Eigen::Index>(event.size()) != p.size() || p.size() != q.size())
    throw SupportMismatch("event mask size does not match distributions");
  KahanSum p_mass, q_mass;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!event[static_cast<std::size_t>(i)]) continue;
    p_mass.add(p.prob(i));
    q_mass.add(q.prob(i));
  }
  const double pq = q_mass.value();
  if (!(pq > 0.0) || !(pq < 1.0)) throw Error("event must have q-probability in (0, 1)");
  EventBoundCheck res;
  res.lhs = p_mass.value();
  res.rhs = (kl_divergence(p, q) + 1.0) / (-std::log(pq));
  res.holds = res.lhs <= res.rhs + 1e-12;
  return res;
}

double chi_square_mgf_mc(int dof, double s, std::int64_t draws, std::uint64_t seed) {
  if (dof < 1) throw Error("chi-square degrees of freedom must be >= 1");
  if (!(s < 0.5)) throw Error("chi-square MGF requires s < 1/2");
  if (draws < 1) throw Error("draw count must be >= 1");
  const double theta = 1.0 / (0.5 - s) + 1.0;
  const double half_theta = theta / 2.0;
  const double decay = 0.5 - 1.0 / theta - s;  // > 0 by the choice of theta
  const double log_scale = dof / 2.0 * std::log(half_theta);
  Rng rng(seed);
  KahanSum sum;
  for (std::int64_t i = 0; i < draws; ++i) {
    const double x = half_theta * rng.chi_square(dof);  // Gamma(dof/2, theta)
    sum.add(std::exp(log_scale - decay * x));
  }
  return sum.value() / static_cast<double>(draws);
}

VerificationReport verify_bound(const LearnerAnalysis& a, const BoundSpec& spec,
                                VerifyMode mode, std::int64_t trials, std::uint64_t seed) {
  const PreparedBound bound = prepare_bound(a, spec);
  VerificationReport rep;
  rep.bound = spec.name;
  rep.delta = spec.params.delta;
  rep.comparison_only = bound.comparison_only;
  if (mode == VerifyMode::exact || mode == VerifyMode::both) {
    const ViolationResult res = exact_violation(a, bound);
    rep.exact_violation = res.probability;
    rep.worst_margin = res.worst_margin;
  }
  if (mode == VerifyMode::mc || mode == VerifyMode::both)
    rep.mc = mc_violation(a, bound, trials, seed);
  if (!bound.comparison_only) {
    if (rep.exact_violation.has_value())
      rep.pass = *rep.exact_violation <= rep.delta;
    else if (rep.mc.has_value())
      rep.pass = rep.mc->ci_hi <= rep.delta;
  }
  return rep;
}

}  // namespace pacman
