#include "pacman/bounds.hpp"

#include <cmath>

#include "pacman/errors.hpp"
#include "pacman/golden.hpp"
#include "pacman/info.hpp"
#include "pacman/logsum.hpp"

namespace pacman {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0) || delta > 1.0) throw Error("delta must be in (0, 1]");
}

void check_orders(double alpha, double beta) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw InvalidOrder("alpha must be in (0,1) or (1,inf)");
  if (!(beta > 1.0)) throw InvalidOrder("beta must be > 1");
}

double chernoff_t_max(const LearnerAnalysis& a, const BoundParams& params) {
  const double t_max = params.t_max > 0.0 ? params.t_max : 64.0 * a.n();
  if (!(t_max > 0.0)) throw Error("t_max must be positive");
  return t_max;
}

}  // namespace

const char* to_string(BoundScope scope) {
  switch (scope) {
    case BoundScope::per_s_h: return "per_s_h";
    case BoundScope::per_s: return "per_s";
    case BoundScope::global: return "global";
    case BoundScope::in_expectation: return "in_expectation";
  }
  return "?";
}

BoundValue bound_bayes(const LearnerAnalysis& a, std::int64_t s, Eigen::Index h,
                       const BoundParams& params) {
  check_delta(params.delta);
  check_orders(params.alpha, params.beta);
  const double n = a.n();
  const double d_alpha = a.renyi_q_vs_p_given_h(h, params.alpha);
  const double d_beta = a.renyi_posterior_vs_prior(s, params.beta);
  const double renyi_q = (params.alpha - 1.0) / (params.alpha * n) * d_alpha;
  const double renyi_post = d_beta / n;
  const double conf =
      (1.0 / (params.alpha * n) + 1.0 / ((params.beta - 1.0) * n)) * std::log(2.0 / params.delta);
  BoundValue v;
  v.scope = BoundScope::per_s_h;
  v.epsilon = renyi_q + renyi_post + conf;
  v.components = {{"renyi_q_term", renyi_q}, {"renyi_posterior_term", renyi_post},
                  {"confidence_term", conf}};
  return v;
}

BoundValue bound_hellchi(const LearnerAnalysis& a, std::int64_t s, Eigen::Index h,
                         double delta) {
  check_delta(delta);
  const double n = a.n();
  const double hel = a.hellinger_per_h()[h];
  if (!(hel < 2.0)) throw DegenerateHellinger();
  const double hel_term = 2.0 / n * std::log1p(-hel / 2.0);
  const double cs_term = std::log1p(a.cs_per_s()[s]) / n;
  const double conf = 3.0 / n * std::log(2.0 / delta);
  BoundValue v;
  v.scope = BoundScope::per_s_h;
  v.epsilon = hel_term + cs_term + conf;
  v.components = {{"hellinger_term", hel_term}, {"chi_square_term", cs_term},
                  {"confidence_term", conf}};
  return v;
}

BoundValue bound_viallard(const LearnerAnalysis& a, std::int64_t s, const BoundParams& params) {
  check_delta(params.delta);
  if (!(params.beta > 1.0)) throw InvalidOrder("beta must be > 1");
  const double n = a.n();
  const double d_beta = a.renyi_posterior_vs_prior(s, params.beta);
  const double conf =
      (1.0 + params.beta / (params.beta - 1.0)) * std::log(2.0 / params.delta) / n;
  BoundValue v;
  v.scope = BoundScope::per_s;
  v.epsilon = d_beta / n + conf;
  v.components = {{"renyi_posterior_term", d_beta / n}, {"confidence_term", conf}};
  return v;
}

BoundValue bound_little(const LearnerAnalysis& a, double delta) {
  check_delta(delta);
  BoundValue v;
  v.scope = BoundScope::global;
  v.epsilon = (a.mutual_information() + 1.0) / (a.n() * delta);
  v.components = {{"mutual_information", a.mutual_information()}};
  return v;
}

BoundValue expected_gap_bound(const LearnerAnalysis& a) {
  BoundValue v;
  v.scope = BoundScope::in_expectation;
  v.epsilon = a.mutual_information() / a.n();
  v.components = {{"mutual_information", a.mutual_information()}};
  return v;
}

ChernoffResult bound_chernoff(const LearnerAnalysis& a, const BoundParams& params) {
  check_delta(params.delta);
  const double t_max = chernoff_t_max(a, params);
  const double log_inv_delta = std::log(1.0 / params.delta);
  const auto objective = [&](double t) { return (a.log_mgf(t) + log_inv_delta) / t; };
  const MinimizeResult res = minimize_log_grid(objective, 1e-6, t_max, 64, 1e-10);
  if (!std::isfinite(res.value) && res.value > 0)
    throw InfiniteMGFEverywhere("MGF not finite on the whole search grid");
  ChernoffResult out;
  out.value.scope = BoundScope::global;
  out.value.epsilon = res.value;
  out.value.components = {{"minimizing_t", res.x}};
  out.t = res.x;
  out.not_attained = res.at_upper_boundary;
  return out;
}

BoundValue bound_finite_h(Eigen::Index h_count, int n, double delta) {
  check_delta(delta);
  if (h_count < 1) throw Error("hypothesis count must be >= 1");
  if (n < 1) throw Error("sample size must be >= 1");
  BoundValue v;
  v.scope = BoundScope::global;
  v.epsilon = std::log(static_cast<double>(h_count) / delta) / n;
  return v;
}

SubgaussianCertificate subgaussian_certificate(const LearnerAnalysis& a, double sigma) {
  if (!(sigma >= 0.0)) throw Error("sigma must be >= 0");
  SubgaussianCertificate cert;
  cert.sigma = sigma;
  const double n = a.n();
  const double e_gap = a.expected_gap();
  for (int i = 1; i <= 40; ++i) {
    const double lambda = 0.1 * i;
    const double lhs = a.log_mgf(lambda * n);
    const double rhs = lambda * n * e_gap + 0.5 * lambda * lambda * sigma * sigma;
    cert.worst_violation = std::max(cert.worst_violation, lhs - rhs);
  }
  cert.holds = cert.worst_violation <= 1e-12;
  return cert;
}

double fit_sigma(const LearnerAnalysis& a) {
  const double n = a.n();
  const double e_gap = a.expected_gap();
  double sigma_sq = 0.0;
  for (int i = 1; i <= 40; ++i) {
    const double lambda = 0.1 * i;
    const double excess = a.log_mgf(lambda * n) - lambda * n * e_gap;
    sigma_sq = std::max(sigma_sq, 2.0 * excess / (lambda * lambda));
  }
  return std::sqrt(sigma_sq);
}

BoundValue bound_subgaussian(const LearnerAnalysis& a, const BoundParams& params) {
  check_delta(params.delta);
  const double sigma = params.sigma >= 0.0 ? params.sigma : fit_sigma(a);
  const double n = a.n();
  const double mi_term = a.mutual_information() / n;
  const double dev_term = std::sqrt(2.0 * sigma * sigma * std::log(1.0 / params.delta)) / n;
  BoundValue v;
  v.scope = BoundScope::global;
  v.epsilon = mi_term + dev_term;
  v.components = {{"mutual_information_term", mi_term}, {"deviation_term", dev_term},
                  {"sigma", sigma}};
  return v;
}

double regular_g(double delta, double nu) {
  if (!(nu >= 1.0)) throw Error("nu must be >= 1");
  if (!(delta > 0.0) || delta > 1.0) throw Error("delta must be in (0, 1]");
  if (delta == 1.0) return nu / 2.0;  // infimum approached as lambda -> 0
  const double log_inv_delta = std::log(1.0 / delta);
  const auto objective = [&](double lambda) {
    return (-(nu / 2.0) * std::log1p(-lambda) + log_inv_delta) / lambda;
  };
  return golden_section_min(objective, 1e-6, 1.0 - 1e-6, 1e-12).value;
}

BoundValue bound_regular(const BoundParams& params, int n) {
  if (n < 1) throw Error("sample size must be >= 1");
  BoundValue v;
  v.scope = BoundScope::global;
  const double g = regular_g(params.delta, params.nu);
  v.epsilon = g / n;
  v.components = {{"g", g}};
  return v;
}

double risk_bound_convert(double ce_s, double epsilon) {
  const double w = std::exp(-ce_s);
  return (1.0 - w) + w * epsilon;
}

double abs_gap_bound(const LearnerAnalysis& a, double epsilon, double delta) {
  check_delta(delta);
  Eigen::VectorXd terms(a.flat_log_weight().size());
  Eigen::Index count = 0;
  const auto& idx = a.flat_index();
  for (Eigen::Index i = 0; i < a.flat_log_weight().size(); ++i) {
    const auto& [s, h] = idx[static_cast<std::size_t>(i)];
    if (a.ce_s(s, h) > epsilon) terms[count++] = a.flat_log_weight()[i];
  }
  const double p = count == 0 ? 0.0 : std::exp(log_sum_exp(terms.head(count)));
  return delta + p;
}

double literature_bassily(const LearnerAnalysis& a, double delta) {
  check_delta(delta);
  return std::sqrt((a.mutual_information() + 1.0 + delta) / (2.0 * a.n() * delta));
}

double literature_esposito(const LearnerAnalysis& a, double alpha, double delta) {
  check_delta(delta);
  if (!(alpha > 1.0)) throw InvalidOrder("alpha must be > 1");
  const double i_alpha = a.sibson_mi_s_h(alpha);
  const double arg =
      i_alpha + std::log(2.0) - alpha / (alpha - 1.0) * std::log(delta);
  return std::sqrt(arg / (2.0 * a.n()));
}

double PreparedBound::mass_weighted_mean(const LearnerAnalysis& a) const {
  KahanSum sum;
  const auto& idx = a.flat_index();
  for (Eigen::Index i = 0; i < a.flat_log_weight().size(); ++i) {
    const auto& [s, h] = idx[static_cast<std::size_t>(i)];
    sum.add(std::exp(a.flat_log_weight()[i]) * eps(s, h));
  }
  return sum.value();
}

double PreparedBound::max_over_support(const LearnerAnalysis& a) const {
  double m = kNegInf;
  const auto& idx = a.flat_index();
  for (Eigen::Index i = 0; i < a.flat_log_weight().size(); ++i) {
    const auto& [s, h] = idx[static_cast<std::size_t>(i)];
    m = std::max(m, eps(s, h));
  }
  return m;
}

PreparedBound prepare_bound(const LearnerAnalysis& a, const BoundSpec& spec) {
  PreparedBound b;
  b.name = spec.name;
  b.params = spec.params;
  const BoundParams& p = spec.params;
  const double n = a.n();
  const std::int64_t m = a.num_datasets();
  const Eigen::Index hn = a.num_hypotheses();

  const auto posterior_term = [&](double beta) {
    Eigen::VectorXd t(m);
    for (std::int64_t s = 0; s < m; ++s) t[s] = a.renyi_posterior_vs_prior(s, beta) / n;
    return t;
  };

  if (spec.name == "bayes") {
    check_delta(p.delta);
    check_orders(p.alpha, p.beta);
    b.scope = BoundScope::per_s_h;
    b.h_term.resize(hn);
    for (Eigen::Index h = 0; h < hn; ++h)
      b.h_term[h] = a.hypothesis_alive(h)
                        ? (p.alpha - 1.0) / (p.alpha * n) * a.renyi_q_vs_p_given_h(h, p.alpha)
                        : kInf;
    b.s_term = posterior_term(p.beta);
    b.const_term =
        (1.0 / (p.alpha * n) + 1.0 / ((p.beta - 1.0) * n)) * std::log(2.0 / p.delta);
  } else if (spec.name == "hellchi") {
    check_delta(p.delta);
    b.scope = BoundScope::per_s_h;
    b.h_term.resize(hn);
    for (Eigen::Index h = 0; h < hn; ++h) {
      if (!a.hypothesis_alive(h)) {
        b.h_term[h] = kInf;
        continue;
      }
      const double hel = a.hellinger_per_h()[h];
      if (!(hel < 2.0)) throw DegenerateHellinger();
      b.h_term[h] = 2.0 / n * std::log1p(-hel / 2.0);
    }
    b.const_term = 3.0 / n * std::log(2.0 / p.delta);
    if (p.expected_cs) {
      // footnote variant: the chi-square term in expectation over datasets
      KahanSum mean;
      for (std::int64_t s = 0; s < m; ++s) {
        const double ps = std::exp(a.log_p_s()[s]);
        if (ps > 0.0) mean.add(ps * std::log1p(a.cs_per_s()[s]));
      }
      b.const_term += mean.value() / n;
    } else {
      b.s_term.resize(m);
      for (std::int64_t s = 0; s < m; ++s) b.s_term[s] = std::log1p(a.cs_per_s()[s]) / n;
    }
  } else if (spec.name == "viallard") {
    check_delta(p.delta);
    if (!(p.beta > 1.0)) throw InvalidOrder("beta must be > 1");
    b.scope = BoundScope::per_s;
    b.s_term = posterior_term(p.beta);
    b.const_term = (1.0 + p.beta / (p.beta - 1.0)) * std::log(2.0 / p.delta) / n;
  } else if (spec.name == "little") {
    b.scope = BoundScope::global;
    b.const_term = bound_little(a, p.delta).epsilon;
  } else if (spec.name == "chernoff") {
    const ChernoffResult res = bound_chernoff(a, p);
    b.scope = BoundScope::global;
    b.const_term = res.value.epsilon;
    b.minimizing_t = res.t;
    b.not_attained = res.not_attained;
  } else if (spec.name == "finite_h") {
    b.scope = BoundScope::global;
    b.const_term = bound_finite_h(hn, a.n(), p.delta).epsilon;
  } else if (spec.name == "subgaussian") {
    const double sigma = p.sigma >= 0.0 ? p.sigma : fit_sigma(a);
    BoundParams with_sigma = p;
    with_sigma.sigma = sigma;
    b.scope = BoundScope::global;
    b.const_term = bound_subgaussian(a, with_sigma).epsilon;
    b.sigma = sigma;
    b.certificate_ok = subgaussian_certificate(a, sigma).holds;
  } else if (spec.name == "regular") {
    b.scope = BoundScope::global;
    b.const_term = bound_regular(p, a.n()).epsilon;
  } else if (spec.name == "bassily") {
    b.scope = BoundScope::global;
    b.const_term = literature_bassily(a, p.delta);
    b.comparison_only = true;
  } else if (spec.name == "esposito") {
    b.scope = BoundScope::global;
    b.const_term = literature_esposito(a, p.alpha, p.delta);
    b.comparison_only = true;
  } else {
    throw ConfigParse("unknown bound name: " + spec.name);
  }
  return b;
}

}  // namespace pacman
