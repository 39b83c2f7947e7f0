#include "pacman/learner.hpp"

#include <cmath>
#include <string>

#include "pacman/errors.hpp"
#include "pacman/info.hpp"
#include "pacman/logsum.hpp"

namespace pacman {

void HypothesisSet::validate() const {
  if (items.empty()) throw Error("hypothesis set must be nonempty");
  for (const auto& h : items)
    if (h.x_size() != x_size() || h.y_size() != y_size())
      throw DimensionMismatch("hypotheses must share dimensions");
}

HypothesisSet HypothesisSet::random(Eigen::Index count, Eigen::Index x_size,
                                    Eigen::Index y_size, std::uint64_t seed) {
  if (count < 1) throw Error("hypothesis count must be >= 1");
  HypothesisSet hs;
  Rng root(seed);
  hs.items.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    Rng child = root.split(static_cast<std::uint64_t>(i));
    hs.items.push_back(SoftClassifier::random(x_size, y_size, child));
  }
  return hs;
}

Learner::Learner(LearnerKind k, double g, Distribution p)
    : kind(k), gamma(g), prior(std::move(p)) {
  if (kind == LearnerKind::gibbs_erm && !(gamma >= 0.0))
    throw Error("gibbs inverse temperature must be >= 0");
}

Distribution posterior_from_ce(const Learner& learner,
                               const Eigen::Ref<const Eigen::VectorXd>& ce, int n) {
  if (ce.size() != learner.prior.size())
    throw DimensionMismatch("cross-entropy vector size does not match prior");
  switch (learner.kind) {
    case LearnerKind::data_independent:
      return learner.prior;
    case LearnerKind::deterministic_erm: {
      Eigen::Index best = 0;
      for (Eigen::Index h = 1; h < ce.size(); ++h)
        if (ce[h] < ce[best]) best = h;  // strict: ties keep lowest index
      return Distribution::point_mass(ce.size(), best);
    }
    case LearnerKind::gibbs_erm: {
      Eigen::VectorXd lp(ce.size());
      for (Eigen::Index h = 0; h < ce.size(); ++h) {
        const double prior_l = learner.prior.log_prob(h);
        lp[h] = prior_l == kNegInf ? kNegInf
                                   : prior_l - learner.gamma * static_cast<double>(n) * ce[h];
      }
      const double lz = log_sum_exp(lp);
      for (Eigen::Index h = 0; h < lp.size(); ++h)
        if (lp[h] != kNegInf) lp[h] -= lz;
      return Distribution::from_log_probs(std::move(lp));
    }
  }
  throw Error("unknown learner kind");
}

Distribution posterior(const Learner& learner, const HypothesisSet& hypotheses,
                       const Dataset& s) {
  hypotheses.validate();
  Eigen::VectorXd ce(hypotheses.size());
  for (Eigen::Index h = 0; h < hypotheses.size(); ++h) ce[h] = empirical_ce(s, hypotheses[h]);
  return posterior_from_ce(learner, ce, s.n());
}

LearnerAnalysis::LearnerAnalysis(World world, HypothesisSet hypotheses, Learner learner,
                                 DatasetSpace space)
    : world_(std::move(world)),
      hypotheses_(std::move(hypotheses)),
      learner_(std::move(learner)),
      space_(std::move(space)) {}

LearnerAnalysis LearnerAnalysis::analyze(const World& world, const HypothesisSet& hypotheses,
                                         const Learner& learner, std::int64_t cap) {
  hypotheses.validate();
  if (hypotheses.x_size() != world.x_size() || hypotheses.y_size() != world.y_size())
    throw DimensionMismatch("hypotheses and world dimensions disagree");
  if (learner.prior.size() != hypotheses.size())
    throw DimensionMismatch("prior size does not match hypothesis count");

  DatasetSpace space(world, cap);
  const std::int64_t m = space.size();
  const Eigen::Index hn = hypotheses.size();
  if (m > cap / hn)
    throw EnumerationCapExceeded("dataset-hypothesis table " + std::to_string(m) + " x " +
                                 std::to_string(hn) + " exceeds cap " + std::to_string(cap));

  LearnerAnalysis a(world, hypotheses, learner, std::move(space));
  const int n = world.n;
  const Eigen::Index k_count = world.x_size() * world.y_size();

  // Per-pair log h(x)_y with pairs flattened row-major, one column per h.
  Eigen::MatrixXd pair_log_h(k_count, hn);
  for (Eigen::Index h = 0; h < hn; ++h) {
    Eigen::Index k = 0;
    for (Eigen::Index x = 0; x < world.x_size(); ++x)
      for (Eigen::Index y = 0; y < world.y_size(); ++y)
        pair_log_h(k++, h) = hypotheses[h].log_prob(x, y);
  }

  a.tilde_ce_per_h_.resize(hn);
  a.log_correct_mass_per_h_.resize(hn);
  for (Eigen::Index h = 0; h < hn; ++h) {
    a.log_correct_mass_per_h_[h] = log_correct_mass(world, hypotheses[h]);
    a.tilde_ce_per_h_[h] = detail::tilde_ce_from_log_mass(a.log_correct_mass_per_h_[h]);
  }

  a.log_p_s_.resize(m);
  a.log_posterior_.resize(m, hn);
  a.gap_.resize(m, hn);

  Eigen::VectorXd sum_log_h(hn);
  Eigen::VectorXd ce(hn);
  a.space_.for_each([&](std::int64_t s, const Dataset& ds, double log_p) {
    a.log_p_s_[s] = log_p;
    sum_log_h.setZero();
    for (const auto& [x, y] : ds.pairs)
      sum_log_h += pair_log_h.row(x * world.y_size() + y).transpose();
    ce = -sum_log_h / static_cast<double>(n);
    a.log_posterior_.row(s) = posterior_from_ce(learner, ce, n).log_probs().transpose();
    a.gap_.row(s) =
        (sum_log_h / static_cast<double>(n) - a.log_correct_mass_per_h_).transpose();
  });

  // Induced prior p(h) = sum_S p(S) p(h|S).
  a.log_prior_.resize(hn);
  for (Eigen::Index h = 0; h < hn; ++h)
    a.log_prior_[h] = log_sum_exp(a.log_p_s_ + a.log_posterior_.col(h));

  // I(S;h), E[gap], CS(S), flattened weights; single pass over the table.
  KahanSum mi_sum, gap_sum;
  a.cs_per_s_.resize(m);
  std::vector<double> flat_w, flat_g;
  Eigen::VectorXd cs_terms(hn);
  for (std::int64_t s = 0; s < m; ++s) {
    const double lps = a.log_p_s_[s];
    Eigen::Index cs_count = 0;
    bool cs_infinite = false;
    for (Eigen::Index h = 0; h < hn; ++h) {
      const double lpost = a.log_posterior_(s, h);
      if (lpost == kNegInf) continue;
      if (a.log_prior_[h] == kNegInf) {
        // Only reachable through zero-mass datasets; asserted below.
        cs_infinite = true;
        continue;
      }
      cs_terms[cs_count++] = 2.0 * lpost - a.log_prior_[h];
      if (lps == kNegInf) continue;
      const double w = std::exp(lps + lpost);
      mi_sum.add(w * (lpost - a.log_prior_[h]));
      gap_sum.add(w * a.gap_(s, h));
      flat_w.push_back(lps + lpost);
      flat_g.push_back(a.gap_(s, h));
      a.flat_index_.emplace_back(s, h);
    }
    if (cs_infinite) {
      if (lps != kNegInf)
        throw Error("posterior mass on a prior-null hypothesis from a positive-mass dataset");
      a.cs_per_s_[s] = kInf;
    } else {
      a.cs_per_s_[s] = std::max(0.0, std::expm1(log_sum_exp(cs_terms.head(cs_count))));
    }
  }
  a.mi_ = std::max(0.0, mi_sum.value());
  a.expected_gap_ = gap_sum.value();
  a.flat_log_weight_ = Eigen::Map<const Eigen::VectorXd>(flat_w.data(),
                                                         static_cast<Eigen::Index>(flat_w.size()));
  a.flat_gap_ = Eigen::Map<const Eigen::VectorXd>(flat_g.data(),
                                                  static_cast<Eigen::Index>(flat_g.size()));

  // H(h) = Hel^2(q(S|h), p(S|h)) per alive hypothesis.
  a.hel_per_h_.resize(hn);
  for (Eigen::Index h = 0; h < hn; ++h) {
    if (!a.hypothesis_alive(h)) {
      a.hel_per_h_[h] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    a.hel_per_h_[h] = hellinger_sq_log(a.log_q_s_given_h_col(h), a.log_p_s_given_h_col(h));
  }
  return a;
}

double LearnerAnalysis::log_p_s_given_h(std::int64_t s, Eigen::Index h) const {
  const double lprior = log_prior_[h];
  if (lprior == kNegInf) throw Error("p(S|h) undefined for a prior-null hypothesis");
  const double lnum = log_p_s_[s] == kNegInf || log_posterior_(s, h) == kNegInf
                          ? kNegInf
                          : log_p_s_[s] + log_posterior_(s, h);
  return lnum == kNegInf ? kNegInf : lnum - lprior;
}

double LearnerAnalysis::log_q_s_given_h(std::int64_t s, Eigen::Index h) const {
  const double lps = log_p_s_[s];
  return lps == kNegInf ? kNegInf : lps + static_cast<double>(n()) * gap_(s, h);
}

Eigen::VectorXd LearnerAnalysis::log_p_s_given_h_col(Eigen::Index h) const {
  Eigen::VectorXd col(num_datasets());
  for (std::int64_t s = 0; s < num_datasets(); ++s) col[s] = log_p_s_given_h(s, h);
  return col;
}

Eigen::VectorXd LearnerAnalysis::log_q_s_given_h_col(Eigen::Index h) const {
  Eigen::VectorXd col(num_datasets());
  for (std::int64_t s = 0; s < num_datasets(); ++s) col[s] = log_q_s_given_h(s, h);
  return col;
}

double LearnerAnalysis::renyi_q_vs_p_given_h(Eigen::Index h, double alpha) const {
  if (!hypothesis_alive(h)) throw Error("divergence undefined for a prior-null hypothesis");
  return renyi_divergence_log(log_q_s_given_h_col(h), log_p_s_given_h_col(h), alpha);
}

double LearnerAnalysis::renyi_posterior_vs_prior(std::int64_t s, double beta) const {
  return renyi_divergence_log(log_posterior_.row(s).transpose(), log_prior_, beta);
}

double LearnerAnalysis::sibson_mi_s_h(double alpha) const {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw InvalidAlpha("Sibson order must be positive and != 1");
  const Eigen::Index hn = num_hypotheses();
  Eigen::VectorXd inner(hn);
  Eigen::VectorXd terms(num_datasets());
  for (Eigen::Index h = 0; h < hn; ++h) {
    Eigen::Index count = 0;
    for (std::int64_t s = 0; s < num_datasets(); ++s) {
      if (log_p_s_[s] == kNegInf || log_posterior_(s, h) == kNegInf) continue;
      terms[count++] = log_p_s_[s] + alpha * log_posterior_(s, h);
    }
    inner[h] = log_sum_exp(terms.head(count)) / alpha;
  }
  return std::max(0.0, alpha / (alpha - 1.0) * log_sum_exp(inner));
}

double LearnerAnalysis::log_mgf(double t) const {
  if (!(t > 0.0)) throw NonPositiveT("MGF argument must be positive");
  const double v = log_sum_exp((flat_log_weight_ + t * flat_gap_).eval());
  if (std::isnan(v)) throw InfiniteMGF("MGF is not finite");
  return v;
}

Eigen::MatrixXd LearnerAnalysis::tilde_q_joint() const {
  const double log_cn = log_mgf(static_cast<double>(n()));
  if (!std::isfinite(log_cn)) throw InfiniteMGF("C_n(n) is not finite");
  Eigen::MatrixXd lq(num_datasets(), num_hypotheses());
  for (std::int64_t s = 0; s < num_datasets(); ++s) {
    for (Eigen::Index h = 0; h < num_hypotheses(); ++h) {
      const double lqs = log_q_s_given_h(s, h);
      const double lpost = log_posterior_(s, h);
      lq(s, h) = lqs == kNegInf || lpost == kNegInf ? kNegInf : lqs + lpost - log_cn;
    }
  }
  return lq;
}

}  // namespace pacman
