// Stochastic learners over a finite hypothesis set and the exact joint-law
// analysis every bound consumes: induced prior, per-dataset posteriors,
// likelihoods, tilted dataset laws, mutual information, posterior-to-prior
// chi-square, per-hypothesis Hellinger penalties, and the gap MGF.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pacman/classifier.hpp"
#include "pacman/prob.hpp"

namespace pacman {

struct HypothesisSet {
  std::vector<SoftClassifier> items;

  Eigen::Index size() const { return static_cast<Eigen::Index>(items.size()); }
  Eigen::Index x_size() const { return items.front().x_size(); }
  Eigen::Index y_size() const { return items.front().y_size(); }
  const SoftClassifier& operator[](Eigen::Index h) const {
    return items[static_cast<std::size_t>(h)];
  }
  void validate() const;

  static HypothesisSet random(Eigen::Index count, Eigen::Index x_size, Eigen::Index y_size,
                              std::uint64_t seed);
};

enum class LearnerKind { gibbs_erm, deterministic_erm, data_independent };

// p(h|S): Gibbs posterior prior(h) * exp(-gamma * n * CE_S(h)) (normalized),
// point mass on the empirical-CE argmin, or the data-independent prior.
struct Learner {
  LearnerKind kind;
  double gamma;  // inverse temperature, >= 0; used by gibbs_erm only
  Distribution prior;

  Learner(LearnerKind k, double g, Distribution p);
};

Distribution posterior(const Learner& learner, const HypothesisSet& hypotheses,
                       const Dataset& s);
// Same, from precomputed per-hypothesis empirical cross-entropies.
Distribution posterior_from_ce(const Learner& learner,
                               const Eigen::Ref<const Eigen::VectorXd>& ce, int n);

// Exact enumeration over DatasetSpace x H. Materialized when
// |DatasetSpace| * |H| <= cap, else EnumerationCapExceeded.
class LearnerAnalysis {
 public:
  static LearnerAnalysis analyze(const World& world, const HypothesisSet& hypotheses,
                                 const Learner& learner, std::int64_t cap = kDefaultEnumCap);

  const World& world() const { return world_; }
  const HypothesisSet& hypotheses() const { return hypotheses_; }
  const Learner& learner() const { return learner_; }
  const DatasetSpace& dataset_space() const { return space_; }
  std::int64_t num_datasets() const { return log_p_s_.size(); }
  Eigen::Index num_hypotheses() const { return hypotheses_.size(); }
  int n() const { return world_.n; }

  // Core tables (datasets indexed lexicographically, hypotheses by list order).
  const Eigen::VectorXd& log_p_s() const { return log_p_s_; }         // M
  const Eigen::MatrixXd& log_posterior() const { return log_posterior_; }  // M x H
  const Eigen::MatrixXd& gap() const { return gap_; }                 // M x H
  const Eigen::VectorXd& log_prior() const { return log_prior_; }     // induced p(h)
  const Eigen::VectorXd& tilde_ce_per_h() const { return tilde_ce_per_h_; }

  double ce_s(std::int64_t s, Eigen::Index h) const {
    return tilde_ce_per_h_[h] - gap_(s, h);
  }
  bool hypothesis_alive(Eigen::Index h) const { return log_prior_[h] != kNegInf; }
  double log_p_s_given_h(std::int64_t s, Eigen::Index h) const;
  double log_q_s_given_h(std::int64_t s, Eigen::Index h) const;
  Eigen::VectorXd log_p_s_given_h_col(Eigen::Index h) const;  // M
  Eigen::VectorXd log_q_s_given_h_col(Eigen::Index h) const;  // M

  // Information quantities.
  double mutual_information() const { return mi_; }        // I(S;h)
  const Eigen::VectorXd& cs_per_s() const { return cs_per_s_; }  // chi^2(p(h|S)||p(h))
  const Eigen::VectorXd& hellinger_per_h() const { return hel_per_h_; }  // NaN if dead
  double expected_gap() const { return expected_gap_; }

  // Renyi divergences the bounds consume, per hypothesis / per dataset.
  double renyi_q_vs_p_given_h(Eigen::Index h, double alpha) const;
  double renyi_posterior_vs_prior(std::int64_t s, double beta) const;
  // Sibson alpha-MI of the dataset -> hypothesis channel.
  double sibson_mi_s_h(double alpha) const;

  // log C_n(t) = log E[(q(S|h)/p(S))^{t/n}] = log E[exp(t * gap)], t > 0.
  double log_mgf(double t) const;
  double mgf(double t) const { return std::exp(log_mgf(t)); }

  // log q~(S,h) = log[q(S|h) p(h|S) / C_n(n)], an M x H joint law.
  Eigen::MatrixXd tilde_q_joint() const;

  // Flattened positive-mass (S,h) entries for fast reductions.
  const Eigen::VectorXd& flat_log_weight() const { return flat_log_weight_; }
  const Eigen::VectorXd& flat_gap() const { return flat_gap_; }
  const std::vector<std::pair<std::int64_t, Eigen::Index>>& flat_index() const {
    return flat_index_;
  }

 private:
  LearnerAnalysis(World world, HypothesisSet hypotheses, Learner learner, DatasetSpace space);

  World world_;
  HypothesisSet hypotheses_;
  Learner learner_;
  DatasetSpace space_;

  Eigen::VectorXd log_p_s_;
  Eigen::MatrixXd log_posterior_;
  Eigen::MatrixXd gap_;
  Eigen::VectorXd log_prior_;
  Eigen::VectorXd tilde_ce_per_h_;
  Eigen::VectorXd log_correct_mass_per_h_;
  Eigen::VectorXd cs_per_s_;
  Eigen::VectorXd hel_per_h_;
  double mi_ = 0.0;
  double expected_gap_ = 0.0;

  Eigen::VectorXd flat_log_weight_;
  Eigen::VectorXd flat_gap_;
  std::vector<std::pair<std::int64_t, Eigen::Index>> flat_index_;
};

}  // namespace pacman
