// Information measures on finite alphabets, computed exactly in log domain.
// +inf is a legitimate return value wherever absolute continuity fails;
// 0 log 0 = 0 throughout.
#pragma once

#include <Eigen/Core>

#include "pacman/prob.hpp"

namespace pacman {

// Low-level variants over raw log-probability vectors. These are what the
// learner module applies to dataset-space columns.
double kl_divergence_log(const Eigen::Ref<const Eigen::VectorXd>& log_p,
                         const Eigen::Ref<const Eigen::VectorXd>& log_q);
double renyi_divergence_log(const Eigen::Ref<const Eigen::VectorXd>& log_p,
                            const Eigen::Ref<const Eigen::VectorXd>& log_q, double alpha);
double chi_square_log(const Eigen::Ref<const Eigen::VectorXd>& log_p,
                      const Eigen::Ref<const Eigen::VectorXd>& log_q);
double hellinger_sq_log(const Eigen::Ref<const Eigen::VectorXd>& log_p,
                        const Eigen::Ref<const Eigen::VectorXd>& log_q);

double kl_divergence(const Distribution& p, const Distribution& q);
// alpha = 1 dispatches to KL; alpha <= 0 is NonPositiveAlpha.
double renyi_divergence(const Distribution& p, const Distribution& q, double alpha);
double chi_square(const Distribution& p, const Distribution& q);
double hellinger_sq(const Distribution& p, const Distribution& q);

// Sum of absolute differences, in [0, 2].
double total_variation(const Distribution& p, const Distribution& q);
// Half the above: the usual total variation distance, in [0, 1].
double total_variation_standard(const Distribution& p, const Distribution& q);

double entropy(const Distribution& p);
double mutual_information(const JointDistribution& joint);
double conditional_entropy(const JointDistribution& joint);

// Sibson mutual information of order alpha (> 0, != 1) for input law px and
// conditional channel, via the closed-form minimizer over output laws:
//   (alpha/(alpha-1)) * log sum_y ( sum_x p(x) p(y|x)^alpha )^(1/alpha).
// Equals inf over q of D_alpha(p(x)p(y|x) || p(x)q(y)).
double sibson_mi(const Distribution& px, const Channel& channel, double alpha);

// Augustin-Csiszar mutual information: inf over output laws q of
// E_x[D_alpha(p(y|x) || q)] (expectation outside the divergence). No closed
// form exists; computed by projected gradient descent on the convex
// objective. The two orders coincide only at alpha = 1; for alpha > 1 the
// Sibson value dominates, for alpha < 1 it is dominated.
double augustin_mi(const Distribution& px, const Channel& channel, double alpha,
                   int max_iter = 20000);

}  // namespace pacman
