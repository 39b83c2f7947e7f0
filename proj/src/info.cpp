#include "pacman/info.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pacman/errors.hpp"
#include "pacman/logsum.hpp"

namespace pacman {

namespace {

void check_same_support(Eigen::Index a, Eigen::Index b) {
  if (a != b)
    throw SupportMismatch("supports differ: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

double kl_divergence_log(const Eigen::Ref<const Eigen::VectorXd>& log_p,
                         const Eigen::Ref<const Eigen::VectorXd>& log_q) {
  check_same_support(log_p.size(), log_q.size());
  KahanSum sum;
  for (Eigen::Index i = 0; i < log_p.size(); ++i) {
    if (log_p[i] == kNegInf) continue;  // 0 log(0/q) = 0
    if (log_q[i] == kNegInf) return kInf;
    sum.add(std::exp(log_p[i]) * (log_p[i] - log_q[i]));
  }
  return std::max(0.0, sum.value());
}

double renyi_divergence_log(const Eigen::Ref<const Eigen::VectorXd>& log_p,
                            const Eigen::Ref<const Eigen::VectorXd>& log_q, double alpha) {
  check_same_support(log_p.size(), log_q.size());
  if (!(alpha > 0.0)) throw NonPositiveAlpha("Renyi order must be positive");
  if (alpha == 1.0) return kl_divergence_log(log_p, log_q);

  // sum_i p_i^alpha q_i^(1-alpha) in log domain.
  Eigen::VectorXd terms(log_p.size());
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < log_p.size(); ++i) {
    if (log_p[i] == kNegInf) continue;  // p mass zero contributes nothing
    if (log_q[i] == kNegInf) {
      if (alpha > 1.0) return kInf;  // p^alpha / q^(alpha-1) diverges
      continue;                      // alpha < 1: p^alpha * 0^(1-alpha) = 0
    }
    terms[count++] = alpha * log_p[i] + (1.0 - alpha) * log_q[i];
  }
  const double lse = log_sum_exp(terms.head(count));
  if (lse == kNegInf) return kInf;  // disjoint supports
  return std::max(0.0, lse / (alpha - 1.0));
}

double chi_square_log(const Eigen::Ref<const Eigen::VectorXd>& log_p,
                      const Eigen::Ref<const Eigen::VectorXd>& log_q) {
  check_same_support(log_p.size(), log_q.size());
  Eigen::VectorXd terms(log_p.size());
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < log_p.size(); ++i) {
    if (log_p[i] == kNegInf) continue;
    if (log_q[i] == kNegInf) return kInf;
    terms[count++] = 2.0 * log_p[i] - log_q[i];
  }
  return std::max(0.0, std::expm1(log_sum_exp(terms.head(count))));
}

double hellinger_sq_log(const Eigen::Ref<const Eigen::VectorXd>& log_p,
                        const Eigen::Ref<const Eigen::VectorXd>& log_q) {
  check_same_support(log_p.size(), log_q.size());
  // Bhattacharyya coefficient sum_i sqrt(p_i q_i) in log domain.
  Eigen::VectorXd terms(log_p.size());
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < log_p.size(); ++i) {
    if (log_p[i] == kNegInf || log_q[i] == kNegInf) continue;
    terms[count++] = 0.5 * (log_p[i] + log_q[i]);
  }
  const double log_bc = log_sum_exp(terms.head(count));
  if (log_bc == kNegInf) return 2.0;
  return std::max(0.0, -2.0 * std::expm1(std::min(0.0, log_bc)));
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  return kl_divergence_log(p.log_probs(), q.log_probs());
}

double renyi_divergence(const Distribution& p, const Distribution& q, double alpha) {
  return renyi_divergence_log(p.log_probs(), q.log_probs(), alpha);
}

double chi_square(const Distribution& p, const Distribution& q) {
  return chi_square_log(p.log_probs(), q.log_probs());
}

double hellinger_sq(const Distribution& p, const Distribution& q) {
  return hellinger_sq_log(p.log_probs(), q.log_probs());
}

double total_variation(const Distribution& p, const Distribution& q) {
  check_same_support(p.size(), q.size());
  KahanSum sum;
  for (Eigen::Index i = 0; i < p.size(); ++i) sum.add(std::abs(p.prob(i) - q.prob(i)));
  return sum.value();
}

double total_variation_standard(const Distribution& p, const Distribution& q) {
  return 0.5 * total_variation(p, q);
}

double entropy(const Distribution& p) {
  KahanSum sum;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double lp = p.log_prob(i);
    if (lp == kNegInf) continue;
    sum.add(-std::exp(lp) * lp);
  }
  return std::max(0.0, sum.value());
}

double mutual_information(const JointDistribution& joint) {
  const Distribution px = joint.marginal_x();
  const Distribution py = joint.marginal_y();
  KahanSum sum;
  for (Eigen::Index x = 0; x < joint.x_size(); ++x) {
    for (Eigen::Index y = 0; y < joint.y_size(); ++y) {
      const double lxy = joint.log_prob(x, y);
      if (lxy == kNegInf) continue;
      sum.add(std::exp(lxy) * (lxy - px.log_prob(x) - py.log_prob(y)));
    }
  }
  return std::max(0.0, sum.value());
}

double conditional_entropy(const JointDistribution& joint) {
  const Distribution px = joint.marginal_x();
  KahanSum sum;
  for (Eigen::Index x = 0; x < joint.x_size(); ++x) {
    for (Eigen::Index y = 0; y < joint.y_size(); ++y) {
      const double lxy = joint.log_prob(x, y);
      if (lxy == kNegInf) continue;
      sum.add(-std::exp(lxy) * (lxy - px.log_prob(x)));
    }
  }
  return std::max(0.0, sum.value());
}

double sibson_mi(const Distribution& px, const Channel& channel, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw InvalidAlpha("Sibson order must be positive and != 1");
  check_same_support(px.size(), channel.x_size());
  Eigen::VectorXd inner(channel.y_size());
  Eigen::VectorXd terms(channel.x_size());
  for (Eigen::Index y = 0; y < channel.y_size(); ++y) {
    Eigen::Index count = 0;
    for (Eigen::Index x = 0; x < channel.x_size(); ++x) {
      const double lpx = px.log_prob(x);
      const double lyx = channel.log_rows()(x, y);
      if (lpx == kNegInf || lyx == kNegInf) continue;
      terms[count++] = lpx + alpha * lyx;
    }
    inner[y] = log_sum_exp(terms.head(count)) / alpha;
  }
  return std::max(0.0, alpha / (alpha - 1.0) * log_sum_exp(inner));
}

namespace {

// E_x[D_alpha(p(y|x) || q)] for a strictly positive q on the simplex.
double augustin_objective(const Distribution& px, const Channel& channel, double alpha,
                          const Eigen::VectorXd& log_q) {
  KahanSum total;
  Eigen::VectorXd terms(channel.y_size());
  for (Eigen::Index x = 0; x < channel.x_size(); ++x) {
    const double lpx = px.log_prob(x);
    if (lpx == kNegInf) continue;
    Eigen::Index count = 0;
    for (Eigen::Index y = 0; y < channel.y_size(); ++y) {
      const double lyx = channel.log_rows()(x, y);
      if (lyx == kNegInf) continue;
      terms[count++] = alpha * lyx + (1.0 - alpha) * log_q[y];
    }
    total.add(std::exp(lpx) * log_sum_exp(terms.head(count)));
  }
  return total.value() / (alpha - 1.0);
}

Eigen::VectorXd project_to_simplex(Eigen::VectorXd v) {
  Eigen::VectorXd sorted = v;
  std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
  double cumulative = 0.0, theta = 0.0;
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::max(0.0, v[i] - theta);
  return v;
}

}  // namespace

double augustin_mi(const Distribution& px, const Channel& channel, double alpha,
                   int max_iter) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw InvalidAlpha("order must be positive and != 1");
  check_same_support(px.size(), channel.x_size());
  const Eigen::Index ysize = channel.y_size();
  constexpr double floor = 1e-13;

  const auto objective = [&](const Eigen::VectorXd& q) {
    return augustin_objective(px, channel, alpha, q.array().log().matrix());
  };

  // Warm starts: the output marginal and the Sibson closed-form minimizer.
  std::vector<Eigen::VectorXd> starts;
  {
    Eigen::VectorXd marginal = Eigen::VectorXd::Zero(ysize);
    for (Eigen::Index x = 0; x < channel.x_size(); ++x)
      for (Eigen::Index y = 0; y < ysize; ++y)
        marginal[y] += px.prob(x) * std::exp(channel.log_rows()(x, y));
    marginal = marginal.cwiseMax(floor);
    starts.push_back(marginal / marginal.sum());
  }
  {
    Eigen::VectorXd sibson(ysize);
    for (Eigen::Index y = 0; y < ysize; ++y) {
      Eigen::VectorXd terms(channel.x_size());
      Eigen::Index count = 0;
      for (Eigen::Index x = 0; x < channel.x_size(); ++x) {
        if (px.log_prob(x) == kNegInf || channel.log_rows()(x, y) == kNegInf) continue;
        terms[count++] = px.log_prob(x) + alpha * channel.log_rows()(x, y);
      }
      sibson[y] = count == 0 ? kNegInf : log_sum_exp(terms.head(count)) / alpha;
    }
    const double lse = log_sum_exp(sibson);
    Eigen::VectorXd q(ysize);
    for (Eigen::Index y = 0; y < ysize; ++y)
      q[y] = std::max(std::exp(sibson[y] - lse), floor);
    starts.push_back(q / q.sum());
  }

  double best = kInf;
  for (Eigen::VectorXd q : starts) {
    double f = objective(q);
    for (int iter = 0; iter < max_iter; ++iter) {
      // gradient: -sum_x p(x) p(y|x)^alpha q_y^-alpha / B_x
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(ysize);
      for (Eigen::Index x = 0; x < channel.x_size(); ++x) {
        const double pxv = px.prob(x);
        if (pxv == 0.0) continue;
        double bx = 0.0;
        Eigen::VectorXd numer(ysize);
        for (Eigen::Index y = 0; y < ysize; ++y) {
          const double pyx = std::exp(channel.log_rows()(x, y));
          numer[y] = std::pow(pyx, alpha) * std::pow(q[y], -alpha);
          bx += numer[y] * q[y];
        }
        grad -= pxv / bx * numer;
      }
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 70; ++ls) {
        Eigen::VectorXd cand = project_to_simplex(q - step * grad);
        cand = cand.cwiseMax(floor);
        cand /= cand.sum();
        const double fc = objective(cand);
        if (fc < f - 1e-16) {
          moved = (cand - q).lpNorm<Eigen::Infinity>() > 1e-15;
          q = cand;
          f = fc;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    best = std::min(best, f);
  }
  return std::max(0.0, best);
}

}  // namespace pacman
