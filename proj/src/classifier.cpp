#include "pacman/classifier.hpp"

#include <cmath>
#include <map>

#include "pacman/errors.hpp"
#include "pacman/logsum.hpp"

namespace pacman {

namespace {

void check_dims(const World& world, Eigen::Index x_size, Eigen::Index y_size) {
  if (world.x_size() != x_size || world.y_size() != y_size)
    throw DimensionMismatch("world and classifier dimensions disagree");
}

}  // namespace

SoftClassifier SoftClassifier::from_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  if (rows.rows() < 1 || rows.cols() < 1) throw Error("classifier must be nonempty");
  Eigen::MatrixXd r(rows.rows(), rows.cols());
  for (Eigen::Index x = 0; x < rows.rows(); ++x) {
    double total = 0.0;
    for (Eigen::Index y = 0; y < rows.cols(); ++y) {
      const double v = rows(x, y);
      if (!std::isfinite(v)) throw NonFiniteWeight("classifier row entry is not finite");
      if (v < 0.0) throw NegativeWeight("classifier row entry is negative");
      total += v;
    }
    if (total <= 0.0) throw AllZeroWeights();
    for (Eigen::Index y = 0; y < rows.cols(); ++y)
      r(x, y) = std::min(std::max(rows(x, y) / total, kClampEps), 1.0 - kClampEps);
    r.row(x) /= r.row(x).sum();  // re-normalize after clamping
  }
  Eigen::MatrixXd lr = r.array().log().matrix();
  return SoftClassifier(std::move(r), std::move(lr));
}

SoftClassifier SoftClassifier::uniform(Eigen::Index x_size, Eigen::Index y_size) {
  return from_rows(Eigen::MatrixXd::Constant(x_size, y_size, 1.0));
}

SoftClassifier SoftClassifier::random(Eigen::Index x_size, Eigen::Index y_size, Rng& rng) {
  Eigen::MatrixXd rows(x_size, y_size);
  for (Eigen::Index x = 0; x < x_size; ++x)
    for (Eigen::Index y = 0; y < y_size; ++y) rows(x, y) = rng.uniform(0.05, 1.0);
  return from_rows(rows);
}

double soft_risk(const World& world, const SoftClassifier& h) {
  check_dims(world, h.x_size(), h.y_size());
  KahanSum mass;
  for (Eigen::Index x = 0; x < world.x_size(); ++x)
    for (Eigen::Index y = 0; y < world.y_size(); ++y)
      mass.add(world.joint.prob(x, y) * h.prob(x, y));
  return std::min(1.0, std::max(0.0, 1.0 - mass.value()));
}

double log_correct_mass(const World& world, const SoftClassifier& h) {
  check_dims(world, h.x_size(), h.y_size());
  return log_sum_exp((world.joint.log_probs() + h.log_rows()).reshaped());
}

HardClassifier hard_decision(const SoftClassifier& h) {
  HardClassifier hc;
  hc.decisions.resize(static_cast<std::size_t>(h.x_size()));
  for (Eigen::Index x = 0; x < h.x_size(); ++x) {
    Eigen::Index best = 0;
    for (Eigen::Index y = 1; y < h.y_size(); ++y)
      if (h.prob(x, y) > h.prob(x, best)) best = y;  // strict: ties keep lowest index
    hc.decisions[static_cast<std::size_t>(x)] = best;
  }
  return hc;
}

double hard_risk(const World& world, const HardClassifier& hc) {
  if (static_cast<Eigen::Index>(hc.decisions.size()) != world.x_size())
    throw DimensionMismatch("world and hard classifier dimensions disagree");
  KahanSum correct;
  for (Eigen::Index x = 0; x < world.x_size(); ++x)
    correct.add(world.joint.prob(x, hc.decisions[static_cast<std::size_t>(x)]));
  return std::min(1.0, std::max(0.0, 1.0 - correct.value()));
}

double empirical_hard_risk(const Dataset& s, const HardClassifier& hc) {
  if (s.n() < 1) throw Error("dataset must be nonempty");
  int errors = 0;
  for (const auto& [x, y] : s.pairs) {
    if (x < 0 || x >= static_cast<Eigen::Index>(hc.decisions.size()))
      throw IndexOutOfRange("dataset x index out of range");
    if (hc.decisions[static_cast<std::size_t>(x)] != y) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(s.n());
}

double empirical_ce(const Dataset& s, const SoftClassifier& h) {
  if (s.n() < 1) throw Error("dataset must be nonempty");
  KahanSum sum;
  for (const auto& [x, y] : s.pairs) {
    if (x < 0 || x >= h.x_size() || y < 0 || y >= h.y_size())
      throw IndexOutOfRange("dataset pair index out of range");
    sum.add(-h.log_prob(x, y));
  }
  return sum.value() / static_cast<double>(s.n());
}

double true_ce(const World& world, const SoftClassifier& h) {
  check_dims(world, h.x_size(), h.y_size());
  KahanSum sum;
  for (Eigen::Index x = 0; x < world.x_size(); ++x)
    for (Eigen::Index y = 0; y < world.y_size(); ++y)
      sum.add(-world.joint.prob(x, y) * h.log_prob(x, y));
  return sum.value();
}

namespace detail {
double tilde_ce_from_log_mass(double log_mass) {
  // 1 - risk < 1e-300 counts as risk numerically 1.
  if (!(log_mass >= std::log(1e-300))) throw DegenerateRisk();
  return -log_mass;
}
}  // namespace detail

double tilde_ce(const World& world, const SoftClassifier& h) {
  const double risk = soft_risk(world, h);
  if (1.0 - risk < 1e-300) throw DegenerateRisk();
  return -std::log1p(-risk);
}

JointDistribution tilted_distribution(const World& world, const SoftClassifier& h) {
  const double lm = log_correct_mass(world, h);
  detail::tilde_ce_from_log_mass(lm);  // DegenerateRisk guard
  Eigen::MatrixXd lq = world.joint.log_probs() + h.log_rows();
  for (Eigen::Index x = 0; x < lq.rows(); ++x)
    for (Eigen::Index y = 0; y < lq.cols(); ++y)
      if (lq(x, y) != kNegInf) lq(x, y) -= lm;
  return JointDistribution::from_log_probs(std::move(lq));
}

GapRecord pacman_gap(const World& world, const Dataset& s, const SoftClassifier& h,
                     std::int64_t dataset_index, Eigen::Index hypothesis_id) {
  GapRecord rec;
  rec.dataset = s;
  rec.dataset_index = dataset_index;
  rec.hypothesis_id = hypothesis_id;
  rec.ce_s = empirical_ce(s, h);
  rec.tilde_ce = tilde_ce(world, h);
  rec.gap = rec.tilde_ce - rec.ce_s;
  // Independent route: per-pair likelihood ratio against the log-domain mass.
  const double lm = log_correct_mass(world, h);
  KahanSum sum;
  for (const auto& [x, y] : s.pairs) sum.add(h.log_prob(x, y) - lm);
  rec.log_ratio = sum.value() / static_cast<double>(s.n());
  return rec;
}

double confidence(const World& world, const SoftClassifier& h) {
  check_dims(world, h.x_size(), h.y_size());
  const HardClassifier hc = hard_decision(h);
  const Distribution px = world.joint.marginal_x();
  KahanSum sum;
  for (Eigen::Index x = 0; x < world.x_size(); ++x)
    sum.add(px.prob(x) * h.prob(x, hc.decisions[static_cast<std::size_t>(x)]));
  return sum.value();
}

double expected_calibration_error(const World& world, const SoftClassifier& h) {
  check_dims(world, h.x_size(), h.y_size());
  const HardClassifier hc = hard_decision(h);
  const Distribution px = world.joint.marginal_x();
  struct Group {
    double mass = 0.0;
    double correct_mass = 0.0;
  };
  std::map<double, Group> groups;  // keyed by exact confidence value
  for (Eigen::Index x = 0; x < world.x_size(); ++x) {
    const Eigen::Index d = hc.decisions[static_cast<std::size_t>(x)];
    Group& g = groups[h.prob(x, d)];
    g.mass += px.prob(x);
    g.correct_mass += world.joint.prob(x, d);
  }
  KahanSum ece;
  for (const auto& [conf, g] : groups) {
    if (g.mass <= 0.0) continue;
    ece.add(g.mass * std::abs(g.correct_mass / g.mass - conf));
  }
  return ece.value();
}

RiskSandwich hard_soft_bounds(const World& world, const SoftClassifier& h) {
  const HardClassifier hc = hard_decision(h);
  const double hard = hard_risk(world, hc);
  return {0.5 * hard, 1.0 - confidence(world, h) + hard};
}

}  // namespace pacman
