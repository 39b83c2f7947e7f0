#include "pacman/prob.hpp"

#include <cmath>
#include <string>

namespace pacman {

namespace {

Eigen::VectorXd normalize_log_weights(const Eigen::Ref<const Eigen::VectorXd>& weights) {
  bool any_positive = false;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w))
      throw NonFiniteWeight("weight at index " + std::to_string(i) + " is not finite");
    if (w < 0.0)
      throw NegativeWeight("weight at index " + std::to_string(i) + " is negative");
    if (w > 0.0) any_positive = true;
  }
  if (!any_positive) throw AllZeroWeights();
  Eigen::VectorXd lp(weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    lp[i] = weights[i] > 0.0 ? std::log(weights[i]) : kNegInf;
  const double log_total = log_sum_exp(lp);
  for (Eigen::Index i = 0; i < lp.size(); ++i)
    if (lp[i] != kNegInf) lp[i] -= log_total;
  return lp;
}

void check_normalized(const Eigen::Ref<const Eigen::VectorXd>& log_probs, const char* what) {
  const double total = std::exp(log_sum_exp(log_probs));
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(std::string(what) + ": mass " + std::to_string(total) + " is not 1 within 1e-12");
}

}  // namespace

Distribution Distribution::from_weights(const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (weights.size() < 1) throw Error("distribution support must be nonempty");
  return Distribution(normalize_log_weights(weights));
}

Distribution Distribution::from_log_probs(Eigen::VectorXd log_probs) {
  if (log_probs.size() < 1) throw Error("distribution support must be nonempty");
  check_normalized(log_probs, "distribution");
  return Distribution(std::move(log_probs));
}

Distribution Distribution::uniform(Eigen::Index size) {
  if (size < 1) throw Error("distribution support must be nonempty");
  return Distribution(Eigen::VectorXd::Constant(size, -std::log(static_cast<double>(size))));
}

Distribution Distribution::point_mass(Eigen::Index size, Eigen::Index at) {
  if (size < 1) throw Error("distribution support must be nonempty");
  if (at < 0 || at >= size) throw IndexOutOfRange("point mass index out of range");
  Eigen::VectorXd lp = Eigen::VectorXd::Constant(size, kNegInf);
  lp[at] = 0.0;
  return Distribution(std::move(lp));
}

Channel Channel::from_weights(const Eigen::Ref<const Eigen::MatrixXd>& weights) {
  Eigen::MatrixXd lr(weights.rows(), weights.cols());
  for (Eigen::Index x = 0; x < weights.rows(); ++x)
    lr.row(x) = normalize_log_weights(weights.row(x).transpose()).transpose();
  return Channel(std::move(lr));
}

Channel Channel::from_log_rows(Eigen::MatrixXd log_rows) {
  for (Eigen::Index x = 0; x < log_rows.rows(); ++x)
    check_normalized(log_rows.row(x).transpose(), "channel row");
  return Channel(std::move(log_rows));
}

Distribution Channel::row(Eigen::Index x) const {
  if (x < 0 || x >= x_size()) throw IndexOutOfRange("channel row out of range");
  return Distribution::from_log_probs(log_rows_.row(x).transpose());
}

JointDistribution JointDistribution::from_weights(const Eigen::Ref<const Eigen::MatrixXd>& weights) {
  if (weights.size() < 1) throw Error("joint support must be nonempty");
  Eigen::Map<const Eigen::VectorXd> flat(weights.data(), weights.size());
  const Eigen::VectorXd lp = normalize_log_weights(flat);
  Eigen::MatrixXd m(weights.rows(), weights.cols());
  Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) = lp;
  return JointDistribution(std::move(m));
}

JointDistribution JointDistribution::from_log_probs(Eigen::MatrixXd log_probs) {
  if (log_probs.size() < 1) throw Error("joint support must be nonempty");
  check_normalized(Eigen::Map<const Eigen::VectorXd>(log_probs.data(), log_probs.size()), "joint");
  return JointDistribution(std::move(log_probs));
}

Distribution JointDistribution::marginal_x() const {
  Eigen::VectorXd lp(x_size());
  for (Eigen::Index x = 0; x < x_size(); ++x) lp[x] = log_sum_exp(log_probs_.row(x));
  return Distribution::from_log_probs(std::move(lp));
}

Distribution JointDistribution::marginal_y() const {
  Eigen::VectorXd lp(y_size());
  for (Eigen::Index y = 0; y < y_size(); ++y) lp[y] = log_sum_exp(log_probs_.col(y));
  return Distribution::from_log_probs(std::move(lp));
}

Channel JointDistribution::conditional_y_given_x() const {
  Eigen::MatrixXd lr(x_size(), y_size());
  const double log_uniform = -std::log(static_cast<double>(y_size()));
  for (Eigen::Index x = 0; x < x_size(); ++x) {
    const double lpx = log_sum_exp(log_probs_.row(x));
    if (lpx == kNegInf) {
      lr.row(x).setConstant(log_uniform);
      continue;
    }
    for (Eigen::Index y = 0; y < y_size(); ++y) {
      const double l = log_probs_(x, y);
      lr(x, y) = l == kNegInf ? kNegInf : l - lpx;
    }
  }
  return Channel::from_log_rows(std::move(lr));
}

Distribution JointDistribution::flatten() const {
  Eigen::VectorXd lp(log_probs_.size());
  Eigen::Index k = 0;
  for (Eigen::Index x = 0; x < x_size(); ++x)
    for (Eigen::Index y = 0; y < y_size(); ++y) lp[k++] = log_probs_(x, y);
  return Distribution::from_log_probs(std::move(lp));
}

double log_dataset_prob(const World& world, const Dataset& s) {
  double lp = 0.0;
  for (const auto& [x, y] : s.pairs) {
    if (x < 0 || x >= world.x_size() || y < 0 || y >= world.y_size())
      throw IndexOutOfRange("dataset pair index out of range");
    lp += world.joint.log_prob(x, y);
  }
  return lp;
}

Dataset sample_dataset(const World& world, int n, Rng& rng) {
  if (n < 1) throw Error("sample size must be >= 1");
  // Flattened pair probabilities, row-major, shared CDF for all draws.
  Eigen::VectorXd probs(world.x_size() * world.y_size());
  Eigen::Index k = 0;
  for (Eigen::Index x = 0; x < world.x_size(); ++x)
    for (Eigen::Index y = 0; y < world.y_size(); ++y) probs[k++] = world.joint.prob(x, y);
  Dataset s;
  s.pairs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Eigen::Index pair = rng.categorical(probs);
    s.pairs.push_back({pair / world.y_size(), pair % world.y_size()});
  }
  return s;
}

Dataset sample_dataset(const World& world, int n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_dataset(world, n, rng);
}

DatasetSpace::DatasetSpace(const World& world, std::int64_t cap)
    : x_size_(world.x_size()), y_size_(world.y_size()), n_(world.n) {
  if (cap < 1) throw Error("enumeration cap must be >= 1");
  const std::int64_t k_count = static_cast<std::int64_t>(x_size_ * y_size_);
  std::int64_t size = 1;
  for (int i = 0; i < n_; ++i) {
    if (size > cap / k_count)
      throw EnumerationCapExceeded("dataset space " + std::to_string(x_size_ * y_size_) + "^" +
                                   std::to_string(n_) + " exceeds cap " + std::to_string(cap));
    size *= k_count;
  }
  if (size > cap)
    throw EnumerationCapExceeded("dataset space exceeds cap " + std::to_string(cap));
  size_ = size;
  pair_log_probs_.resize(k_count);
  Eigen::Index k = 0;
  for (Eigen::Index x = 0; x < x_size_; ++x)
    for (Eigen::Index y = 0; y < y_size_; ++y) pair_log_probs_[k++] = world.joint.log_prob(x, y);
}

Dataset DatasetSpace::dataset_at(std::int64_t index) const {
  if (index < 0 || index >= size_) throw IndexOutOfRange("dataset index out of range");
  const std::int64_t k_count = static_cast<std::int64_t>(x_size_ * y_size_);
  Dataset s;
  s.pairs.assign(static_cast<std::size_t>(n_), {0, 0});
  for (int i = n_ - 1; i >= 0; --i) {
    const Eigen::Index k = static_cast<Eigen::Index>(index % k_count);
    s.pairs[static_cast<std::size_t>(i)] = {k / y_size_, k % y_size_};
    index /= k_count;
  }
  return s;
}

std::int64_t DatasetSpace::index_of(const Dataset& s) const {
  if (s.n() != n_) throw Error("dataset length does not match space");
  const std::int64_t k_count = static_cast<std::int64_t>(x_size_ * y_size_);
  std::int64_t index = 0;
  for (const auto& [x, y] : s.pairs) {
    if (x < 0 || x >= x_size_ || y < 0 || y >= y_size_)
      throw IndexOutOfRange("dataset pair index out of range");
    index = index * k_count + static_cast<std::int64_t>(x * y_size_ + y);
  }
  return index;
}

}  // namespace pacman
