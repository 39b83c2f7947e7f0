// Finite-alphabet probability machinery: distributions, joints, conditional
// channels, datasets and their exact enumeration, and seeded sampling.
#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "pacman/errors.hpp"
#include "pacman/logsum.hpp"
#include "pacman/rng.hpp"

namespace pacman {

inline constexpr std::int64_t kDefaultEnumCap = 10'000'000;

// Probability vector stored as natural-log values; -inf entries are exact
// zeros. Mass must sum to 1 within 1e-12.
class Distribution {
 public:
  static Distribution from_weights(const Eigen::Ref<const Eigen::VectorXd>& weights);
  static Distribution from_log_probs(Eigen::VectorXd log_probs);
  static Distribution uniform(Eigen::Index size);
  static Distribution point_mass(Eigen::Index size, Eigen::Index at);

  Eigen::Index size() const { return log_probs_.size(); }
  double log_prob(Eigen::Index i) const { return log_probs_[i]; }
  double prob(Eigen::Index i) const { return std::exp(log_probs_[i]); }
  const Eigen::VectorXd& log_probs() const { return log_probs_; }
  Eigen::VectorXd probs() const { return log_probs_.array().exp().matrix(); }

 private:
  explicit Distribution(Eigen::VectorXd lp) : log_probs_(std::move(lp)) {}
  Eigen::VectorXd log_probs_;
};

// Conditional distribution table p(y|x): one valid Distribution per row.
class Channel {
 public:
  static Channel from_weights(const Eigen::Ref<const Eigen::MatrixXd>& weights);
  static Channel from_log_rows(Eigen::MatrixXd log_rows);

  Eigen::Index x_size() const { return log_rows_.rows(); }
  Eigen::Index y_size() const { return log_rows_.cols(); }
  const Eigen::MatrixXd& log_rows() const { return log_rows_; }
  Distribution row(Eigen::Index x) const;

 private:
  explicit Channel(Eigen::MatrixXd lr) : log_rows_(std::move(lr)) {}
  Eigen::MatrixXd log_rows_;
};

// Joint law on X x Y, log domain, total mass 1 within 1e-12.
class JointDistribution {
 public:
  static JointDistribution from_weights(const Eigen::Ref<const Eigen::MatrixXd>& weights);
  static JointDistribution from_log_probs(Eigen::MatrixXd log_probs);

  Eigen::Index x_size() const { return log_probs_.rows(); }
  Eigen::Index y_size() const { return log_probs_.cols(); }
  double log_prob(Eigen::Index x, Eigen::Index y) const { return log_probs_(x, y); }
  double prob(Eigen::Index x, Eigen::Index y) const { return std::exp(log_probs_(x, y)); }
  const Eigen::MatrixXd& log_probs() const { return log_probs_; }

  Distribution marginal_x() const;
  Distribution marginal_y() const;
  // Rows with zero marginal mass fall back to the uniform conditional.
  Channel conditional_y_given_x() const;
  // The joint flattened row-major into a Distribution over X*Y.
  Distribution flatten() const;

 private:
  explicit JointDistribution(Eigen::MatrixXd lp) : log_probs_(std::move(lp)) {}
  Eigen::MatrixXd log_probs_;
};

// Data-generating process: a joint on examples plus the sample size n.
struct World {
  JointDistribution joint;
  int n;

  World(JointDistribution j, int n_samples) : joint(std::move(j)), n(n_samples) {
    if (n < 1) throw Error("world sample size must be >= 1");
  }
  Eigen::Index x_size() const { return joint.x_size(); }
  Eigen::Index y_size() const { return joint.y_size(); }
};

// Ordered sample of n (x, y) index pairs.
struct Dataset {
  std::vector<std::array<Eigen::Index, 2>> pairs;

  int n() const { return static_cast<int>(pairs.size()); }
};

double log_dataset_prob(const World& world, const Dataset& s);

// Deterministic i.i.d. sample of n pairs from the world's joint.
Dataset sample_dataset(const World& world, int n, std::uint64_t seed);
Dataset sample_dataset(const World& world, int n, Rng& rng);

// Exact enumeration of all (|X|*|Y|)^n datasets in lexicographic order over
// flattened pair indices k = x*|Y| + y (first drawn sample most significant).
class DatasetSpace {
 public:
  DatasetSpace(const World& world, std::int64_t cap = kDefaultEnumCap);

  std::int64_t size() const { return size_; }
  int n() const { return n_; }
  Eigen::Index x_size() const { return x_size_; }
  Eigen::Index y_size() const { return y_size_; }

  Dataset dataset_at(std::int64_t index) const;
  std::int64_t index_of(const Dataset& s) const;

  // fn(index, dataset, log_p) for every dataset, lexicographic order.
  template <typename F>
  void for_each(F&& fn) const {
    Dataset s;
    s.pairs.assign(static_cast<std::size_t>(n_), {0, 0});
    std::vector<Eigen::Index> digits(static_cast<std::size_t>(n_), 0);
    const Eigen::Index k_count = x_size_ * y_size_;
    for (std::int64_t index = 0; index < size_; ++index) {
      double log_p = 0.0;
      for (int i = 0; i < n_; ++i) {
        const Eigen::Index k = digits[static_cast<std::size_t>(i)];
        s.pairs[static_cast<std::size_t>(i)] = {k / y_size_, k % y_size_};
        log_p += pair_log_probs_[k];
      }
      fn(index, s, log_p);
      for (int i = n_ - 1; i >= 0; --i) {
        auto& d = digits[static_cast<std::size_t>(i)];
        if (++d < k_count) break;
        d = 0;
      }
    }
  }

 private:
  Eigen::Index x_size_;
  Eigen::Index y_size_;
  int n_;
  std::int64_t size_;
  Eigen::VectorXd pair_log_probs_;  // flattened row-major joint
};

}  // namespace pacman
