#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pacman/classifier.hpp"
#include "pacman/errors.hpp"
#include "pacman/info.hpp"

using namespace pacman;

namespace {

World uniform_world(Eigen::Index x, Eigen::Index y, int n) {
  return World(JointDistribution::from_weights(Eigen::MatrixXd::Constant(x, y, 1.0)), n);
}

// deterministic world: y = x
World diagonal_world(Eigen::Index k, int n) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) w(i, i) = 1.0;
  return World(JointDistribution::from_weights(w), n);
}

double naive_soft_risk(const World& world, const SoftClassifier& h) {
  long double sum = 0.0L;
  for (Eigen::Index x = 0; x < world.x_size(); ++x)
    for (Eigen::Index y = 0; y < world.y_size(); ++y)
      sum += static_cast<long double>(world.joint.prob(x, y)) * (1.0L - h.prob(x, y));
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("soft classifier construction: normalization, clamping, errors") {
  Eigen::MatrixXd rows(2, 2);
  rows << 2.0, 2.0, 1.0, 0.0;  // second row has a zero -> clamped, not -inf
  const SoftClassifier h = SoftClassifier::from_rows(rows);
  CHECK(h.prob(0, 0) == doctest::Approx(0.5));
  CHECK(h.prob(1, 1) > 0.0);
  CHECK(h.prob(1, 1) < 1e-11);
  CHECK(std::isfinite(h.log_prob(1, 1)));
  CHECK(h.rows().row(1).sum() == doctest::Approx(1.0).epsilon(1e-14));

  rows << 1.0, -1.0, 1.0, 1.0;
  CHECK_THROWS_AS(SoftClassifier::from_rows(rows), NegativeWeight);
  rows << 0.0, 0.0, 1.0, 1.0;
  CHECK_THROWS_AS(SoftClassifier::from_rows(rows), AllZeroWeights);
}

TEST_CASE("soft risk examples") {
  const World w = uniform_world(2, 4, 1);
  CHECK(soft_risk(w, SoftClassifier::uniform(2, 4)) == doctest::Approx(0.75));

  // near-perfect classifier on a deterministic world
  const World diag = diagonal_world(2, 1);
  Eigen::MatrixXd rows(2, 2);
  const double eps = 1e-6;
  rows << 1.0 - eps, eps, eps, 1.0 - eps;
  CHECK(soft_risk(diag, SoftClassifier::from_rows(rows)) == doctest::Approx(eps).epsilon(1e-6));

  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const World world = oracles::random_world(rng, 3, 3, 1, trial % 3 == 0);
    const SoftClassifier h = SoftClassifier::random(3, 3, rng);
    CHECK(soft_risk(world, h) == doctest::Approx(naive_soft_risk(world, h)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(soft_risk(uniform_world(2, 2, 1), SoftClassifier::uniform(3, 2)),
                  DimensionMismatch);
}

TEST_CASE("hard decisions: tie-break and bayes risk") {
  const SoftClassifier u = SoftClassifier::uniform(3, 4);
  const HardClassifier hc = hard_decision(u);
  for (const auto d : hc.decisions) CHECK(d == 0);  // lowest-index tie-break

  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const World world = oracles::random_world(rng, 3, 3, 1);
    // Bayes classifier built from the conditional rows
    const Channel cond = world.joint.conditional_y_given_x();
    const SoftClassifier bayes =
        SoftClassifier::from_rows(cond.log_rows().array().exp().matrix());
    const double risk = hard_risk(world, hard_decision(bayes));
    // oracle: 1 - E_x[max_y p(y|x)]
    long double correct = 0.0L;
    const Distribution px = world.joint.marginal_x();
    for (Eigen::Index x = 0; x < 3; ++x) {
      long double best = 0.0L;
      for (Eigen::Index y = 0; y < 3; ++y)
        best = std::max(best, static_cast<long double>(std::exp(cond.log_rows()(x, y))));
      correct += px.prob(x) * best;
    }
    CHECK(risk == doctest::Approx(static_cast<double>(1.0L - correct)).epsilon(1e-10));
  }
}

TEST_CASE("empirical risks") {
  const SoftClassifier u = SoftClassifier::uniform(2, 2);
  Dataset s;
  s.pairs = {{0, 0}, {1, 1}, {0, 1}};
  CHECK(empirical_ce(s, u) == doctest::Approx(std::log(2.0)));

  Eigen::MatrixXd rows(2, 2);
  rows << 0.9, 0.1, 0.2, 0.8;
  const SoftClassifier h = SoftClassifier::from_rows(rows);
  const HardClassifier hc = hard_decision(h);
  Dataset correct;
  correct.pairs = {{0, 0}, {1, 1}};
  CHECK(empirical_hard_risk(correct, hc) == 0.0);
  Dataset mixed;
  mixed.pairs = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(empirical_hard_risk(mixed, hc) == doctest::Approx(0.5));

  Dataset bad;
  bad.pairs = {{0, 5}};
  CHECK_THROWS_AS(empirical_ce(bad, u), IndexOutOfRange);

  // naive loop oracle on random datasets
  Rng rng(40);
  for (int trial = 0; trial < 30; ++trial) {
    const SoftClassifier hr = SoftClassifier::random(3, 3, rng);
    Dataset d;
    const int n = 1 + static_cast<int>(rng.next_u64() % 6);
    for (int i = 0; i < n; ++i)
      d.pairs.push_back({static_cast<Eigen::Index>(rng.next_u64() % 3),
                         static_cast<Eigen::Index>(rng.next_u64() % 3)});
    long double naive = 0.0L;
    for (const auto& [x, y] : d.pairs) naive += -std::log(static_cast<long double>(hr.prob(x, y)));
    naive /= n;
    CHECK(std::abs(empirical_ce(d, hr) - static_cast<double>(naive)) < 1e-12);
  }

  // n = 1 with h(x)_y = e^-2 at the sampled pair
  Eigen::MatrixXd r1(1, 2);
  const double p = std::exp(-2.0);
  r1 << p, 1.0 - p;
  Dataset one;
  one.pairs = {{0, 0}};
  CHECK(empirical_ce(one, SoftClassifier::from_rows(r1)) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("true cross-entropy: conditional-entropy optimum and decomposition") {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const World world = oracles::random_world(rng, 3, 3, 1);
    const Channel cond = world.joint.conditional_y_given_x();
    const SoftClassifier star =
        SoftClassifier::from_rows(cond.log_rows().array().exp().matrix());
    CHECK(true_ce(world, star) ==
          doctest::Approx(conditional_entropy(world.joint)).epsilon(1e-10));

    const SoftClassifier h = SoftClassifier::random(3, 3, rng);
    // CE_p(h) = H(y|x) + E_x[KL(p(y|x) || h(x))]
    KahanSum kl_term;
    const Distribution px = world.joint.marginal_x();
    for (Eigen::Index x = 0; x < 3; ++x) {
      const Distribution row = cond.row(x);
      const Distribution hx = Distribution::from_log_probs(h.log_rows().row(x).transpose());
      kl_term.add(px.prob(x) * kl_divergence(row, hx));
    }
    CHECK(std::abs(true_ce(world, h) -
                   (conditional_entropy(world.joint) + kl_term.value())) < 1e-10);
  }
  CHECK(true_ce(uniform_world(2, 3, 1), SoftClassifier::uniform(2, 3)) ==
        doctest::Approx(std::log(3.0)));
}

TEST_CASE("tilde cross-entropy is the bijection of soft risk") {
  const World w = uniform_world(2, 2, 1);
  CHECK(tilde_ce(w, SoftClassifier::uniform(2, 2)) == doctest::Approx(std::log(2.0)));
  Rng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const World world = oracles::random_world(rng, 2, 3, 1);
    const SoftClassifier h = SoftClassifier::random(2, 3, rng);
    const double t = tilde_ce(world, h);
    CHECK(std::abs((1.0 - std::exp(-t)) - soft_risk(world, h)) < 1e-12);
  }
  CHECK_THROWS_AS(detail::tilde_ce_from_log_mass(std::log(1e-301)), DegenerateRisk);
  CHECK(detail::tilde_ce_from_log_mass(std::log(1e-299)) ==
        doctest::Approx(-std::log(1e-299)));
}

TEST_CASE("tilted distribution") {
  const World w = uniform_world(2, 2, 1);
  const JointDistribution q = tilted_distribution(w, SoftClassifier::uniform(2, 2));
  for (Eigen::Index x = 0; x < 2; ++x)
    for (Eigen::Index y = 0; y < 2; ++y)
      CHECK(q.prob(x, y) == doctest::Approx(w.joint.prob(x, y)).epsilon(1e-13));

  Rng rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    const World world = oracles::random_world(rng, 3, 2, 1, trial % 4 == 0);
    const SoftClassifier h = SoftClassifier::random(3, 2, rng);
    const JointDistribution tilted = tilted_distribution(world, h);
    // normalization within 1e-12
    KahanSum mass;
    for (Eigen::Index x = 0; x < 3; ++x)
      for (Eigen::Index y = 0; y < 2; ++y) mass.add(tilted.prob(x, y));
    CHECK(std::abs(mass.value() - 1.0) < 1e-12);
    // brute-force Bayes-rule oracle elementwise
    const double denom = 1.0 - naive_soft_risk(world, h);
    for (Eigen::Index x = 0; x < 3; ++x)
      for (Eigen::Index y = 0; y < 2; ++y) {
        const double expect = h.prob(x, y) * world.joint.prob(x, y) / denom;
        CHECK(std::abs(tilted.prob(x, y) - expect) < 1e-12);
      }
    // absolute continuity: p zero implies q zero
    for (Eigen::Index x = 0; x < 3; ++x)
      for (Eigen::Index y = 0; y < 2; ++y)
        if (world.joint.prob(x, y) == 0.0) CHECK(tilted.prob(x, y) == 0.0);
  }
}

TEST_CASE("tilted distribution equals the data law iff the classifier is uniform") {
  Rng rng(46);
  for (int trial = 0; trial < 100; ++trial) {
    const World world = oracles::random_world(rng, 2, 3, 1);
    const SoftClassifier h = SoftClassifier::random(2, 3, rng);
    const JointDistribution q = tilted_distribution(world, h);
    double max_dev = 0.0;
    for (Eigen::Index x = 0; x < 2; ++x)
      for (Eigen::Index y = 0; y < 3; ++y)
        max_dev = std::max(max_dev, std::abs(q.prob(x, y) - world.joint.prob(x, y)));
    CHECK(max_dev > 0.0);  // non-uniform classifiers move the law
  }
}

TEST_CASE("gap record: two routes agree") {
  const World w = uniform_world(2, 2, 1);
  Dataset s;
  s.pairs = {{0, 1}, {1, 0}, {1, 1}};
  const GapRecord uniform_rec = pacman_gap(w, s, SoftClassifier::uniform(2, 2));
  CHECK(uniform_rec.gap == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(uniform_rec.log_ratio == doctest::Approx(0.0).epsilon(1e-14));

  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const World world = oracles::random_world(rng, 2, 2, 1, trial % 5 == 0);
    const SoftClassifier h = SoftClassifier::random(2, 2, rng);
    Dataset d;
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    for (int i = 0; i < n; ++i)
      d.pairs.push_back({static_cast<Eigen::Index>(rng.next_u64() % 2),
                         static_cast<Eigen::Index>(rng.next_u64() % 2)});
    const GapRecord rec = pacman_gap(world, d, h);
    CHECK(std::abs(rec.gap - rec.log_ratio) < 1e-10);
    CHECK(rec.gap == doctest::Approx(rec.tilde_ce - rec.ce_s).epsilon(1e-14));
  }

  // n = 1 hand formula: gap = log h(x)_y + tilde_ce
  const World world = uniform_world(2, 2, 1);
  Eigen::MatrixXd rows(2, 2);
  rows << 0.7, 0.3, 0.4, 0.6;
  const SoftClassifier h = SoftClassifier::from_rows(rows);
  Dataset one;
  one.pairs = {{1, 0}};
  const GapRecord rec = pacman_gap(world, one, h);
  CHECK(rec.gap ==
        doctest::Approx(std::log(0.4) + tilde_ce(world, h)).epsilon(1e-12));
}

TEST_CASE("confidence and calibration error") {
  // near-deterministic rows push confidence to 1
  Eigen::MatrixXd rows(2, 2);
  rows << 1.0 - 1e-9, 1e-9, 1e-9, 1.0 - 1e-9;
  const World w = uniform_world(2, 2, 1);
  CHECK(confidence(w, SoftClassifier::from_rows(rows)) == doctest::Approx(1.0).epsilon(1e-8));

  // perfectly calibrated classifier with singleton confidence groups
  Eigen::MatrixXd joint(2, 2);
  joint << 0.35, 0.15, 0.1, 0.4;  // p(y|x=0) = (0.7, 0.3), p(y|x=1) = (0.2, 0.8)
  const World cal_world(JointDistribution::from_weights(joint), 1);
  const Channel cond = cal_world.joint.conditional_y_given_x();
  const SoftClassifier calibrated =
      SoftClassifier::from_rows(cond.log_rows().array().exp().matrix());
  CHECK(expected_calibration_error(cal_world, calibrated) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // |1 - R* - c_h| <= ECE
  Rng rng(48);
  for (int trial = 0; trial < 100; ++trial) {
    const World world = oracles::random_world(rng, 3, 3, 1, trial % 4 == 0);
    const SoftClassifier h = SoftClassifier::random(3, 3, rng);
    const double c = confidence(world, h);
    const double hard = hard_risk(world, hard_decision(h));
    CHECK(std::abs(1.0 - hard - c) <= expected_calibration_error(world, h) + 1e-12);
  }
}

TEST_CASE("hard/soft risk sandwich") {
  // c_h -> 1 forces the two risks together
  Rng rng(49);
  {
    const World world = oracles::random_world(rng, 2, 2, 1);
    Eigen::MatrixXd rows(2, 2);
    rows << 1.0, 1e-12, 1e-12, 1.0;
    const SoftClassifier h = SoftClassifier::from_rows(rows);
    CHECK(std::abs(soft_risk(world, h) - hard_risk(world, hard_decision(h))) < 1e-9);
  }
  // uniform binary classifier on a deterministic world: tie-break hits y = 0
  {
    const World diag = diagonal_world(2, 1);
    const SoftClassifier u = SoftClassifier::uniform(2, 2);
    const double hard = hard_risk(diag, hard_decision(u));
    const double soft = soft_risk(diag, u);
    CHECK(hard == doctest::Approx(0.5));  // decision 0 everywhere, p(x=1)=0.5 misses
    CHECK(0.5 * hard <= soft + 1e-15);
  }
  // tie-break lands on the true label everywhere: R* = 0 while 2 R_p = 1
  {
    Eigen::MatrixXd w(2, 2);
    w << 0.5, 0.0, 0.5, 0.0;  // label always 0
    const World always_zero(JointDistribution::from_weights(w), 1);
    const SoftClassifier u = SoftClassifier::uniform(2, 2);
    CHECK(hard_risk(always_zero, hard_decision(u)) == doctest::Approx(0.0));
    CHECK(soft_risk(always_zero, u) == doctest::Approx(0.5));
  }
  // 200 random instances: sandwich and auxiliary inequalities hold exactly
  for (int trial = 0; trial < 200; ++trial) {
    const World world = oracles::random_world(rng, 3, 3, 1, trial % 5 == 0);
    const SoftClassifier h = SoftClassifier::random(3, 3, rng);
    const double soft = soft_risk(world, h);
    const double hard = hard_risk(world, hard_decision(h));
    const RiskSandwich sw = hard_soft_bounds(world, h);
    CHECK(sw.lower == doctest::Approx(0.5 * hard));
    CHECK(sw.lower <= soft + 1e-12);
    CHECK(soft <= sw.upper + 1e-12);
    CHECK(confidence(world, h) >= 1.0 - soft - 1e-12);  // c_h >= 1 - R_p
    CHECK(hard <= 2.0 * soft + 1e-12);                  // reverse-Markov step
  }
}
