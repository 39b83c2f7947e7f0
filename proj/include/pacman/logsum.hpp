// Log-domain arithmetic helpers. All probability mass in this library is
// carried as natural-log values, with -inf encoding exact zero mass.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>

namespace pacman {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Compensated (Kahan) accumulator. Used wherever a reduction feeds a
// tolerance tighter than plain summation guarantees at ~1e7 terms.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// logsumexp over any dense Eigen expression (vector, matrix, block, column).
// Empty or all -inf input yields -inf. Coefficients are visited column-major
// so the reduction order is fixed and reruns are bit-identical.
template <typename Derived>
double log_sum_exp(const Eigen::DenseBase<Derived>& expr) {
  const auto& x = expr.derived();
  double m = kNegInf;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (x(i, j) > m) m = x(i, j);
  if (m == kNegInf) return kNegInf;
  if (m == kInf) return kInf;
  KahanSum sum;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      sum.add(std::exp(x(i, j) - m));
  return m + std::log(sum.value());
}

}  // namespace pacman
