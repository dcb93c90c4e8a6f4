#include "shelving/expdiff.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace shelving {

Complex phi1(Complex z) {
  if (std::abs(z) < 0.4) {
    // 1 + z/2! + z^2/3! + ...; |z| < 0.4 converges below 1e-17 in 16 terms.
    Complex term(1.0, 0.0);
    Complex sum(1.0, 0.0);
    for (int n = 2; n <= 18; ++n) {
      term *= z / double(n);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

Complex exp_divided_difference(Complex x, Complex y, double t) {
  if (t == 0.0) return 0.0;
  // Factor out the node with the larger real part so the remainder is bounded.
  if (x.real() < y.real()) std::swap(x, y);
  return std::exp(x * t) * t * phi1((y - x) * t);
}

namespace {

// Nodes all within ~1/t of each other: exponentiate the bidiagonal matrix
// whose (0,2) entry is the divided difference, after shifting by the centroid.
Complex clustered_second_difference(Complex x, Complex y, Complex z, double t) {
  const Complex center = (x + y + z) / 3.0;
  Eigen::Matrix3cd b = Eigen::Matrix3cd::Zero();
  b(0, 0) = (x - center) * t;
  b(1, 1) = (y - center) * t;
  b(2, 2) = (z - center) * t;
  b(0, 1) = 1.0;
  b(1, 2) = 1.0;
  const Eigen::Matrix3cd e = b.exp();
  return std::exp(center * t) * e(0, 2) * t * t;
}

}  // namespace

Complex exp_divided_difference(Complex x, Complex y, Complex z, double t) {
  if (t == 0.0) return 0.0;
  std::array<Complex, 3> p{x, y, z};
  // Put the most separated pair at the ends so the outer division is by the
  // largest gap.
  const double d01 = std::abs(p[0] - p[1]);
  const double d02 = std::abs(p[0] - p[2]);
  const double d12 = std::abs(p[1] - p[2]);
  if (d01 >= d02 && d01 >= d12) std::swap(p[1], p[2]);
  else if (d12 >= d01 && d12 >= d02) std::swap(p[0], p[1]);
  const double spread = std::abs(p[0] - p[2]) * t;
  if (spread < 1.0) return clustered_second_difference(p[0], p[1], p[2], t);
  return (exp_divided_difference(p[0], p[1], t) -
          exp_divided_difference(p[1], p[2], t)) /
         (p[0] - p[2]);
}

}  // namespace shelving
