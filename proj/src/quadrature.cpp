#include "vem/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace vem {

double QuadratureRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 times the squared first eigenvector components.
Rule1d golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                    double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = diag(i);
    if (i + 1 < n) {
      J(i, i + 1) = offdiag(i);
      J(i + 1, i) = offdiag(i);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1d rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

double legendre(int m, double x) {
  double p0 = 1.0, p1 = x;
  if (m == 0) return p0;
  for (int j = 1; j < m; ++j) {
    const double p2 = ((2 * j + 1) * x * p1 - j * p0) / (j + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

Rule1d gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre needs n >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k)
    off(k - 1) = std::sqrt(double(k * k) / (4.0 * k * k - 1.0));
  return golub_welsch(diag, off, 2.0);
}

Rule1d gauss_jacobi_10(int n) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi_10 needs n >= 1");
  // Jacobi(alpha=1, beta=0) on [-1,1] with weight (1-x), then mapped to
  // [0,1] where the weight becomes (1-u) up to the factor absorbed below.
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k)
    diag(k) = -1.0 / double((2 * k + 1) * (2 * k + 3));
  for (int k = 1; k < n; ++k)
    off(k - 1) = std::sqrt(double(k) * (k + 1.0)) / (2.0 * k + 1.0);
  Rule1d r = golub_welsch(diag, off, 2.0);
  for (int i = 0; i < n; ++i) {
    r.points[i] = 0.5 * (r.points[i] + 1.0);
    r.weights[i] *= 0.25;
  }
  return r;
}

Rule1d gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto needs n >= 2");
  Rule1d rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  const int m = n - 1;  // interior nodes are roots of P'_m
  rule.points[0] = -1.0;
  rule.points[n - 1] = 1.0;
  for (int i = 1; i < n - 1; ++i) {
    // Newton from the Chebyshev-Lobatto guess.
    double x = std::cos(M_PI * double(n - 1 - i) / m);
    for (int it = 0; it < 100; ++it) {
      const double pm = legendre(m, x);
      const double pm1 = legendre(m - 1, x);
      const double dp = m * (x * pm - pm1) / (x * x - 1.0);
      const double d2p = (2.0 * x * dp - m * (m + 1.0) * pm) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.points[i] = x;
  }
  for (int i = 0; i < n; ++i) {
    const double pm = legendre(m, rule.points[i]);
    rule.weights[i] = 2.0 / (m * (m + 1.0) * pm * pm);
  }
  return rule;
}

QuadratureRule triangle_rule(int d) {
  if (d < 0) throw std::invalid_argument("triangle_rule needs d >= 0");
  const int n = d / 2 + 1;
  const Rule1d gj = gauss_jacobi_10(n);
  Rule1d gl = gauss_legendre(n);
  for (int i = 0; i < n; ++i) {
    gl.points[i] = 0.5 * (gl.points[i] + 1.0);
    gl.weights[i] *= 0.5;
  }
  QuadratureRule rule;
  rule.degree = d;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = gj.points[i];
      const double v = gl.points[j];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(gj.weights[i] * gl.weights[j]);
    }
  }
  return rule;
}

QuadratureRule polygon_quadrature(const Polygon& loop, int d,
                                  const Point2& star_center) {
  const QuadratureRule ref = triangle_rule(d);
  QuadratureRule rule;
  rule.degree = d;
  const std::size_t n = loop.size();
  rule.points.reserve(n * ref.points.size());
  rule.weights.reserve(n * ref.points.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = loop[i];
    const Point2 b = loop[(i + 1) % n];
    const Point2 e1 = a - star_center;
    const Point2 e2 = b - star_center;
    const double jac = e1.cross(e2);  // 2 * triangle area, positive for CCW
    for (std::size_t q = 0; q < ref.points.size(); ++q) {
      const Point2& r = ref.points[q];
      rule.points.push_back(star_center + r.x * e1 + r.y * e2);
      rule.weights.push_back(ref.weights[q] * jac);
    }
  }
  return rule;
}

QuadratureRule polygon_quadrature(const Polygon& loop, int d) {
  const Polygon ker = polygon_kernel(loop);
  if (ker.empty())
    throw std::runtime_error(
        "polygon_quadrature: empty kernel (cell is not star-shaped)");
  return polygon_quadrature(loop, d, chebyshev_center(ker).center);
}

}  // namespace vem
