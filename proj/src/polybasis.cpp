#include "vem/polybasis.hpp"

#include <cmath>
#include <stdexcept>

namespace vem {

const std::vector<MultiIndex>& monomial_exponents(int s) {
  static const int kMaxDegree = 40;
  static const std::vector<MultiIndex> table = [] {
    std::vector<MultiIndex> t;
    t.reserve(poly_dim(kMaxDegree));
    for (int d = 0; d <= kMaxDegree; ++d)
      for (int ay = 0; ay <= d; ++ay) t.push_back({d - ay, ay});
    return t;
  }();
  if (s > kMaxDegree)
    throw std::invalid_argument("monomial degree beyond supported table");
  return table;
}

CellBasis::CellBasis(const PolyMesh& mesh, int cell, int k, ComplementMode mode)
    : CellBasis(mesh.cell_polygon(cell), k, mode) {}

CellBasis::CellBasis(Polygon polygon, int k, ComplementMode mode)
    : k_(k), polygon_(std::move(polygon)) {
  if (k < 2) throw std::invalid_argument("unsupported degree: k must be >= 2");
  split_.mode = mode;
  build();
}

void CellBasis::build() {
  area_ = signed_area(polygon_);
  if (area_ <= 0.0)
    throw std::invalid_argument("cell polygon must be CCW with positive area");
  centroid_ = polygon_centroid(polygon_);
  h_ = polygon_diameter(polygon_);

  const Polygon ker = polygon_kernel(polygon_);
  if (ker.empty())
    throw std::runtime_error("cell is not star-shaped: empty kernel");
  star_center_ = chebyshev_center(ker).center;
  quad_ = polygon_quadrature(polygon_, 2 * k_ + 2, star_center_);

  // Monomial values at quadrature points, by recurrence over the degree.
  const int npk = poly_dim(k_);
  const auto& exps = monomial_exponents(k_);
  const int nq = quad_.size();
  values_.resize(nq, npk);
  for (int q = 0; q < nq; ++q) {
    const double xi = (quad_.points[q].x - centroid_.x) / h_;
    const double eta = (quad_.points[q].y - centroid_.y) / h_;
    values_(q, 0) = 1.0;
    for (int idx = 1; idx < npk; ++idx) {
      const MultiIndex a = exps[idx];
      if (a.ax > 0)
        values_(q, idx) = values_(q, monomial_index(a.ax - 1, a.ay)) * xi;
      else
        values_(q, idx) = values_(q, monomial_index(0, a.ay - 1)) * eta;
    }
  }

  mass_.resize(npk, npk);
  for (int i = 0; i < npk; ++i) {
    for (int j = i; j < npk; ++j) {
      double s = 0.0;
      for (int q = 0; q < nq; ++q)
        s += quad_.weights[q] * values_(q, i) * values_(q, j);
      mass_(i, j) = s;
      mass_(j, i) = s;
    }
  }

  // Orthonormal basis of P_{k-1}(K): with H = L L^T, the rows of L^{-1}
  // give an L^2-orthonormal set whose first member is the constant.
  const int npk1 = poly_dim(k_ - 1);
  const Eigen::MatrixXd Hk1 = mass_.topLeftCorner(npk1, npk1);
  Eigen::LLT<Eigen::MatrixXd> llt(Hk1);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("mass matrix not SPD (degenerate cell)");
  const Eigen::MatrixXd L = llt.matrixL();
  ortho_ = L.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(npk1, npk1));
  ortho_lt_ = L.transpose();

  // Splitting of [P_{k-2}]^2. Stacked coordinates: x-block then y-block.
  const int npk2 = poly_dim(k_ - 2);
  const int ngrad = npk1 - 1;
  const int ncomp = (k_ - 1) * (k_ - 2) / 2;
  split_.grad_basis = Eigen::MatrixXd::Zero(2 * npk2, ngrad);
  const auto& e1 = monomial_exponents(k_ - 1);
  for (int j = 1; j < npk1; ++j) {
    const MultiIndex a = e1[j];
    if (a.ax > 0)
      split_.grad_basis(monomial_index(a.ax - 1, a.ay), j - 1) = a.ax / h_;
    if (a.ay > 0)
      split_.grad_basis(npk2 + monomial_index(a.ax, a.ay - 1), j - 1) =
          a.ay / h_;
  }
  split_.comp_basis = Eigen::MatrixXd::Zero(2 * npk2, ncomp);
  if (ncomp > 0) {
    if (split_.mode == ComplementMode::Rotational) {
      // (m_{01} m_b, -m_{10} m_b) for |b| <= k-3; spans xperp P_{k-3}.
      const auto& e3 = monomial_exponents(k_ - 3);
      for (int j = 0; j < ncomp; ++j) {
        const MultiIndex b = e3[j];
        split_.comp_basis(monomial_index(b.ax, b.ay + 1), j) = 1.0;
        split_.comp_basis(npk2 + monomial_index(b.ax + 1, b.ay), j) = -1.0;
      }
    } else {
      // Project the gradients out of the full vector-monomial set in the
      // L^2 inner product, keep a well-conditioned independent subset.
      const Eigen::MatrixXd H2 = mass_.topLeftCorner(npk2, npk2);
      Eigen::MatrixXd M2 = Eigen::MatrixXd::Zero(2 * npk2, 2 * npk2);
      M2.topLeftCorner(npk2, npk2) = H2;
      M2.bottomRightCorner(npk2, npk2) = H2;
      const Eigen::MatrixXd& G = split_.grad_basis;
      const Eigen::MatrixXd Gram = G.transpose() * M2 * G;
      Eigen::MatrixXd cand = Eigen::MatrixXd::Identity(2 * npk2, 2 * npk2);
      cand -= G * Gram.ldlt().solve(G.transpose() * M2);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cand);
      Eigen::MatrixXd sel(2 * npk2, ncomp);
      for (int j = 0; j < ncomp; ++j)
        sel.col(j) = cand.col(qr.colsPermutation().indices()(j));
      // Orthonormalize in the L^2 metric.
      const Eigen::MatrixXd gram_sel = sel.transpose() * M2 * sel;
      const Eigen::MatrixXd Ls = gram_sel.llt().matrixL();
      split_.comp_basis =
          Ls.triangularView<Eigen::Lower>()
              .solve(sel.transpose())
              .transpose();
    }
    Eigen::MatrixXd full(2 * npk2, ngrad + ncomp);
    full << split_.grad_basis, split_.comp_basis;
    split_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(full);
  } else {
    split_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(split_.grad_basis);
  }

  // Boundary Gauss-Lobatto data, k+1 points per edge.
  const Rule1d gll = gauss_lobatto(k_ + 1);
  const std::size_t ne = polygon_.size();
  edges_.resize(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    const Point2 a = polygon_[i];
    const Point2 b = polygon_[(i + 1) % ne];
    EdgeData& ed = edges_[i];
    ed.length = (b - a).norm();
    const Point2 t = b - a;
    ed.normal = {t.y / ed.length, -t.x / ed.length};
    ed.points.resize(k_ + 1);
    ed.weights.resize(k_ + 1);
    for (int q = 0; q <= k_; ++q) {
      const double s = 0.5 * (gll.points[q] + 1.0);
      ed.points[q] = a + s * (b - a);
      ed.weights[q] = 0.5 * ed.length * gll.weights[q];
    }
  }
}

double CellBasis::monomial(int idx, const Point2& p) const {
  const MultiIndex a = monomial_exponents(k_)[idx];
  const double xi = (p.x - centroid_.x) / h_;
  const double eta = (p.y - centroid_.y) / h_;
  return std::pow(xi, a.ax) * std::pow(eta, a.ay);
}

Point2 CellBasis::monomial_gradient(int idx, const Point2& p) const {
  const MultiIndex a = monomial_exponents(k_)[idx];
  const double xi = (p.x - centroid_.x) / h_;
  const double eta = (p.y - centroid_.y) / h_;
  Point2 g{0.0, 0.0};
  if (a.ax > 0)
    g.x = a.ax * std::pow(xi, a.ax - 1) * std::pow(eta, a.ay) / h_;
  if (a.ay > 0)
    g.y = a.ay * std::pow(xi, a.ax) * std::pow(eta, a.ay - 1) / h_;
  return g;
}

double CellBasis::evaluate(const Eigen::VectorXd& coeffs,
                           const Point2& p) const {
  double s = 0.0;
  for (int i = 0; i < coeffs.size(); ++i) s += coeffs(i) * monomial(i, p);
  return s;
}

Eigen::MatrixXd CellBasis::mass_matrix(int s) const {
  const int n = poly_dim(s);
  return mass_.topLeftCorner(n, n);
}

Eigen::VectorXd CellBasis::to_orthonormal(const Eigen::VectorXd& mono) const {
  return ortho_lt_ * mono;
}

void CellBasis::decompose_vector_poly(const Eigen::VectorXd& stacked,
                                      Eigen::VectorXd& q_km1,
                                      Eigen::VectorXd& comp) const {
  const int npk2 = poly_dim(k_ - 2);
  const int npk1 = poly_dim(k_ - 1);
  const int ncomp = (k_ - 1) * (k_ - 2) / 2;
  if (stacked.size() != 2 * npk2)
    throw std::invalid_argument("decompose_vector_poly: wrong size");
  const Eigen::VectorXd sol = split_lu_.solve(stacked);
  q_km1 = Eigen::VectorXd::Zero(npk1);
  for (int j = 1; j < npk1; ++j) q_km1(j) = sol(j - 1);
  // Fix the P_{k-1}/R representative to zero mean.
  double mean = 0.0;
  for (int j = 1; j < npk1; ++j) mean += q_km1(j) * monomial_integral(j);
  q_km1(0) = -mean / area_;
  comp = sol.tail(ncomp);
}

Eigen::VectorXd CellBasis::l2_project(const std::function<double(Point2)>& f,
                                      int s) const {
  const int n = poly_dim(s);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int q = 0; q < quad_.size(); ++q) {
    const double fw = quad_.weights[q] * f(quad_.points[q]);
    for (int i = 0; i < n; ++i) b(i) += fw * values_(q, i);
  }
  return mass_matrix(s).ldlt().solve(b);
}

}  // namespace vem
