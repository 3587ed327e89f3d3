#include "vem/element.hpp"

#include <stdexcept>

namespace vem {

DofLayout make_dof_layout(ElementKind kind, int k, int n_edges) {
  if (k < 2) throw std::invalid_argument("unsupported degree: k must be >= 2");
  if (n_edges < 3) throw std::invalid_argument("cell needs >= 3 edges");
  DofLayout l;
  l.kind = kind;
  l.k = k;
  l.n_edges = n_edges;
  return l;
}

namespace {

// DoF index of the Gauss-Lobatto point q on local edge e (loop order):
// endpoints are vertex DoFs, interior points are edge DoFs.
int boundary_point_dof(const DofLayout& l, int e, int q, int comp) {
  if (q == 0) return l.vertex_dof(e, comp);
  if (q == l.k) return l.vertex_dof((e + 1) % l.n_edges, comp);
  return l.edge_dof(e, q - 1, comp);
}

// Stacked coefficients of nu * Laplacian(m_a e_c) over [P_{k-2}]^2.
Eigen::VectorXd scaled_vector_laplacian(const CellBasis& cb, int alpha,
                                        int comp, double nu) {
  const int np2 = poly_dim(cb.degree() - 2);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * np2);
  const MultiIndex a = monomial_exponents(cb.degree())[alpha];
  const double h2 = cb.diameter() * cb.diameter();
  if (a.ax >= 2)
    w(comp * np2 + monomial_index(a.ax - 2, a.ay)) +=
        nu * a.ax * (a.ax - 1) / h2;
  if (a.ay >= 2)
    w(comp * np2 + monomial_index(a.ax, a.ay - 2)) +=
        nu * a.ay * (a.ay - 1) / h2;
  return w;
}

void build_divfree(const CellBasis& cb, LocalElement& el) {
  const int k = cb.degree();
  const int npk = poly_dim(k);
  const int np1 = poly_dim(k - 1);
  const int np2 = poly_dim(k - 2);
  const DofLayout& l = el.layout;
  const int ndof = l.total();
  const auto& exps = monomial_exponents(k);
  const auto& edges = cb.edge_data();
  const double nu = el.nu;

  // --- D: DoFs of the vector monomial basis ---------------------------
  el.D = Eigen::MatrixXd::Zero(ndof, 2 * npk);
  for (int c = 0; c < 2; ++c) {
    for (int alpha = 0; alpha < npk; ++alpha) {
      const int col = c * npk + alpha;
      for (int v = 0; v < l.n_edges; ++v)
        el.D(l.vertex_dof(v, c), col) = cb.monomial(alpha, cb.polygon()[v]);
      for (int e = 0; e < l.n_edges; ++e)
        for (int j = 0; j < k - 1; ++j)
          el.D(l.edge_dof(e, j, c), col) =
              cb.monomial(alpha, edges[e].points[j + 1]);
      // Complement moments: mass-matrix pairings with the basis fields.
      for (int j = 0; j < l.n_gperp(); ++j) {
        double s = 0.0;
        for (int beta = 0; beta < np2; ++beta)
          s += cb.split().comp_basis(c * np2 + beta, j) * cb.mass()(beta, alpha);
        el.D(l.gperp_dof(j), col) = s;
      }
      // Divergence moments: div(m_a e_c) is a single scaled monomial.
      const MultiIndex a = exps[alpha];
      const int dx = (c == 0) ? a.ax : a.ay;
      if (dx > 0) {
        const int didx = (c == 0) ? monomial_index(a.ax - 1, a.ay)
                                  : monomial_index(a.ax, a.ay - 1);
        const Eigen::VectorXd dorth =
            cb.to_orthonormal(Eigen::VectorXd::Unit(np1, didx));
        for (int g = 0; g < l.n_div(); ++g)
          el.D(l.div_dof(g), col) += (dx / cb.diameter()) * dorth(g + 1);
      }
    }
  }

  // --- B: rows a^K(m_a e_c, .) via the split of nu*Laplacian ----------
  el.B = Eigen::MatrixXd::Zero(2 * npk, ndof);
  for (int c = 0; c < 2; ++c) {
    for (int alpha = 0; alpha < npk; ++alpha) {
      const int row = c * npk + alpha;
      const Eigen::VectorXd w = scaled_vector_laplacian(cb, alpha, c, nu);
      Eigen::VectorXd qk1, comp;
      cb.decompose_vector_poly(w, qk1, comp);
      const Eigen::VectorXd qk1_orth = cb.to_orthonormal(qk1);
      for (int g = 0; g < l.n_div(); ++g)
        el.B(row, l.div_dof(g)) += qk1_orth(g + 1);
      for (int j = 0; j < l.n_gperp(); ++j)
        el.B(row, l.gperp_dof(j)) -= comp(j);
      // Boundary: (nu grad(q) n - q_{k-1} n) . phi at Gauss-Lobatto points.
      for (int e = 0; e < l.n_edges; ++e) {
        const auto& ed = edges[e];
        for (int q = 0; q <= k; ++q) {
          const Point2& x = ed.points[q];
          const double gn = cb.monomial_gradient(alpha, x).dot(ed.normal);
          const double qv = cb.evaluate(qk1, x);
          const double tx = nu * gn * (c == 0 ? 1.0 : 0.0) - qv * ed.normal.x;
          const double ty = nu * gn * (c == 1 ? 1.0 : 0.0) - qv * ed.normal.y;
          el.B(row, boundary_point_dof(l, e, q, 0)) += ed.weights[q] * tx;
          el.B(row, boundary_point_dof(l, e, q, 1)) += ed.weights[q] * ty;
        }
      }
    }
  }

  // --- moments against [P_{k-2}]^2 (for Pi^0 and the load term) -------
  el.moments = Eigen::MatrixXd::Zero(2 * np2, ndof);
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j < np2; ++j) {
      const int row = c * np2 + j;
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(2 * np2);
      unit(c * np2 + j) = 1.0;
      Eigen::VectorXd qk1, comp;
      cb.decompose_vector_poly(unit, qk1, comp);
      const Eigen::VectorXd qk1_orth = cb.to_orthonormal(qk1);
      for (int g = 0; g < l.n_div(); ++g)
        el.moments(row, l.div_dof(g)) -= qk1_orth(g + 1);
      for (int jj = 0; jj < l.n_gperp(); ++jj)
        el.moments(row, l.gperp_dof(jj)) += comp(jj);
      for (int e = 0; e < l.n_edges; ++e) {
        const auto& ed = edges[e];
        for (int q = 0; q <= k; ++q) {
          const double qv = cb.evaluate(qk1, ed.points[q]);
          el.moments(row, boundary_point_dof(l, e, q, 0)) +=
              ed.weights[q] * qv * ed.normal.x;
          el.moments(row, boundary_point_dof(l, e, q, 1)) +=
              ed.weights[q] * qv * ed.normal.y;
        }
      }
    }
  }

  // --- divergence matrix ----------------------------------------------
  el.divmat = Eigen::MatrixXd::Zero(np1, ndof);
  const double mhat0 = cb.orthonormal_coeffs()(0, 0);
  for (int e = 0; e < l.n_edges; ++e) {
    const auto& ed = edges[e];
    for (int q = 0; q <= k; ++q) {
      el.divmat(0, boundary_point_dof(l, e, q, 0)) +=
          mhat0 * ed.weights[q] * ed.normal.x;
      el.divmat(0, boundary_point_dof(l, e, q, 1)) +=
          mhat0 * ed.weights[q] * ed.normal.y;
    }
  }
  for (int g = 0; g < l.n_div(); ++g) el.divmat(g + 1, l.div_dof(g)) = 1.0;
}

void build_classic(const CellBasis& cb, LocalElement& el) {
  const int k = cb.degree();
  const int npk = poly_dim(k);
  const int np1 = poly_dim(k - 1);
  const int np2 = poly_dim(k - 2);
  const DofLayout& l = el.layout;
  const int ndof = l.total();
  const double area = cb.area();
  const auto& edges = cb.edge_data();
  const double nu = el.nu;

  el.D = Eigen::MatrixXd::Zero(ndof, 2 * npk);
  for (int c = 0; c < 2; ++c) {
    for (int alpha = 0; alpha < npk; ++alpha) {
      const int col = c * npk + alpha;
      for (int v = 0; v < l.n_edges; ++v)
        el.D(l.vertex_dof(v, c), col) = cb.monomial(alpha, cb.polygon()[v]);
      for (int e = 0; e < l.n_edges; ++e)
        for (int j = 0; j < k - 1; ++j)
          el.D(l.edge_dof(e, j, c), col) =
              cb.monomial(alpha, edges[e].points[j + 1]);
      for (int j = 0; j < np2; ++j)
        el.D(l.moment_dof(c, j), col) = cb.mass()(j, alpha) / area;
    }
  }

  el.B = Eigen::MatrixXd::Zero(2 * npk, ndof);
  for (int c = 0; c < 2; ++c) {
    for (int alpha = 0; alpha < npk; ++alpha) {
      const int row = c * npk + alpha;
      const Eigen::VectorXd w = scaled_vector_laplacian(cb, alpha, c, nu);
      for (int d = 0; d < 2; ++d)
        for (int j = 0; j < np2; ++j)
          el.B(row, l.moment_dof(d, j)) -= w(d * np2 + j) * area;
      for (int e = 0; e < l.n_edges; ++e) {
        const auto& ed = edges[e];
        for (int q = 0; q <= k; ++q) {
          const double gn =
              cb.monomial_gradient(alpha, ed.points[q]).dot(ed.normal);
          el.B(row, boundary_point_dof(l, e, q, c)) += ed.weights[q] * nu * gn;
        }
      }
    }
  }

  el.moments = Eigen::MatrixXd::Zero(2 * np2, ndof);
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < np2; ++j)
      el.moments(c * np2 + j, l.moment_dof(c, j)) = area;

  // b^K by parts: div v against mhat_g needs grad(mhat_g) in [P_{k-2}]^2.
  el.divmat = Eigen::MatrixXd::Zero(np1, ndof);
  const auto& e1 = monomial_exponents(k - 1);
  for (int g = 0; g < np1; ++g) {
    for (int delta = 0; delta < np1; ++delta) {
      const double cgd = cb.orthonormal_coeffs()(g, delta);
      if (cgd == 0.0) continue;
      const MultiIndex a = e1[delta];
      if (a.ax > 0)
        el.divmat(g, l.moment_dof(0, monomial_index(a.ax - 1, a.ay))) -=
            cgd * a.ax / cb.diameter() * area;
      if (a.ay > 0)
        el.divmat(g, l.moment_dof(1, monomial_index(a.ax, a.ay - 1))) -=
            cgd * a.ay / cb.diameter() * area;
    }
    for (int e = 0; e < l.n_edges; ++e) {
      const auto& ed = edges[e];
      for (int q = 0; q <= k; ++q) {
        double mg = 0.0;
        for (int delta = 0; delta < np1; ++delta)
          mg += cb.orthonormal_coeffs()(g, delta) *
                cb.monomial(delta, ed.points[q]);
        el.divmat(g, boundary_point_dof(l, e, q, 0)) +=
            ed.weights[q] * mg * ed.normal.x;
        el.divmat(g, boundary_point_dof(l, e, q, 1)) +=
            ed.weights[q] * mg * ed.normal.y;
      }
    }
  }
}

}  // namespace

LocalElement build_local_element(const CellBasis& cb, ElementKind kind,
                                 double nu) {
  LocalElement el;
  el.kind = kind;
  el.k = cb.degree();
  el.nu = nu;
  el.layout =
      make_dof_layout(kind, cb.degree(), static_cast<int>(cb.polygon().size()));
  const int k = cb.degree();
  const int npk = poly_dim(k);
  const int np2 = poly_dim(k - 2);
  const auto& exps = monomial_exponents(k);

  // Polynomial stiffness G: block-diagonal in the two components.
  Eigen::MatrixXd Gs = Eigen::MatrixXd::Zero(npk, npk);
  const double h2 = cb.diameter() * cb.diameter();
  for (int i = 0; i < npk; ++i) {
    for (int j = 0; j < npk; ++j) {
      const MultiIndex a = exps[i], b = exps[j];
      double s = 0.0;
      if (a.ax > 0 && b.ax > 0)
        s += a.ax * b.ax *
             cb.mass()(monomial_index(a.ax - 1, a.ay),
                       monomial_index(b.ax - 1, b.ay));
      if (a.ay > 0 && b.ay > 0)
        s += a.ay * b.ay *
             cb.mass()(monomial_index(a.ax, a.ay - 1),
                       monomial_index(b.ax, b.ay - 1));
      Gs(i, j) = nu * s / h2;
    }
  }
  el.G = Eigen::MatrixXd::Zero(2 * npk, 2 * npk);
  el.G.topLeftCorner(npk, npk) = Gs;
  el.G.bottomRightCorner(npk, npk) = Gs;

  if (kind == ElementKind::DivFree)
    build_divfree(cb, el);
  else
    build_classic(cb, el);

  // Energy projector: replace the two constant-test rows (identically
  // zero in G and B) by the mean-value constraint P^0(v - proj v) = 0.
  Eigen::MatrixXd Gt = el.G;
  Eigen::MatrixXd Bt = el.B;
  for (int c = 0; c < 2; ++c) {
    const int row = c * npk;
    Gt.row(row).setZero();
    for (int beta = 0; beta < npk; ++beta)
      Gt(row, c * npk + beta) = cb.monomial_integral(beta) / cb.area();
    Bt.row(row) = el.moments.row(c * np2) / cb.area();
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Gt);
  el.proj = lu.solve(Bt);

  const int ndof = el.layout.total();
  const Eigen::MatrixXd R =
      Eigen::MatrixXd::Identity(ndof, ndof) - el.D * el.proj;
  el.stiffness =
      el.proj.transpose() * el.G * el.proj + nu * R.transpose() * R;

  // Pi^0_{k-2} coefficients of the canonical functions.
  const Eigen::MatrixXd H2 = cb.mass_matrix(k - 2);
  Eigen::LDLT<Eigen::MatrixXd> h2solve(H2);
  el.pi0.resize(2 * np2, ndof);
  el.pi0.topRows(np2) = h2solve.solve(el.moments.topRows(np2));
  el.pi0.bottomRows(np2) = h2solve.solve(el.moments.bottomRows(np2));
  return el;
}

Eigen::VectorXd LocalElement::load(const CellBasis& cb,
                                   const VectorField& f) const {
  const int np2 = poly_dim(k - 2);
  Eigen::VectorXd fmom = Eigen::VectorXd::Zero(2 * np2);
  const auto& quad = cb.quad();
  for (int q = 0; q < quad.size(); ++q) {
    const Point2 fv = f(quad.points[q]);
    for (int j = 0; j < np2; ++j) {
      const double m = cb.monomial(j, quad.points[q]) * quad.weights[q];
      fmom(j) += m * fv.x;
      fmom(np2 + j) += m * fv.y;
    }
  }
  return pi0.transpose() * fmom;
}

Eigen::VectorXd polynomial_dofs(const LocalElement& el,
                                const Eigen::VectorXd& stacked_coeffs) {
  return el.D * stacked_coeffs;
}

Eigen::VectorXd interpolate_velocity_dofs(const CellBasis& cb,
                                          ElementKind kind,
                                          const VectorField& u) {
  const int k = cb.degree();
  const DofLayout l =
      make_dof_layout(kind, k, static_cast<int>(cb.polygon().size()));
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(l.total());
  const auto& edges = cb.edge_data();
  for (int v = 0; v < l.n_edges; ++v) {
    const Point2 uv = u(cb.polygon()[v]);
    dofs(l.vertex_dof(v, 0)) = uv.x;
    dofs(l.vertex_dof(v, 1)) = uv.y;
  }
  for (int e = 0; e < l.n_edges; ++e) {
    for (int j = 0; j < k - 1; ++j) {
      const Point2 ue = u(edges[e].points[j + 1]);
      dofs(l.edge_dof(e, j, 0)) = ue.x;
      dofs(l.edge_dof(e, j, 1)) = ue.y;
    }
  }

  // Interior moments with a quadrature richer than the analytic fields
  // require; exact whenever u is a polynomial of moderate degree.
  const QuadratureRule rich = polygon_quadrature(
      cb.polygon(), std::max(2 * k + 2, 15), cb.star_center());
  const int np1 = poly_dim(k - 1);
  const int np2 = poly_dim(k - 2);

  if (kind == ElementKind::Classic) {
    for (int q = 0; q < rich.size(); ++q) {
      const Point2 uv = u(rich.points[q]);
      for (int j = 0; j < np2; ++j) {
        const double m = cb.monomial(j, rich.points[q]) * rich.weights[q];
        dofs(l.moment_dof(0, j)) += m * uv.x / cb.area();
        dofs(l.moment_dof(1, j)) += m * uv.y / cb.area();
      }
    }
    return dofs;
  }

  // D_V3: moments against the complement basis fields.
  for (int q = 0; q < rich.size(); ++q) {
    const Point2 uv = u(rich.points[q]);
    for (int j = 0; j < l.n_gperp(); ++j) {
      double gx = 0.0, gy = 0.0;
      for (int beta = 0; beta < np2; ++beta) {
        const double m = cb.monomial(beta, rich.points[q]);
        gx += cb.split().comp_basis(beta, j) * m;
        gy += cb.split().comp_basis(np2 + beta, j) * m;
      }
      dofs(l.gperp_dof(j)) += rich.weights[q] * (gx * uv.x + gy * uv.y);
    }
  }

  // D_V4 by parts: int div(u) mhat = boundary flux - int u . grad(mhat).
  const Rule1d gl = gauss_legendre(k + 6);
  for (int g = 0; g < l.n_div(); ++g) {
    double val = 0.0;
    for (const auto& ed : edges) {
      const Point2 a = ed.points.front();
      const Point2 b = ed.points.back();
      for (std::size_t q = 0; q < gl.points.size(); ++q) {
        const double s = 0.5 * (gl.points[q] + 1.0);
        const Point2 x = a + s * (b - a);
        double mhat = 0.0;
        for (int delta = 0; delta < np1; ++delta)
          mhat += cb.orthonormal_coeffs()(g + 1, delta) * cb.monomial(delta, x);
        val += 0.5 * ed.length * gl.weights[q] * mhat * u(x).dot(ed.normal);
      }
    }
    for (int q = 0; q < rich.size(); ++q) {
      Point2 gm{0.0, 0.0};
      for (int delta = 0; delta < np1; ++delta) {
        const Point2 gd = cb.monomial_gradient(delta, rich.points[q]);
        const double cgd = cb.orthonormal_coeffs()(g + 1, delta);
        gm.x += cgd * gd.x;
        gm.y += cgd * gd.y;
      }
      val -= rich.weights[q] * u(rich.points[q]).dot(gm);
    }
    dofs(l.div_dof(g)) = val;
  }
  return dofs;
}

Eigen::VectorXd interpolate_pressure_coeffs(const CellBasis& cb,
                                            const ScalarField& p) {
  const int k = cb.degree();
  const int np1 = poly_dim(k - 1);
  const QuadratureRule rich = polygon_quadrature(
      cb.polygon(), std::max(2 * k + 2, 15), cb.star_center());
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(np1);
  for (int q = 0; q < rich.size(); ++q) {
    const double pv = p(rich.points[q]) * rich.weights[q];
    for (int j = 0; j < np1; ++j)
      mom(j) += pv * cb.monomial(j, rich.points[q]);
  }
  return cb.orthonormal_coeffs() * mom;
}

}  // namespace vem
