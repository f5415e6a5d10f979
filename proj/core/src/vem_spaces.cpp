#include "thermovem/vem_spaces.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace thermovem {

namespace {

// Gauss data on one local edge together with the Lagrange basis of its
// k + 1 nodes (start vertex, interior points, end vertex).
struct EdgeData {
  std::vector<Point> points;
  std::vector<double> weights;  // include the edge length
  Point normal;
  std::vector<int> nodes;       // local boundary node indices, k + 1 of them
  Eigen::MatrixXd lagrange;     // (#points) x (k + 1)
};

std::vector<EdgeData> edge_data(const ElementGeometry& geometry, int k) {
  const int n = geometry.num_vertices();
  std::vector<double> t_nodes{0.0};
  for (double t : edge_point_parameters(k)) t_nodes.push_back(t);
  t_nodes.push_back(1.0);
  const LineRule gauss = gauss_legendre(k + 2);

  std::vector<EdgeData> edges(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    EdgeData& e = edges[static_cast<std::size_t>(i)];
    const Point& a = geometry.vertex(i);
    const Point& b = geometry.vertex(i + 1);
    const double length = geometry.edge_lengths[static_cast<std::size_t>(i)];
    e.normal = geometry.edge_normals[static_cast<std::size_t>(i)];
    e.nodes.push_back(i);
    for (int j = 0; j < k - 1; ++j) e.nodes.push_back(n + (k - 1) * i + j);
    e.nodes.push_back((i + 1) % n);
    e.lagrange.resize(static_cast<Eigen::Index>(gauss.nodes.size()), k + 1);
    for (std::size_t q = 0; q < gauss.nodes.size(); ++q) {
      const double t = gauss.nodes[q];
      e.points.push_back(a + t * (b - a));
      e.weights.push_back(gauss.weights[q] * length);
      for (int j = 0; j <= k; ++j) {
        double l = 1.0;
        for (int m = 0; m <= k; ++m) {
          if (m != j) l *= (t - t_nodes[static_cast<std::size_t>(m)]) / (t_nodes[static_cast<std::size_t>(j)] - t_nodes[static_cast<std::size_t>(m)]);
        }
        e.lagrange(static_cast<Eigen::Index>(q), j) = l;
      }
    }
  }
  return edges;
}

Eigen::MatrixXd checked_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& rhs, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw ElementError(std::string("singular local system: ") + what);
  return lu.solve(rhs);
}

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& rhs, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw ElementError(std::string("mass matrix not positive definite: ") + what);
  return llt.solve(rhs);
}

// P maps DoFs to polynomials and satisfies P D = T exactly in exact arithmetic.
// On thin cells the mass solves amplify rounding in P D; routing the defect
// through Pi_nabla, which reproduces P_k to rounding, removes it without
// changing P mathematically.
void remove_reproduction_defect(Eigen::MatrixXd& p, const Eigen::MatrixXd& target, const Eigen::MatrixXd& dofs,
                                const Eigen::MatrixXd& pi_nabla) {
  const Eigen::MatrixXd defect = p * dofs - target;
  p -= defect * pi_nabla;
}

// G(0, b) = boundary integral of m_b; G(a, b) = int grad m_a . grad m_b for a >= 1.
Eigen::MatrixXd h1_matrix(const MonomialBasis& basis, const Eigen::MatrixXd& mass, const std::vector<EdgeData>& edges) {
  const Eigen::MatrixXd dx = basis.derivative_matrix(0);
  const Eigen::MatrixXd dy = basis.derivative_matrix(1);
  Eigen::MatrixXd g = dx.transpose() * mass * dx + dy.transpose() * mass * dy;
  g.row(0).setZero();
  for (const auto& e : edges) {
    for (std::size_t q = 0; q < e.points.size(); ++q) g.row(0) += e.weights[q] * basis.values(e.points[q]).transpose();
  }
  return g;
}

}  // namespace

std::vector<double> edge_point_parameters(int k) {
  if (k < 1) throw std::invalid_argument("edge_point_parameters: k must be >= 1");
  const LineRule gll = gauss_lobatto(k + 1);
  return {gll.nodes.begin() + 1, gll.nodes.end() - 1};
}

std::vector<Point> boundary_nodes(const ElementGeometry& geometry, int k) {
  std::vector<Point> nodes(geometry.vertices);
  const auto params = edge_point_parameters(k);
  for (int i = 0; i < geometry.num_vertices(); ++i) {
    for (double t : params) nodes.push_back(geometry.vertex(i) + t * (geometry.vertex(i + 1) - geometry.vertex(i)));
  }
  return nodes;
}

int element_quadrature_order(int k) { return std::max(2 * k + 2, 3 * k); }

double eval_poly(const MonomialBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x) {
  return basis.values(x).head(coeffs.size()).dot(coeffs);
}

TemperatureProjectors temp_projectors(const ElementGeometry& geometry, const QuadratureRule& quadrature, int k) {
  if (k < 2) throw std::invalid_argument("temperature space needs k >= 2");
  TemperatureProjectors out;
  out.layout = {k, geometry.num_vertices()};
  const auto& layout = out.layout;
  const int nd = layout.size();
  const int nk = poly_dim(k);
  const int nk1 = poly_dim(k - 1);
  const int nk2 = poly_dim(k - 2);
  const double area = geometry.area;

  const MonomialBasis basis = MonomialBasis::for_element(geometry, k);
  const Eigen::MatrixXd mass = gram_matrix(basis, basis, quadrature);
  const auto edges = edge_data(geometry, k);
  const Eigen::MatrixXd lap = basis.laplacian_matrix();
  const Eigen::MatrixXd dx = basis.derivative_matrix(0);
  const Eigen::MatrixXd dy = basis.derivative_matrix(1);

  // H1 projector
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nk, nd);
  for (int a = 1; a < nk; ++a) {
    for (int g = 0; g < nk2; ++g) b(a, layout.moment(g)) -= area * lap(g, a);
  }
  for (const auto& e : edges) {
    for (std::size_t q = 0; q < e.points.size(); ++q) {
      const Eigen::VectorXd m = basis.values(e.points[q]);
      const Eigen::VectorXd dn = e.normal.x() * (dx.transpose() * m) + e.normal.y() * (dy.transpose() * m);
      for (int j = 0; j <= k; ++j) {
        const double wl = e.weights[q] * e.lagrange(static_cast<Eigen::Index>(q), j);
        const int dof = layout.node(e.nodes[static_cast<std::size_t>(j)]);
        b(0, dof) += wl;
        b.col(dof).tail(nk - 1) += wl * dn.tail(nk - 1);
      }
    }
  }
  out.pi_nabla = checked_solve(h1_matrix(basis, mass, edges), b, "temperature H1 projector");

  // L2 projector: low moments from DoFs, the rest from the enhancement
  Eigen::MatrixXd c(nk, nd);
  c.topRows(nk2).setZero();
  for (int g = 0; g < nk2; ++g) c(g, layout.moment(g)) = area;
  c.bottomRows(nk - nk2) = mass.bottomRows(nk - nk2) * out.pi_nabla;
  out.pi0 = spd_solve(mass, c, "temperature L2 projector");

  // L2 projection of the gradient, by parts
  const Eigen::MatrixXd mass1 = mass.topLeftCorner(nk1, nk1);
  out.pi0_grad.resize(2 * nk1, nd);
  for (int dir = 0; dir < 2; ++dir) {
    const Eigen::MatrixXd& d = dir == 0 ? dx : dy;
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nk1, nd);
    for (int beta = 0; beta < nk1; ++beta) {
      for (int g = 0; g < nk2; ++g) r(beta, layout.moment(g)) -= area * d(g, beta);
    }
    for (const auto& e : edges) {
      const double nc = e.normal(dir);
      for (std::size_t q = 0; q < e.points.size(); ++q) {
        const Eigen::VectorXd m = basis.values(e.points[q], k - 1);
        for (int j = 0; j <= k; ++j) {
          r.col(layout.node(e.nodes[static_cast<std::size_t>(j)])) += e.weights[q] * e.lagrange(static_cast<Eigen::Index>(q), j) * nc * m;
        }
      }
    }
    out.pi0_grad.middleRows(dir * nk1, nk1) = spd_solve(mass1, r, "temperature gradient projector");
  }

  out.dofs.resize(nd, nk);
  const auto nodes = boundary_nodes(geometry, k);
  for (std::size_t n = 0; n < nodes.size(); ++n) out.dofs.row(layout.node(static_cast<int>(n))) = basis.values(nodes[n]).transpose();
  for (int g = 0; g < nk2; ++g) out.dofs.row(layout.moment(g)) = mass.row(g) / area;

  Eigen::MatrixXd grad(2 * nk1, nk);
  grad << dx.topRows(nk1), dy.topRows(nk1);
  remove_reproduction_defect(out.pi0, Eigen::MatrixXd::Identity(nk, nk), out.dofs, out.pi_nabla);
  remove_reproduction_defect(out.pi0_grad, grad, out.dofs, out.pi_nabla);
  return out;
}

namespace {

// Rows r with r . dofs = int_E v . p for vector polynomials p of degree <= k.
// p is split as grad q + m_perp r; the gradient part is integrated by parts
// with the divergence polynomial, the m_perp part uses the curl moments up to
// degree k - 3 and the enhancement (Pi_nabla) above.
class MomentAlgebra {
 public:
  MomentAlgebra(const ElementGeometry& geometry, const QuadratureRule& quadrature, int k,
                const VelocityDofLayout& layout, const std::vector<EdgeData>& edges)
      : k_(k), layout_(layout), basis_(MonomialBasis::for_element(geometry, k + 1)), area_(geometry.area) {
    mass_ = gram_matrix(basis_, basis_, quadrature);
    dx_ = basis_.derivative_matrix(0);
    dy_ = basis_.derivative_matrix(1);
    boundary_flux_.setZero(basis_.size(), layout.size());
    for (const auto& e : edges) {
      for (std::size_t q = 0; q < e.points.size(); ++q) {
        const Eigen::VectorXd m = basis_.values(e.points[q]);
        for (int j = 0; j <= k; ++j) {
          const double wl = e.weights[q] * e.lagrange(static_cast<Eigen::Index>(q), j);
          const int node = e.nodes[static_cast<std::size_t>(j)];
          for (int c = 0; c < 2; ++c) boundary_flux_.col(layout.node(node, c)) += wl * e.normal(c) * m;
        }
      }
    }
  }

  const MonomialBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& mass() const { return mass_; }
  const Eigen::MatrixXd& boundary_flux() const { return boundary_flux_; }

  void set_divergence(const Eigen::MatrixXd& div) {
    const int nk1 = poly_dim(k_ - 1);
    // int v . grad m_a = - int div v m_a + int_dE m_a v . n
    grad_rows_ = boundary_flux_ - mass_.leftCols(nk1) * div;
  }

  void set_pi_nabla(const Eigen::MatrixXd& pi_nabla) { pi_nabla_ = pi_nabla; }

  // p: 2 * basis().size() coefficients, degree <= m.
  Eigen::RowVectorXd integral(const Eigen::VectorXd& p, int m) const {
    const int nK = basis_.size();
    const int nq = poly_dim(m + 1) - 1;
    const int nr = poly_dim(m - 1);
    const int nm = poly_dim(m);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * nm, nq + nr);
    for (int i = 0; i < nq; ++i) {
      a.col(i).head(nm) = dx_.col(i + 1).head(nm);
      a.col(i).tail(nm) = dy_.col(i + 1).head(nm);
    }
    for (int g = 0; g < nr; ++g) {
      const auto [ga, gb] = monomial_exponents(g);
      a(monomial_index(ga, gb + 1), nq + g) = 1.0;
      a(nm + monomial_index(ga + 1, gb), nq + g) = -1.0;
    }
    Eigen::VectorXd rhs(2 * nm);
    rhs << p.head(nm), p.segment(nK, nm);
    const Eigen::VectorXd qr = checked_solve(a, rhs, "gradient / m_perp decomposition");

    Eigen::RowVectorXd row = qr.head(nq).transpose() * grad_rows_.middleRows(1, nq);
    for (int g = 0; g < nr; ++g) {
      const double coeff = qr(nq + g);
      if (coeff == 0.0) continue;
      const auto [ga, gb] = monomial_exponents(g);
      if (ga + gb <= k_ - 3) {
        row(layout_.curl_moment(g)) += coeff * area_;
      } else {
        if (pi_nabla_.size() == 0) throw std::logic_error("enhanced moment requested before the H1 projector");
        const int nk = poly_dim(k_);
        row += coeff * (mass_.row(monomial_index(ga, gb + 1)).head(nk) * pi_nabla_.topRows(nk) -
                        mass_.row(monomial_index(ga + 1, gb)).head(nk) * pi_nabla_.bottomRows(nk));
      }
    }
    return row;
  }

  Eigen::VectorXd component(int c, const Eigen::VectorXd& scalar) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2 * basis_.size());
    p.segment(c * basis_.size(), scalar.size()) = scalar;
    return p;
  }

 private:
  int k_;
  VelocityDofLayout layout_;
  MonomialBasis basis_;
  double area_;
  Eigen::MatrixXd mass_, dx_, dy_;
  Eigen::MatrixXd boundary_flux_;  // rows: int_dE m_a v . n
  Eigen::MatrixXd grad_rows_;
  Eigen::MatrixXd pi_nabla_;
};

}  // namespace

VelocityProjectors velocity_projectors(const ElementGeometry& geometry, const QuadratureRule& quadrature, int k) {
  if (k < 2) throw std::invalid_argument("velocity space needs k >= 2");
  VelocityProjectors out;
  out.layout = {k, geometry.num_vertices()};
  const auto& layout = out.layout;
  const int nd = layout.size();
  const int nk = poly_dim(k);
  const int nk1 = poly_dim(k - 1);
  const double area = geometry.area;
  const double h = geometry.diameter;

  const auto edges = edge_data(geometry, k);
  MomentAlgebra algebra(geometry, quadrature, k, layout, edges);
  const MonomialBasis basis = MonomialBasis::for_element(geometry, k);
  const Eigen::MatrixXd mass = algebra.mass().topLeftCorner(nk, nk);
  const Eigen::MatrixXd mass1 = mass.topLeftCorner(nk1, nk1);
  const Eigen::MatrixXd lap = basis.laplacian_matrix();
  const Eigen::MatrixXd dx = basis.derivative_matrix(0);
  const Eigen::MatrixXd dy = basis.derivative_matrix(1);

  // divergence polynomial: mean from the boundary flux, the rest from the DoFs
  Eigen::MatrixXd div_moments = Eigen::MatrixXd::Zero(nk1, nd);
  div_moments.row(0) = algebra.boundary_flux().row(0);
  for (int a = 1; a < nk1; ++a) div_moments(a, layout.div_moment(a)) = area / h;
  out.div = spd_solve(mass1, div_moments, "divergence map");
  algebra.set_divergence(out.div);

  // boundary integrals int_dE v_c f for each local edge Gauss point value of f
  auto boundary_rows = [&](int c, int degree, auto&& weight) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(poly_dim(degree), nd);
    for (const auto& e : edges) {
      for (std::size_t q = 0; q < e.points.size(); ++q) {
        const Eigen::VectorXd f = weight(e, q);
        for (int j = 0; j <= k; ++j) {
          r.col(layout.node(e.nodes[static_cast<std::size_t>(j)], c)) += e.weights[q] * e.lagrange(static_cast<Eigen::Index>(q), j) * f;
        }
      }
    }
    return r;
  };

  // H1 projector, one component at a time with the same matrix
  const Eigen::MatrixXd g = h1_matrix(basis, mass, edges);
  out.pi_nabla.resize(2 * nk, nd);
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXd b = boundary_rows(c, k, [&](const EdgeData& e, std::size_t q) {
      const Eigen::VectorXd m = basis.values(e.points[q]);
      Eigen::VectorXd f = e.normal.x() * (dx.transpose() * m) + e.normal.y() * (dy.transpose() * m);
      f(0) = 1.0;
      return f;
    });
    for (int a = 1; a < nk; ++a) {
      if (lap.col(a).isZero()) continue;
      b.row(a) -= algebra.integral(algebra.component(c, lap.col(a)), k - 2);
    }
    out.pi_nabla.middleRows(c * nk, nk) = checked_solve(g, b, "velocity H1 projector");
  }
  algebra.set_pi_nabla(out.pi_nabla);

  // L2 projector
  out.pi0.resize(2 * nk, nd);
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXd moments(nk, nd);
    for (int a = 0; a < nk; ++a) moments.row(a) = algebra.integral(algebra.component(c, Eigen::VectorXd::Unit(nk, a)), k);
    out.pi0.middleRows(c * nk, nk) = spd_solve(mass, moments, "velocity L2 projector");
  }

  // L2 projection of the gradient: int d_j v_i m_b = -int v_i d_j m_b + int_dE v_i m_b n_j
  out.pi0_grad.resize(4 * nk1, nd);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Eigen::MatrixXd& d = j == 0 ? dx : dy;
      Eigen::MatrixXd r = boundary_rows(i, k - 1, [&](const EdgeData& e, std::size_t q) {
        return Eigen::VectorXd(e.normal(j) * basis.values(e.points[q], k - 1));
      });
      for (int beta = 1; beta < nk1; ++beta) r.row(beta) -= algebra.integral(algebra.component(i, d.col(beta)), k - 2);
      out.pi0_grad.middleRows((2 * i + j) * nk1, nk1) = spd_solve(mass1, r, "velocity gradient projector");
    }
  }

  // DoFs of the vector monomials e_c m_b
  out.dofs = Eigen::MatrixXd::Zero(nd, 2 * nk);
  const auto nodes = boundary_nodes(geometry, k);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const Eigen::RowVectorXd m = basis.values(nodes[n]).transpose();
    out.dofs.row(layout.node(static_cast<int>(n), 0)).head(nk) = m;
    out.dofs.row(layout.node(static_cast<int>(n), 1)).tail(nk) = m;
  }
  const Eigen::MatrixXd& big_mass = algebra.mass();
  for (int gi = 0; gi < layout.num_curl_moments(); ++gi) {
    const auto [ga, gb] = monomial_exponents(gi);
    out.dofs.row(layout.curl_moment(gi)).head(nk) = big_mass.row(monomial_index(ga, gb + 1)).head(nk) / area;
    out.dofs.row(layout.curl_moment(gi)).tail(nk) = -big_mass.row(monomial_index(ga + 1, gb)).head(nk) / area;
  }
  for (int a = 1; a < nk1; ++a) {
    out.dofs.row(layout.div_moment(a)).head(nk) = (h / area) * (mass.row(a) * dx);
    out.dofs.row(layout.div_moment(a)).tail(nk) = (h / area) * (mass.row(a) * dy);
  }

  Eigen::MatrixXd div(nk1, 2 * nk);
  div << dx.topRows(nk1), dy.topRows(nk1);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(4 * nk1, 2 * nk);
  grad.block(0, 0, nk1, nk) = dx.topRows(nk1);
  grad.block(nk1, 0, nk1, nk) = dy.topRows(nk1);
  grad.block(2 * nk1, nk, nk1, nk) = dx.topRows(nk1);
  grad.block(3 * nk1, nk, nk1, nk) = dy.topRows(nk1);
  remove_reproduction_defect(out.pi0, Eigen::MatrixXd::Identity(2 * nk, 2 * nk), out.dofs, out.pi_nabla);
  remove_reproduction_defect(out.pi0_grad, grad, out.dofs, out.pi_nabla);
  remove_reproduction_defect(out.div, div, out.dofs, out.pi_nabla);

  out.pi0_eps.resize(4 * nk1, nd);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.pi0_eps.middleRows((2 * i + j) * nk1, nk1) =
          0.5 * (out.pi0_grad.middleRows((2 * i + j) * nk1, nk1) + out.pi0_grad.middleRows((2 * j + i) * nk1, nk1));
    }
  }
  return out;
}

ElementProjectors build_element_projectors(const ElementGeometry& geometry, int k) {
  ElementProjectors p;
  p.k = k;
  p.geometry = geometry;
  p.basis = MonomialBasis::for_element(geometry, k);
  p.quadrature = polygon_quadrature(geometry, element_quadrature_order(k));
  p.mass = gram_matrix(p.basis, p.basis, p.quadrature);
  p.temp = temp_projectors(geometry, p.quadrature, k);
  p.vel = velocity_projectors(geometry, p.quadrature, k);
  return p;
}

std::vector<ElementProjectors> build_all_projectors(const PolygonalMesh& mesh, int k) {
  std::vector<ElementProjectors> out;
  out.reserve(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    try {
      out.push_back(build_element_projectors(mesh.geometry(c), k));
    } catch (const ElementError& e) {
      throw ElementError("cell " + std::to_string(c) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace thermovem
