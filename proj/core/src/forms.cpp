#include "thermovem/forms.hpp"

namespace thermovem {

namespace {

// Rows: components of a projected polynomial field at x, as linear maps of the DoFs.
Eigen::MatrixXd evaluate_blocks(const MonomialBasis& basis, const Eigen::MatrixXd& projector, int blocks,
                                int degree, const Point& x) {
  const int n = poly_dim(degree);
  const Eigen::RowVectorXd m = basis.values(x, degree).transpose();
  Eigen::MatrixXd out(blocks, projector.cols());
  for (int b = 0; b < blocks; ++b) out.row(b) = m * projector.middleRows(b * n, n);
  return out;
}

}  // namespace

Eigen::MatrixXd dofi_dofi(const Eigen::MatrixXd& dofs, const Eigen::MatrixXd& pi0) {
  const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(dofs.rows(), dofs.rows()) - dofs * pi0;
  return r.transpose() * r;
}

double temperature_mean(const ElementProjectors& element, const Eigen::Ref<const Eigen::VectorXd>& theta_local) {
  return element.mass.row(0).dot(element.temp.pi0 * theta_local) / element.geometry.area;
}

Eigen::MatrixXd local_aV(const ElementProjectors& element, const ViscosityLaw& viscosity,
                         const Eigen::Ref<const Eigen::VectorXd>& theta_local) {
  const int k = element.k;
  const auto& vel = element.vel;
  const Eigen::VectorXd theta_poly = element.temp.pi0 * theta_local;
  const int nd = vel.layout.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nd, nd);
  const auto& quad = element.quadrature;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Point& x = quad.points[q];
    const double nu = viscosity.value(eval_poly(element.basis, theta_poly, x));
    const Eigen::MatrixXd eps = evaluate_blocks(element.basis, vel.pi0_eps, 4, k - 1, x);
    a.noalias() += (quad.weights[q] * nu) * eps.transpose() * eps;
  }
  const double nu_mean = viscosity.value(temperature_mean(element, theta_local));
  a += nu_mean * dofi_dofi(vel.dofs, vel.pi0);
  return a;
}

Eigen::MatrixXd local_aT(const ElementProjectors& element, const ScalarField& conductivity) {
  const int k = element.k;
  const auto& temp = element.temp;
  const int nd = temp.layout.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nd, nd);
  const auto& quad = element.quadrature;
  double kappa_integral = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Point& x = quad.points[q];
    const double kappa = conductivity(x);
    kappa_integral += quad.weights[q] * kappa;
    const Eigen::MatrixXd grad = evaluate_blocks(element.basis, temp.pi0_grad, 2, k - 1, x);
    a.noalias() += (quad.weights[q] * kappa) * grad.transpose() * grad;
  }
  a += (kappa_integral / element.geometry.area) * dofi_dofi(temp.dofs, temp.pi0);
  return a;
}

ConvectionMatrices local_cV(const ElementProjectors& element, const Eigen::Ref<const Eigen::VectorXd>& w_local) {
  const int k = element.k;
  const auto& vel = element.vel;
  const int nd = vel.layout.size();
  const Eigen::VectorXd w_poly = vel.pi0 * w_local;
  const int nk = poly_dim(k);
  ConvectionMatrices c{Eigen::MatrixXd::Zero(nd, nd), {}};
  const auto& quad = element.quadrature;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Point& x = quad.points[q];
    const Eigen::VectorXd m = element.basis.values(x);
    const Eigen::Vector2d w(m.dot(w_poly.head(nk)), m.dot(w_poly.tail(nk)));
    const Eigen::MatrixXd grad = evaluate_blocks(element.basis, vel.pi0_grad, 4, k - 1, x);
    const Eigen::MatrixXd v = evaluate_blocks(element.basis, vel.pi0, 2, k, x);
    for (int i = 0; i < 2; ++i) {
      const Eigen::RowVectorXd transported = w(0) * grad.row(2 * i) + w(1) * grad.row(2 * i + 1);
      c.full.noalias() += quad.weights[q] * v.row(i).transpose() * transported;
    }
  }
  c.skew = 0.5 * (c.full - c.full.transpose());
  return c;
}

ConvectionMatrices local_cT(const ElementProjectors& element, const Eigen::Ref<const Eigen::VectorXd>& u_local) {
  const int k = element.k;
  const auto& temp = element.temp;
  const int nd = temp.layout.size();
  const Eigen::VectorXd u_poly = element.vel.pi0 * u_local;
  const int nk = poly_dim(k);
  ConvectionMatrices c{Eigen::MatrixXd::Zero(nd, nd), {}};
  const auto& quad = element.quadrature;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Point& x = quad.points[q];
    const Eigen::VectorXd m = element.basis.values(x);
    const Eigen::Vector2d u(m.dot(u_poly.head(nk)), m.dot(u_poly.tail(nk)));
    const Eigen::MatrixXd grad = evaluate_blocks(element.basis, temp.pi0_grad, 2, k - 1, x);
    const Eigen::RowVectorXd s = m.transpose() * temp.pi0;
    c.full.noalias() += quad.weights[q] * s.transpose() * (u(0) * grad.row(0) + u(1) * grad.row(1));
  }
  c.skew = 0.5 * (c.full - c.full.transpose());
  return c;
}

Eigen::MatrixXd local_b(const ElementProjectors& element) {
  const int nk1 = poly_dim(element.k - 1);
  return element.mass.topLeftCorner(nk1, nk1) * element.vel.div;
}

LocalLoads local_loads(const ElementProjectors& element, const VectorField& force, const ScalarField& heat_source) {
  const int nk = poly_dim(element.k);
  Eigen::VectorXd f_moments = Eigen::VectorXd::Zero(2 * nk);
  Eigen::VectorXd g_moments = Eigen::VectorXd::Zero(nk);
  const auto& quad = element.quadrature;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Point& x = quad.points[q];
    const Eigen::VectorXd m = element.basis.values(x);
    const Eigen::Vector2d f = force(x);
    f_moments.head(nk) += quad.weights[q] * f(0) * m;
    f_moments.tail(nk) += quad.weights[q] * f(1) * m;
    g_moments += quad.weights[q] * heat_source(x) * m;
  }
  return {element.vel.pi0.transpose() * f_moments, element.temp.pi0.transpose() * g_moments};
}

}  // namespace thermovem
