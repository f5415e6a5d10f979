#include "thermovem/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace thermovem {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// sum over blocks of c_b^T M c_b for stacked coefficient blocks
double blocked_norm2(const Eigen::MatrixXd& mass, const Eigen::VectorXd& coeffs) {
  const Eigen::Index n = mass.rows();
  double s = 0.0;
  for (Eigen::Index b = 0; b < coeffs.size() / n; ++b) {
    const auto c = coeffs.segment(b * n, n);
    s += c.dot(mass * c);
  }
  return s;
}

}  // namespace

double divergence_norm(const Discretization& disc, const Eigen::VectorXd& u) {
  const int nk1 = poly_dim(disc.k - 1);
  double s = 0.0;
  for (std::size_t c = 0; c < disc.elements.size(); ++c) {
    const auto& element = disc.elements[c];
    const Eigen::VectorXd d = element.vel.div * gather(disc.dofs.velocity_cell_dofs[c], u);
    s += blocked_norm2(element.mass.topLeftCorner(nk1, nk1), d);
  }
  return std::sqrt(std::max(s, 0.0));
}

double velocity_h1_seminorm(const Discretization& disc, const Eigen::VectorXd& u) {
  const int nk1 = poly_dim(disc.k - 1);
  double s = 0.0;
  for (std::size_t c = 0; c < disc.elements.size(); ++c) {
    const auto& element = disc.elements[c];
    const Eigen::VectorXd g = element.vel.pi0_grad * gather(disc.dofs.velocity_cell_dofs[c], u);
    s += blocked_norm2(element.mass.topLeftCorner(nk1, nk1), g);
  }
  return std::sqrt(std::max(s, 0.0));
}

ErrorReport compute_errors(const Discretization& disc, const SolverState& state, const ExactSolution& exact) {
  const int k = disc.k;
  const int nk = poly_dim(k);
  const int nk1 = poly_dim(k - 1);
  double eu1 = 0, nu1 = 0, eu0 = 0, nu0 = 0, et1 = 0, nt1 = 0, et0 = 0, nt0 = 0, ep = 0;
  for (std::size_t c = 0; c < disc.elements.size(); ++c) {
    const auto& element = disc.elements[c];
    const Eigen::VectorXd u_local = gather(disc.dofs.velocity_cell_dofs[c], state.u);
    const Eigen::VectorXd t_local = gather(disc.dofs.temperature_cell_dofs[c], state.theta);
    const Eigen::VectorXd grad_u = element.vel.pi0_grad * u_local;
    const Eigen::VectorXd u_poly = element.vel.pi0 * u_local;
    const Eigen::VectorXd grad_t = element.temp.pi0_grad * t_local;
    const Eigen::VectorXd t_poly = element.temp.pi0 * t_local;
    const Eigen::VectorXd p_poly = state.p.segment(static_cast<Eigen::Index>(c) * nk1, nk1);
    const auto& quad = element.quadrature;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Point& x = quad.points[q];
      const double w = quad.weights[q];
      const Eigen::VectorXd m = element.basis.values(x);
      const Eigen::VectorXd m1 = m.head(nk1);
      if (exact.velocity_gradient) {
        const Eigen::Matrix2d g = exact.velocity_gradient(x);
        Eigen::Matrix2d gh;
        gh << m1.dot(grad_u.segment(0, nk1)), m1.dot(grad_u.segment(nk1, nk1)), m1.dot(grad_u.segment(2 * nk1, nk1)),
            m1.dot(grad_u.segment(3 * nk1, nk1));
        eu1 += w * (g - gh).squaredNorm();
        nu1 += w * g.squaredNorm();
      }
      if (exact.velocity) {
        const Eigen::Vector2d v = exact.velocity(x);
        const Eigen::Vector2d vh(m.dot(u_poly.head(nk)), m.dot(u_poly.tail(nk)));
        eu0 += w * (v - vh).squaredNorm();
        nu0 += w * v.squaredNorm();
      }
      if (exact.temperature_gradient) {
        const Eigen::Vector2d g = exact.temperature_gradient(x);
        const Eigen::Vector2d gh(m1.dot(grad_t.head(nk1)), m1.dot(grad_t.tail(nk1)));
        et1 += w * (g - gh).squaredNorm();
        nt1 += w * g.squaredNorm();
      }
      if (exact.temperature) {
        const double t = exact.temperature(x);
        et0 += w * std::pow(t - m.dot(t_poly), 2);
        nt0 += w * t * t;
      }
      if (exact.pressure) ep += w * std::pow(exact.pressure(x) - m1.dot(p_poly), 2);
    }
  }

  ErrorReport report;
  auto relative = [&report](double err2, double norm2) {
    const double norm = std::sqrt(norm2);
    if (norm < 1e-14) {
      report.absolute_fallback = true;
      return std::sqrt(err2);
    }
    return std::sqrt(err2) / norm;
  };
  report.err_u_h1 = exact.velocity_gradient ? relative(eu1, nu1) : nan_value;
  report.err_u_l2 = exact.velocity ? relative(eu0, nu0) : nan_value;
  report.err_theta_h1 = exact.temperature_gradient ? relative(et1, nt1) : nan_value;
  report.err_theta_l2 = exact.temperature ? relative(et0, nt0) : nan_value;
  report.err_p_l2 = exact.pressure ? std::sqrt(ep) : nan_value;
  report.h_measured = disc.mesh->mesh_size();
  report.dofs_heat = disc.dofs.heat_system_size();
  report.dofs_oseen = disc.dofs.oseen_system_size();
  report.n_it = state.iterations;
  return report;
}

std::pair<double, double> extremal_dof_values(const Eigen::VectorXd& theta, double reference) {
  if (theta.size() == 0) throw std::invalid_argument("extremal_dof_values: empty vector");
  return {theta.minCoeff() - reference, theta.maxCoeff() - reference};
}

void export_fields(std::ostream& out, const Discretization& disc, const SolverState& state) {
  const int nk = poly_dim(disc.k);
  const int nk1 = poly_dim(disc.k - 1);
  out << "cell,x,y,u1,u2,abs_u,theta,p\n";
  for (std::size_t c = 0; c < disc.elements.size(); ++c) {
    const auto& element = disc.elements[c];
    const Eigen::VectorXd u_poly = element.vel.pi0 * gather(disc.dofs.velocity_cell_dofs[c], state.u);
    const Eigen::VectorXd t_poly = element.temp.pi0 * gather(disc.dofs.temperature_cell_dofs[c], state.theta);
    const Eigen::VectorXd p_poly = state.p.segment(static_cast<Eigen::Index>(c) * nk1, nk1);
    std::vector<Point> samples = element.geometry.vertices;
    samples.push_back(element.geometry.centroid);
    for (const Point& x : samples) {
      const Eigen::VectorXd m = element.basis.values(x);
      const double u1 = m.dot(u_poly.head(nk));
      const double u2 = m.dot(u_poly.tail(nk));
      out << c << ',' << format_double(x.x()) << ',' << format_double(x.y()) << ',' << format_double(u1) << ','
          << format_double(u2) << ',' << format_double(std::hypot(u1, u2)) << ',' << format_double(m.dot(t_poly)) << ','
          << format_double(m.head(nk1).dot(p_poly)) << '\n';
    }
  }
}

void export_fields(const std::string& path, const Discretization& disc, const SolverState& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  export_fields(out, disc, state);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<RateRow> compute_rates(const std::vector<ErrorRow>& rows) {
  std::vector<RateRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ErrorRow& row = rows[i];
    RateRow rate{row.family, row.inv_h, row.report.h_measured, row.status, nan_value, nan_value, nan_value, nan_value, nan_value};
    if (i > 0 && rows[i - 1].family == row.family) {
      const ErrorRow& prev = rows[i - 1];
      const double scale = std::log(static_cast<double>(row.inv_h) / prev.inv_h);
      auto order = [scale](double coarse, double fine) { return std::log(coarse / fine) / scale; };
      rate.rate_u_h1 = order(prev.report.err_u_h1, row.report.err_u_h1);
      rate.rate_u_l2 = order(prev.report.err_u_l2, row.report.err_u_l2);
      rate.rate_theta_h1 = order(prev.report.err_theta_h1, row.report.err_theta_h1);
      rate.rate_theta_l2 = order(prev.report.err_theta_l2, row.report.err_theta_l2);
      rate.rate_p_l2 = order(prev.report.err_p_l2, row.report.err_p_l2);
    }
    out.push_back(rate);
  }
  return out;
}

void write_errors_csv(std::ostream& out, const std::vector<ErrorRow>& rows) {
  out << "family,k,inv_h,dofs_heat,dofs_oseen,n_it,err_u_h1,err_u_l2,err_th_h1,err_th_l2,err_p_l2\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << row.family << ',' << row.k << ',' << row.inv_h << ',' << r.dofs_heat << ',' << r.dofs_oseen << ',' << r.n_it
        << ',' << format_double(r.err_u_h1) << ',' << format_double(r.err_u_l2) << ',' << format_double(r.err_theta_h1)
        << ',' << format_double(r.err_theta_l2) << ',' << format_double(r.err_p_l2) << '\n';
  }
}

void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << "family,inv_h,h_measured,status,rate_u_h1,rate_u_l2,rate_th_h1,rate_th_l2,rate_p_l2\n";
  for (const auto& r : rows) {
    out << r.family << ',' << r.inv_h << ',' << format_double(r.h_measured) << ',' << r.status << ','
        << format_double(r.rate_u_h1) << ',' << format_double(r.rate_u_l2) << ',' << format_double(r.rate_theta_h1) << ','
        << format_double(r.rate_theta_l2) << ',' << format_double(r.rate_p_l2) << '\n';
  }
}

}  // namespace thermovem
