#include "thermovem/assembly.hpp"

#include "thermovem/forms.hpp"

namespace thermovem {

int expected_heat_size(int n_v, int n_e, int n_p, int k) { return n_v + (k - 1) * n_e + k * (k - 1) / 2 * n_p; }

int expected_oseen_size(int n_v, int n_e, int n_p, int k) {
  return 2 * n_v + 2 * (k - 1) * n_e + k * (3 * k - 1) / 2 * n_p + 1;
}

DofMap build_dofmap(const PolygonalMesh& mesh, int k, const std::vector<BoundaryTag>& temperature_dirichlet_tags) {
  DofMap d;
  d.k = k;
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();
  const int nc = mesh.num_cells();
  d.num_nodes = nv + (k - 1) * ne;
  d.num_interior_vertices = mesh.num_interior_vertices();
  d.num_interior_edges = mesh.num_interior_edges();
  d.num_cells = nc;

  const VelocityDofLayout vel_layout{k, 0};
  const TemperatureDofLayout temp_layout{k, 0};
  const int vel_per_cell = vel_layout.num_curl_moments() + vel_layout.num_div_moments();
  const int temp_per_cell = temp_layout.num_moments();
  d.velocity_size = 2 * d.num_nodes + vel_per_cell * nc;
  d.temperature_size = d.num_nodes + temp_per_cell * nc;
  d.pressure_per_cell = poly_dim(k - 1);
  d.pressure_size = d.pressure_per_cell * nc;

  const auto params = edge_point_parameters(k);
  d.node_positions = mesh.vertices();
  for (const auto& e : mesh.edges()) {
    const Point& a = mesh.vertices()[static_cast<std::size_t>(e.vertices[0])];
    const Point& b = mesh.vertices()[static_cast<std::size_t>(e.vertices[1])];
    for (double t : params) d.node_positions.push_back(a + t * (b - a));
  }

  d.velocity_cell_dofs.resize(static_cast<std::size_t>(nc));
  d.temperature_cell_dofs.resize(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cells()[static_cast<std::size_t>(c)];
    const int n = static_cast<int>(cell.size());
    std::vector<int> nodes(cell.begin(), cell.end());
    for (int i = 0; i < n; ++i) {
      const int e = mesh.cell_edges(c)[static_cast<std::size_t>(i)];
      const bool aligned = mesh.cell_edge_aligned(c, i);
      for (int j = 0; j < k - 1; ++j) nodes.push_back(nv + (k - 1) * e + (aligned ? j : k - 2 - j));
    }
    auto& vel = d.velocity_cell_dofs[static_cast<std::size_t>(c)];
    for (int node : nodes) {
      vel.push_back(2 * node);
      vel.push_back(2 * node + 1);
    }
    for (int m = 0; m < vel_per_cell; ++m) vel.push_back(2 * d.num_nodes + c * vel_per_cell + m);
    auto& temp = d.temperature_cell_dofs[static_cast<std::size_t>(c)];
    temp = nodes;
    for (int m = 0; m < temp_per_cell; ++m) temp.push_back(d.num_nodes + c * temp_per_cell + m);
  }

  std::vector<bool> vel_fixed(static_cast<std::size_t>(d.velocity_size), false);
  std::vector<bool> temp_fixed(static_cast<std::size_t>(d.temperature_size), false);
  auto fix_node = [&](int node, bool temperature) {
    vel_fixed[static_cast<std::size_t>(2 * node)] = true;
    vel_fixed[static_cast<std::size_t>(2 * node + 1)] = true;
    if (temperature) temp_fixed[static_cast<std::size_t>(node)] = true;
  };
  for (int e = 0; e < ne; ++e) {
    const Edge& edge = mesh.edges()[static_cast<std::size_t>(e)];
    if (!edge.on_boundary()) continue;
    bool temperature = false;
    for (BoundaryTag tag : temperature_dirichlet_tags) temperature = temperature || tag == edge.tag;
    fix_node(edge.vertices[0], temperature);
    fix_node(edge.vertices[1], temperature);
    for (int j = 0; j < k - 1; ++j) fix_node(nv + (k - 1) * e + j, temperature);
  }

  auto number = [](const std::vector<bool>& fixed, std::vector<int>& index, std::vector<int>& free) {
    index.assign(fixed.size(), -1);
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      if (fixed[i]) continue;
      index[i] = static_cast<int>(free.size());
      free.push_back(static_cast<int>(i));
    }
  };
  number(vel_fixed, d.velocity_free_index, d.free_velocity);
  number(temp_fixed, d.temperature_free_index, d.free_temperature);
  return d;
}

Discretization Discretization::build(const PolygonalMesh& mesh, int k, const BoundaryData& boundary) {
  Discretization disc;
  disc.mesh = &mesh;
  disc.k = k;
  disc.elements = build_all_projectors(mesh, k);
  disc.dofs = build_dofmap(mesh, k, boundary.temperature_dirichlet_tags);
  return disc;
}

Eigen::VectorXd interpolate_dirichlet_temperature(const DofMap& dofs, const ScalarField& theta_d) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.temperature_size);
  for (int n = 0; n < dofs.num_nodes; ++n) {
    if (dofs.temperature_dirichlet(n)) out(n) = theta_d(dofs.node_positions[static_cast<std::size_t>(n)]);
  }
  return out;
}

Eigen::VectorXd interpolate_dirichlet_velocity(const PolygonalMesh& mesh, const DofMap& dofs, const VectorField& g) {
  const int k = dofs.k;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.velocity_size);
  for (int n = 0; n < dofs.num_nodes; ++n) {
    if (!dofs.velocity_dirichlet(2 * n)) continue;
    const Eigen::Vector2d v = g(dofs.node_positions[static_cast<std::size_t>(n)]);
    out(2 * n) = v(0);
    out(2 * n + 1) = v(1);
  }

  // flux correction on every boundary edge
  const LineRule lobatto = gauss_lobatto(k + 1);
  const LineRule gauss = gauss_legendre(8);
  const int nv = mesh.num_vertices();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges()[static_cast<std::size_t>(e)];
    if (!edge.on_boundary()) continue;
    const Point& a = mesh.vertices()[static_cast<std::size_t>(edge.vertices[0])];
    const Point& b = mesh.vertices()[static_cast<std::size_t>(edge.vertices[1])];
    const double length = (b - a).norm();
    const Eigen::Vector2d normal = Eigen::Vector2d((b - a).y(), -(b - a).x()) / length;
    double exact = 0.0;
    for (std::size_t q = 0; q < gauss.nodes.size(); ++q) exact += gauss.weights[q] * g(a + gauss.nodes[q] * (b - a)).dot(normal);
    exact *= length;

    std::vector<int> nodes{edge.vertices[0]};
    for (int j = 0; j < k - 1; ++j) nodes.push_back(nv + (k - 1) * e + j);
    nodes.push_back(edge.vertices[1]);
    double discrete = 0.0;
    double interior_weight = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const int n = nodes[j];
      discrete += lobatto.weights[j] * length * Eigen::Vector2d(out(2 * n), out(2 * n + 1)).dot(normal);
      if (j > 0 && j + 1 < nodes.size()) interior_weight += lobatto.weights[j] * length;
    }
    const double shift = (exact - discrete) / interior_weight;
    for (std::size_t j = 1; j + 1 < nodes.size(); ++j) {
      out(2 * nodes[j]) += shift * normal(0);
      out(2 * nodes[j] + 1) += shift * normal(1);
    }
  }
  return out;
}

Eigen::VectorXd gather(const std::vector<int>& local_to_global, const Eigen::VectorXd& global) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(local_to_global.size()));
  for (std::size_t i = 0; i < local_to_global.size(); ++i) out(static_cast<Eigen::Index>(i)) = global(local_to_global[i]);
  return out;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Scatter a local block into the reduced system: rows and columns through the
// free index; constrained columns move to the right-hand side.
void scatter_block(const Eigen::MatrixXd& local, const std::vector<int>& dofs, const std::vector<int>& free_index,
                   const Eigen::VectorXd& fixed_values, Triplets& triplets, Eigen::VectorXd& rhs) {
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const int row = free_index[static_cast<std::size_t>(dofs[i])];
    if (row < 0) continue;
    for (std::size_t j = 0; j < dofs.size(); ++j) {
      const double value = local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const int col = free_index[static_cast<std::size_t>(dofs[j])];
      if (col >= 0) {
        triplets.emplace_back(row, col, value);
      } else {
        rhs(row) -= value * fixed_values(dofs[j]);
      }
    }
  }
}

}  // namespace

SparseSystem assemble_heat(const Discretization& disc, const CoefficientFields& coefficients, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& theta_dirichlet, bool skew) {
  const DofMap& d = disc.dofs;
  const int n = d.heat_system_size();
  SparseSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(n);
  Triplets triplets;
  for (std::size_t c = 0; c < disc.elements.size(); ++c) {
    const ElementProjectors& element = disc.elements[c];
    const auto& dofs = d.temperature_cell_dofs[c];
    Eigen::MatrixXd local = local_aT(element, coefficients.conductivity);
    const Eigen::VectorXd u_local = gather(d.velocity_cell_dofs[c], u);
    if (!u_local.isZero(0.0)) {
      const ConvectionMatrices conv = local_cT(element, u_local);
      local += skew ? conv.skew : conv.full;
    }
    scatter_block(local, dofs, d.temperature_free_index, theta_dirichlet, triplets, sys.rhs);
    const Eigen::VectorXd load = local_loads(element, [](const Point&) { return Eigen::Vector2d::Zero().eval(); },
                                             coefficients.heat_source).temperature;
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      const int row = d.temperature_free_index[static_cast<std::size_t>(dofs[i])];
      if (row >= 0) sys.rhs(row) += load(static_cast<Eigen::Index>(i));
    }
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

SparseSystem assemble_oseen(const Discretization& disc, const CoefficientFields& coefficients, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& w, const Eigen::VectorXd& velocity_dirichlet) {
  const DofMap& d = disc.dofs;
  const int nfv = static_cast<int>(d.free_velocity.size());
  const int n = d.oseen_system_size();
  const int multiplier = n - 1;
  SparseSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(n);
  Triplets triplets;
  for (std::size_t c = 0; c < disc.elements.size(); ++c) {
    const ElementProjectors& element = disc.elements[c];
    const auto& dofs = d.velocity_cell_dofs[c];
    Eigen::MatrixXd local = local_aV(element, coefficients.viscosity, gather(d.temperature_cell_dofs[c], theta));
    if (w.size() > 0) {
      const Eigen::VectorXd w_local = gather(dofs, w);
      if (!w_local.isZero(0.0)) local += local_cV(element, w_local).skew;
    }
    scatter_block(local, dofs, d.velocity_free_index, velocity_dirichlet, triplets, sys.rhs);

    const Eigen::VectorXd load = local_loads(element, coefficients.force, [](const Point&) { return 0.0; }).velocity;
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      const int row = d.velocity_free_index[static_cast<std::size_t>(dofs[i])];
      if (row >= 0) sys.rhs(row) += load(static_cast<Eigen::Index>(i));
    }

    const Eigen::MatrixXd b = local_b(element);
    for (int a = 0; a < d.pressure_per_cell; ++a) {
      const int prow = nfv + d.pressure_dof(static_cast<int>(c), a);
      for (std::size_t j = 0; j < dofs.size(); ++j) {
        const double value = b(a, static_cast<Eigen::Index>(j));
        if (value == 0.0) continue;
        const int col = d.velocity_free_index[static_cast<std::size_t>(dofs[j])];
        if (col >= 0) {
          triplets.emplace_back(prow, col, value);
          triplets.emplace_back(col, prow, value);
        } else {
          sys.rhs(prow) -= value * velocity_dirichlet(dofs[j]);
        }
      }
      const double mean = element.mass(0, a);
      if (mean != 0.0) {
        triplets.emplace_back(prow, multiplier, mean);
        triplets.emplace_back(multiplier, prow, mean);
      }
    }
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

Eigen::VectorXd expand_temperature(const DofMap& dofs, const Eigen::VectorXd& reduced, const Eigen::VectorXd& theta_dirichlet) {
  Eigen::VectorXd theta = theta_dirichlet;
  for (std::size_t i = 0; i < dofs.free_temperature.size(); ++i) theta(dofs.free_temperature[i]) = reduced(static_cast<Eigen::Index>(i));
  return theta;
}

void expand_oseen(const DofMap& dofs, const Eigen::VectorXd& reduced, const Eigen::VectorXd& velocity_dirichlet,
                  Eigen::VectorXd& u, Eigen::VectorXd& p) {
  u = velocity_dirichlet;
  for (std::size_t i = 0; i < dofs.free_velocity.size(); ++i) u(dofs.free_velocity[i]) = reduced(static_cast<Eigen::Index>(i));
  p = reduced.segment(static_cast<Eigen::Index>(dofs.free_velocity.size()), dofs.pressure_size);
}

}  // namespace thermovem
