#include <gtest/gtest.h>

#include <random>

#include <Eigen/SVD>

#include "oracle.hpp"
#include "support.hpp"
#include "thermovem/vem_spaces.hpp"

namespace thermovem {
namespace {

using testing::affine;
using testing::max_abs;
using testing::sample_cells;
using testing::unit_square;
using testing::vector_poly;

class ProjectorReproduction : public ::testing::TestWithParam<int> {};

TEST_P(ProjectorReproduction, TemperatureAndVelocity) {
  const int k = GetParam();
  const int nk = poly_dim(k);
  const int nk1 = poly_dim(k - 1);
  for (const auto& geometry : sample_cells()) {
    const auto p = build_element_projectors(geometry, k);
    const auto& t = p.temp;
    EXPECT_LT((t.pi_nabla * t.dofs - Eigen::MatrixXd::Identity(nk, nk)).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LT((t.pi0 * t.dofs - Eigen::MatrixXd::Identity(nk, nk)).cwiseAbs().maxCoeff(), 1e-11);
    const auto& v = p.vel;
    EXPECT_LT((v.pi_nabla * v.dofs - Eigen::MatrixXd::Identity(2 * nk, 2 * nk)).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LT((v.pi0 * v.dofs - Eigen::MatrixXd::Identity(2 * nk, 2 * nk)).cwiseAbs().maxCoeff(), 1e-11);
    const Eigen::MatrixXd dx = p.basis.derivative_matrix(0).topRows(nk1);
    const Eigen::MatrixXd dy = p.basis.derivative_matrix(1).topRows(nk1);
    Eigen::MatrixXd grad(2 * nk1, nk);
    grad << dx, dy;
    EXPECT_LT((t.pi0_grad * t.dofs - grad).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::MatrixXd vgrad = Eigen::MatrixXd::Zero(4 * nk1, 2 * nk);
    vgrad.block(0, 0, nk1, nk) = dx;
    vgrad.block(nk1, 0, nk1, nk) = dy;
    vgrad.block(2 * nk1, nk, nk1, nk) = dx;
    vgrad.block(3 * nk1, nk, nk1, nk) = dy;
    EXPECT_LT((v.pi0_grad * v.dofs - vgrad).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::MatrixXd vdiv(nk1, 2 * nk);
    vdiv << dx, dy;
    EXPECT_LT((v.div * v.dofs - vdiv).cwiseAbs().maxCoeff(), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, ProjectorReproduction, ::testing::Values(2, 3));

TEST(ElementProjectors, ReproductionOnGeneratedMeshesAtDegreeTwo) {
  const std::vector<PolygonalMesh> meshes{generate_quadrilateral(4, 0.3), generate_triangular(3),
                                          generate_voronoi(32, 100, 1), generate_voronoi(32, 0, 2),
                                          generate_test2_mesh(1)};
  for (const auto& mesh : meshes) {
    for (const auto& p : build_all_projectors(mesh, 2)) {
      EXPECT_LT(max_abs(p.temp.pi0 * p.temp.dofs - Eigen::MatrixXd::Identity(6, 6)), 1e-12);
      EXPECT_LT(max_abs(p.temp.pi_nabla * p.temp.dofs - Eigen::MatrixXd::Identity(6, 6)), 1e-12);
      EXPECT_LT(max_abs(p.vel.pi0 * p.vel.dofs - Eigen::MatrixXd::Identity(12, 12)), 1e-12);
      EXPECT_LT(max_abs(p.vel.pi_nabla * p.vel.dofs - Eigen::MatrixXd::Identity(12, 12)), 1e-12);
    }
  }
}

TEST(ElementProjectors, DofMatricesHaveFullColumnRank) {
  const std::vector<PolygonalMesh> meshes{generate_quadrilateral(4, 0.4), generate_triangular(4),
                                          generate_voronoi(64, 100, 3), generate_voronoi(64, 0, 4),
                                          generate_test2_mesh(1)};
  for (const auto& mesh : meshes) {
    for (const auto& p : build_all_projectors(mesh, 2)) {
      for (const Eigen::MatrixXd* d : {&p.temp.dofs, &p.vel.dofs}) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(*d);
        EXPECT_GT(svd.singularValues().minCoeff(), 1e-10);
      }
    }
  }
}

TEST(ElementProjectors, LayoutSizes) {
  for (const auto& geometry : sample_cells()) {
    const auto p = build_element_projectors(geometry, 2);
    const int n = geometry.num_vertices();
    EXPECT_EQ(p.temp.layout.size(), 2 * n + 1);
    EXPECT_EQ(p.vel.layout.size(), 4 * n + 2);
    EXPECT_EQ(p.vel.layout.num_curl_moments(), 0);
    EXPECT_EQ(p.temp.pi0.cols(), 2 * n + 1);
    EXPECT_EQ(p.vel.pi0.cols(), 4 * n + 2);
  }
}

TEST(ElementProjectors, ConstantIsKeptByEnergyProjector) {
  for (const auto& geometry : sample_cells()) {
    const auto p = build_element_projectors(geometry, 2);
    const Eigen::VectorXd ones = p.temp.dofs.col(0);
    EXPECT_LT(max_abs(p.temp.pi_nabla * ones - Eigen::VectorXd::Unit(6, 0)), 1e-13);
    const Eigen::VectorXd c = p.vel.dofs * vector_poly(Eigen::VectorXd::Unit(6, 0) * 0.7, Eigen::VectorXd::Unit(6, 0) * -1.3);
    EXPECT_LT(max_abs(p.vel.pi0_grad * c), 1e-13);
  }
}

TEST(Divergence, RotationIsSolenoidal) {
  for (const auto& geometry : sample_cells()) {
    const auto p = build_element_projectors(geometry, 2);
    const double h = p.basis.scale();
    const Eigen::VectorXd rotation =
        vector_poly(affine(p.basis, 0, 0, 1) - affine(p.basis, geometry.centroid.y(), 0, 0),
                    affine(p.basis, geometry.centroid.x(), -1, 0));
    EXPECT_NEAR(rotation(monomial_index(0, 1)), h, 1e-14);
    EXPECT_LT(max_abs(p.vel.div * (p.vel.dofs * rotation)), 1e-13);
  }
}

TEST(Divergence, RadialFieldHasUnitDivergence) {
  for (const auto& geometry : sample_cells()) {
    const auto p = build_element_projectors(geometry, 2);
    const Eigen::VectorXd radial = vector_poly(affine(p.basis, 0, 0.5, 0), affine(p.basis, 0, 0, 0.5));
    const Eigen::VectorXd div = p.vel.div * (p.vel.dofs * radial);
    EXPECT_NEAR(div(0), 1.0, 1e-13);
    EXPECT_LT(max_abs(div.tail(div.size() - 1)), 1e-13);
  }
}

TEST(Divergence, MeanMatchesBoundaryFlux) {
  // the velocity trace is quadratic on each edge, so Simpson's rule is exact
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (const auto& geometry : sample_cells()) {
    const auto p = build_element_projectors(geometry, 2);
    const int n = geometry.num_vertices();
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd v(p.vel.layout.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
      auto node = [&](int index) { return Eigen::Vector2d(v(2 * index), v(2 * index + 1)); };
      double flux = 0.0;
      for (int e = 0; e < n; ++e) {
        const Eigen::Vector2d simpson = (node(e) + 4.0 * node(n + e) + node((e + 1) % n)) / 6.0;
        flux += geometry.edge_lengths[e] * simpson.dot(geometry.edge_normals[e]);
      }
      const Eigen::VectorXd div = p.vel.div * v;
      double mean = 0.0;
      for (int a = 0; a < div.size(); ++a) mean += div(a) * p.mass(0, a);
      EXPECT_NEAR(mean / geometry.area, flux / geometry.area, 1e-13 * std::max(1.0, std::abs(flux / geometry.area)));
    }
  }
}

TEST(Divergence, ExactOnQuadraticFields) {
  for (const auto& geometry : sample_cells()) {
    const auto p = build_element_projectors(geometry, 2);
    const Eigen::MatrixXd dx = p.basis.derivative_matrix(0).topRows(3);
    const Eigen::MatrixXd dy = p.basis.derivative_matrix(1).topRows(3);
    for (int i = 0; i < 12; ++i) {
      const Eigen::VectorXd field = Eigen::VectorXd::Unit(12, i);
      const Eigen::VectorXd expected = dx * field.head(6) + dy * field.tail(6);
      EXPECT_LT(max_abs(p.vel.div * (p.vel.dofs * field) - expected), 1e-12);
    }
  }
}

TEST(SymmetricGradient, IsSymmetricPartOfGradientProjection) {
  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  for (const auto& geometry : sample_cells()) {
    const auto p = build_element_projectors(geometry, 2);
    const int m = 3;
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd v(p.vel.layout.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
      const Eigen::VectorXd g = p.vel.pi0_grad * v;
      const Eigen::VectorXd e = p.vel.pi0_eps * v;
      const Eigen::VectorXd off = 0.5 * (g.segment(m, m) + g.segment(2 * m, m));
      EXPECT_LT(max_abs(e.segment(0, m) - g.segment(0, m)), 1e-12);
      EXPECT_LT(max_abs(e.segment(m, m) - off), 1e-12);
      EXPECT_LT(max_abs(e.segment(2 * m, m) - off), 1e-12);
      EXPECT_LT(max_abs(e.segment(3 * m, m) - g.segment(3 * m, m)), 1e-12);
    }
  }
}

TEST(ElementOracle, UnitSquareProjectorsMatch) {
  const auto reference = oracle::unit_square_projectors();
  EXPECT_LT(reference.constraint_residual, 1e-10);
  const auto p = build_element_projectors(unit_square(), 2);
  EXPECT_LT(max_abs(p.temp.pi_nabla - reference.temp_pi_nabla), 1e-6);
  EXPECT_LT(max_abs(p.temp.pi0 - reference.temp_pi0), 1e-6);
  EXPECT_LT(max_abs(p.temp.pi0_grad - reference.temp_pi0_grad), 1e-6);
  EXPECT_LT(max_abs(p.vel.pi_nabla - reference.vel_pi_nabla), 1e-6);
  EXPECT_LT(max_abs(p.vel.pi0 - reference.vel_pi0), 1e-6);
  EXPECT_LT(max_abs(p.vel.pi0_grad - reference.vel_pi0_grad), 1e-6);
}

TEST(ElementProjectors, RejectsDegenerateCell) {
  const auto sliver = ElementGeometry::from_vertices({{0, 0}, {1, 0}, {1, 1e-15}});
  EXPECT_ANY_THROW(build_element_projectors(sliver, 2));
}

}  // namespace
}  // namespace thermovem
