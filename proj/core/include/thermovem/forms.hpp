#pragma once

#include <Eigen/Core>

#include "thermovem/problem.hpp"
#include "thermovem/vem_spaces.hpp"

namespace thermovem {

// Local matrices use the convention M(i, j) = form(trial phi_j, test phi_i).

/// Velocity diffusion with viscosity nu(Pi0_k theta) evaluated at quadrature
/// points, plus the dofi-dofi stabilization scaled by nu of the element mean.
Eigen::MatrixXd local_aV(const ElementProjectors& element, const ViscosityLaw& viscosity,
                         const Eigen::Ref<const Eigen::VectorXd>& theta_local);

/// Temperature diffusion plus dofi-dofi stabilization scaled by the mean of kappa.
Eigen::MatrixXd local_aT(const ElementProjectors& element, const ScalarField& conductivity);

struct ConvectionMatrices {
  Eigen::MatrixXd full;
  Eigen::MatrixXd skew;  // (full - full^T) / 2
};

/// int [Pi0_{k-1} grad u] Pi0_k w . Pi0_k v for the convecting field w.
ConvectionMatrices local_cV(const ElementProjectors& element, const Eigen::Ref<const Eigen::VectorXd>& w_local);

/// int (Pi0_k u . Pi0_{k-1} grad theta) Pi0_k sigma for the convecting field u.
ConvectionMatrices local_cT(const ElementProjectors& element, const Eigen::Ref<const Eigen::VectorXd>& u_local);

/// B(a, j) = int_E m_a div phi_j, exact.
Eigen::MatrixXd local_b(const ElementProjectors& element);

struct LocalLoads {
  Eigen::VectorXd velocity;     // int f . Pi0_k phi
  Eigen::VectorXd temperature;  // int g Pi0_k phi
};

LocalLoads local_loads(const ElementProjectors& element, const VectorField& force, const ScalarField& heat_source);

/// dofi-dofi stabilization matrix (I - D Pi0)^T (I - D Pi0).
Eigen::MatrixXd dofi_dofi(const Eigen::MatrixXd& dofs, const Eigen::MatrixXd& pi0);

/// Mean of the Pi0_k polynomial of a temperature DoF vector.
double temperature_mean(const ElementProjectors& element, const Eigen::Ref<const Eigen::VectorXd>& theta_local);

}  // namespace thermovem
