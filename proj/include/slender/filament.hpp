#ifndef SLENDER_FILAMENT_HPP
#define SLENDER_FILAMENT_HPP

#include "slender/spectral.hpp"

#include <Eigen/Dense>

namespace slender {

/**
 * Physical and numerical parameters of one filament type. All filaments
 * sharing a DiscretizationOps use the same parameters.
 */
struct FilamentParams {
    double L = 1;      // length
    double a = 1e-3;   // true radius
    double kappa = 1;  // bending modulus
    double mu = 1;     // fluid viscosity
    int N = 16;        // tangent vector count
    // derived
    double eps() const { return a / L; }
    double ahat() const; // regularized radius exp(3/2)/4 * a
    double epshat() const { return ahat() / L; }
    int Nx() const { return N + 1; }
};

/**
 * Immutable per-discretization operators: the tangent and position grids,
 * the map from (tau, midpoint) to node positions, L2 inner product
 * weights, and the bending energy matrix. Shared across filaments.
 */
struct DiscretizationOps {
    FilamentParams params;
    ChebGrid tau_grid; // Type1, N nodes
    ChebGrid x_grid;   // Type2, N+1 nodes

    Eigen::MatrixXd xmap_tau;  // Nx x N scalar: X_c = xmap_tau*tau_c + MP_c
    Eigen::MatrixXd xmap;      // 3Nx x 3(N+1), invertible
    Eigen::PartialPivLU<Eigen::MatrixXd> xmap_lu;

    Eigen::MatrixXd W;         // scalar L2 weights, Nx x Nx, SPD
    Eigen::MatrixXd Winv;
    Eigen::MatrixXd Wsqrt;
    Eigen::MatrixXd bend_u;    // factored bending operator: bend = kappa bend_u^T bend_u
    Eigen::MatrixXd bend;      // scalar kappa (D^2)^T W D^2
    Eigen::MatrixXd bend3;     // expanded 3Nx
    Eigen::MatrixXd bend3_sqrt; // PSD square root of bend3
    Eigen::MatrixXd coeff;     // values -> Chebyshev coefficients on x_grid
};

DiscretizationOps build_discretization(const FilamentParams& params);

/** Filament state: unit tangents on the Type1 grid plus the midpoint. */
struct FilamentShape {
    Eigen::Matrix3Xd tau;     // 3 x N
    Eigen::Vector3d midpoint; // interpolant value at s = L/2
    Eigen::VectorXd X;        // cached positions, 3Nx interleaved
};

// Positions from (tau, midpoint); exact spectral antidifferentiation.
Eigen::VectorXd positions(const Eigen::Matrix3Xd& tau, const Eigen::Vector3d& midpoint,
                          const DiscretizationOps& ops);
FilamentShape make_shape(const Eigen::Matrix3Xd& tau, const Eigen::Vector3d& midpoint,
                         const DiscretizationOps& ops);
// Inverse of the position map.
FilamentShape shape_from_positions(const Eigen::VectorXd& X, const DiscretizationOps& ops);

double bending_energy(const Eigen::VectorXd& X, const DiscretizationOps& ops);
Eigen::VectorXd bending_force(const Eigen::VectorXd& X, const DiscretizationOps& ops); // -bend3*X

// K maps alpha = (Omega on tangent nodes, U_MP) to node velocities.
// Throws std::runtime_error if any tangent deviates from unit length by > 1e-6.
Eigen::MatrixXd kinematic_matrix(const FilamentShape& shape, const DiscretizationOps& ops);

// Rotate each tangent by |Omega_p| dt about Omega_p via Rodrigues and
// translate the midpoint; alpha_dt is (Omega dt, U_MP dt) as for K.
// Throws std::runtime_error if rotation breaks unit length beyond 1e-10.
FilamentShape rotate_and_integrate(const FilamentShape& shape, const Eigen::VectorXd& alpha_dt,
                                   const DiscretizationOps& ops);

} // namespace slender

#endif
