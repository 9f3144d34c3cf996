#ifndef SLENDER_SPECTRAL_HPP
#define SLENDER_SPECTRAL_HPP

#include <Eigen/Dense>

namespace slender {

enum class GridKind { Type1, Type2 };

/**
 * Chebyshev collocation grid on [0,L] with nodes in ascending order.
 * Type1 grids have no endpoint nodes (first-kind points); Type2 grids
 * include both endpoints (Lobatto points). Carries the barycentric
 * weights, the spectral differentiation matrix, and quadrature weights
 * (Fejer for Type1, Clenshaw-Curtis for Type2).
 */
struct ChebGrid {
    int order = 0;
    GridKind kind = GridKind::Type1;
    double length = 0;
    Eigen::VectorXd nodes;   // arclength coordinates, ascending
    Eigen::VectorXd eta;     // rescaled coordinates on [-1,1]
    Eigen::VectorXd bary;    // barycentric weights
    Eigen::VectorXd weights; // quadrature weights, sum to length
    Eigen::MatrixXd diff;    // d/ds on the grid
    Eigen::MatrixXd diff2;   // d^2/ds^2, built directly for accuracy
};

ChebGrid cheb_grid(int order, double length, GridKind kind);

// Row of barycentric interpolation weights evaluating the grid interpolant at s.
Eigen::RowVectorXd interpolation_row(const ChebGrid& grid, double s);

// Matrix resampling grid values onto arbitrary target points (exact for
// polynomials the grid resolves).
Eigen::MatrixXd resampling_matrix(const ChebGrid& grid, const Eigen::VectorXd& targets);
Eigen::MatrixXd resampling_matrix(const ChebGrid& grid, const ChebGrid& target);

// Values -> Chebyshev coefficients (in eta) and back.
Eigen::MatrixXd coefficient_matrix(const ChebGrid& grid);
Eigen::MatrixXd evaluation_matrix(const ChebGrid& grid); // T_k(eta_j)
Eigen::MatrixXd evaluation_matrix(const Eigen::VectorXd& eta, int ncoeff);

// Maps coefficients of p to coefficients of the antiderivative in eta
// with zero constant term; output has one more coefficient than input.
Eigen::MatrixXd antiderivative_matrix(int ncoeff);

// Maps coefficients of p to coefficients of dp/ds for a grid of the given
// length (exact recurrence, well conditioned).
Eigen::MatrixXd derivative_coefficient_matrix(int ncoeff, double length);

/**
 * Quadrature weights for the L2 inner product of two polynomials on the
 * grid: f^T W g integrates f(s).g(s) exactly by upsampling both to a grid
 * of twice the size. W is symmetric positive definite but not diagonal.
 */
Eigen::MatrixXd l2_weight_matrix(const ChebGrid& grid);

// Gauss-Legendre rule with n points on [a,b].
void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

// Expand a scalar nodal operator to act identically on x,y,z components
// stored interleaved (x0,y0,z0,x1,...).
Eigen::MatrixXd expand3(const Eigen::MatrixXd& A);

// Apply a scalar nodal operator to an interleaved vector without forming expand3(A).
Eigen::VectorXd apply_scalar_op(const Eigen::MatrixXd& A, const Eigen::VectorXd& v);

} // namespace slender

#endif
