#ifndef SLENDER_SELFQUAD_HPP
#define SLENDER_SELFQUAD_HPP

#include "slender/spectral.hpp"

#include <vector>

#include <Eigen/Dense>

namespace slender {

/**
 * Precomputed tables for the special self-interaction quadrature on one
 * grid/radius pair: singularity-subtraction log coefficients, precomputed
 * Chebyshev moments over the split domain (exact antiderivatives for the
 * Stokeslet, adaptive quadrature for the doublet), their contraction with
 * the coefficient transform, and Gauss-Legendre panels for the near region
 * |s - s'| < 2*ahat. The outer panels on 2*ahat < |s - s'| < 6*ahat patch
 * up the kernel where a bent, non-unit-speed shape brings points within
 * the overlap distance even though they are outside the near region in
 * arclength.
 */
struct SelfQuadTables {
    double ahat = 0;
    double L = 0;
    int Nx = 0;
    int N2 = 8;
    Eigen::VectorXd aS, aD; // per-node inner (subtracted) integrals
    Eigen::MatrixXd qS, qD; // row p: moments q_k at node p
    Eigen::MatrixXd RS, RD; // contraction of moments with the coefficient transform
    struct LocalPanel {
        Eigen::MatrixXd interp; // rows interpolate grid values to the GL nodes
        Eigen::VectorXd w;
    };
    std::vector<LocalPanel> local; // per node, |s - s'| < 2*ahat
    std::vector<LocalPanel> outer; // per node, branch-mismatch correction zone
};

// N2 is the total GL count for the near region (N2/2 per side); the
// scheme needs 4 points for eps < 1e-3 and 8 otherwise.
int default_local_points(double eps);

SelfQuadTables precompute_q_tables(const ChebGrid& xgrid, double ahat, int N2);

// Velocity from the self RPY integral for one fiber: positions X and force
// density f at the collocation nodes, both interleaved 3Nx vectors.
Eigen::VectorXd self_special_quadrature(const Eigen::VectorXd& X, const Eigen::VectorXd& f,
                                        const ChebGrid& xgrid, const SelfQuadTables& tables,
                                        double mu);

// Dense matrix of the same linear map acting on force densities.
Eigen::MatrixXd self_quadrature_matrix(const Eigen::VectorXd& X, const ChebGrid& xgrid,
                                       const SelfQuadTables& tables, double mu);

} // namespace slender

#endif
