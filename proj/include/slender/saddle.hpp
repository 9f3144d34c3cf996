#ifndef SLENDER_SADDLE_HPP
#define SLENDER_SADDLE_HPP

#include "slender/mobility.hpp"

#include <vector>

namespace slender {

/** Outcome of one saddle-point solve. */
struct SaddleResult {
    Eigen::VectorXd Lambda; // constraint forces, 3Nx per fiber
    Eigen::VectorXd alpha;  // rotation rates + midpoint velocity, 3Nx per fiber
    int iterations = 0;
    double residual = 0; // relative preconditioned residual
    bool converged = false;
};

/**
 * The linearized backward Euler saddle-point system
 *
 *   -M Lambda + (K + dt M L K) alpha = U_rhs,   K^T Lambda = 0,
 *
 * where M is the fiber mobility, K the kinematic matrix, and L the
 * bending operator. Solved by right-preconditioned GMRES; the
 * preconditioner is the same system with M replaced by its
 * block-diagonal part, inverted per fiber by a complete orthogonal
 * decomposition (K is rank deficient, so the pseudo-inverse picks the
 * minimum-norm rotation rates).
 */
class SaddleSolver {
public:
    SaddleSolver(const DiscretizationOps& ops, const MobilityOperator& mob,
                 const std::vector<FilamentShape>& fibers, double dt);

    // max_iters caps GMRES; when allow_unconverged the capped iterate is
    // returned (time-lagged correction solves), otherwise a runtime_error
    // reports the stagnation.
    SaddleResult solve(const Eigen::VectorXd& U_rhs, double tol = 1e-3, int max_iters = 200,
                       bool allow_unconverged = false) const;

    // the saddle operator on a stacked (Lambda; alpha) vector
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

    // direct solve of the block-diagonal (locally implicit) system
    SaddleResult local_solve(const Eigen::VectorXd& U_rhs) const;

    const Eigen::MatrixXd& K(int fiber) const { return K_[fiber]; }
    // dt L K alpha and K alpha over all fibers
    Eigen::VectorXd K_apply(const Eigen::VectorXd& alpha) const;
    Eigen::VectorXd bendK_apply(const Eigen::VectorXd& alpha) const;

private:
    Eigen::VectorXd precond(const Eigen::VectorXd& r) const;

    const DiscretizationOps& ops_;
    const MobilityOperator& mob_;
    double dt_;
    int nfib_;
    int nx3_; // 3 Nx
    std::vector<Eigen::MatrixXd> K_;
    std::vector<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> pfac_;
};

} // namespace slender

#endif
