#ifndef SLENDER_RPY_HPP
#define SLENDER_RPY_HPP

#include "slender/domain.hpp"

#include <Eigen/Dense>

namespace slender {

// Regularized RPY pair mobility; finite for all separations and continuous
// at R = 2*ahat. rpy_kernel uses the displacement x - y.
Eigen::Matrix3d rpy_kernel_disp(const Eigen::Vector3d& r, double ahat, double mu);
Eigen::Matrix3d rpy_kernel(const Eigen::Vector3d& x, const Eigen::Vector3d& y, double ahat, double mu);

// Direct O(P^2) grand RPY product U_i = sum_j M(x_i, x_j) F_j over all points
// (minimum image on periodic domains). Points and forces interleaved.
Eigen::VectorXd grand_rpy_apply(const Eigen::MatrixX3d& pts, const Eigen::VectorXd& F,
                                double ahat, double mu, const Domain& dom);

// Dense grand RPY matrix for a set of points (used for square roots and
// small reference computations).
Eigen::MatrixXd grand_rpy_matrix(const Eigen::MatrixX3d& pts, double ahat, double mu,
                                 const Domain& dom);

} // namespace slender

#endif
