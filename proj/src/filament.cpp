#include "slender/filament.hpp"

#include <cmath>
#include <stdexcept>

namespace slender {

using Eigen::Matrix3d;
using Eigen::Matrix3Xd;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

double FilamentParams::ahat() const {
    return std::exp(1.5) / 4.0 * a;
}

DiscretizationOps build_discretization(const FilamentParams& params) {
    if (params.N < 4) throw std::invalid_argument("build_discretization: N must be >= 4");
    if (params.eps() >= 1.0) throw std::invalid_argument("build_discretization: aspect ratio must be < 1");
    DiscretizationOps ops;
    ops.params = params;
    int N = params.N, Nx = params.Nx();
    double L = params.L;
    ops.tau_grid = cheb_grid(N, L, GridKind::Type1);
    ops.x_grid = cheb_grid(Nx, L, GridKind::Type2);

    // tau values -> coefficients -> antiderivative coefficients -> values on
    // the position grid, anchored so the interpolant at s = L/2 is zero
    MatrixXd C1 = coefficient_matrix(ops.tau_grid);
    MatrixXd A = antiderivative_matrix(N); // (N+1) x N
    MatrixXd V2 = evaluation_matrix(ops.x_grid.eta, N + 1);
    Eigen::RowVectorXd v0 = evaluation_matrix(VectorXd::Zero(1), N + 1);
    ops.xmap_tau = (L / 2.0) * (V2 - VectorXd::Ones(Nx) * v0) * A * C1;

    ops.xmap = MatrixXd::Zero(3 * Nx, 3 * (N + 1));
    ops.xmap.leftCols(3 * N) = expand3(ops.xmap_tau);
    for (int j = 0; j < Nx; j++)
        ops.xmap.block<3, 3>(3 * j, 3 * N) = Matrix3d::Identity();
    ops.xmap_lu.compute(ops.xmap);

    ops.coeff = coefficient_matrix(ops.x_grid);
    ops.W = l2_weight_matrix(ops.x_grid);
    ops.Winv = ops.W.inverse();
    Eigen::SelfAdjointEigenSolver<MatrixXd> wes(ops.W);
    ops.Wsqrt = wes.operatorSqrt();

    // bending matrix assembled in coefficient space: second derivative by the
    // exact recurrence, then L2 quadrature on the doubled grid
    ChebGrid fine = cheb_grid(2 * Nx, L, GridKind::Type2);
    MatrixXd Dc = derivative_coefficient_matrix(Nx, L);
    MatrixXd U = evaluation_matrix(fine.eta, Nx) * Dc * Dc * ops.coeff;
    // the second derivative annihilates affine functions analytically; compose
    // with an exact affine projector so straight shapes carry zero force in
    // floating point as well
    MatrixXd Q(Nx, 2);
    Q.col(0) = VectorXd::Ones(Nx);
    Q.col(1) = ops.x_grid.nodes;
    Eigen::HouseholderQR<MatrixXd> qr(Q);
    MatrixXd Qo = qr.householderQ() * MatrixXd::Identity(Nx, 2);
    U = U * (MatrixXd::Identity(Nx, Nx) - Qo * Qo.transpose());
    ops.bend_u = fine.weights.cwiseSqrt().asDiagonal() * U;
    ops.bend = params.kappa * ops.bend_u.transpose() * ops.bend_u;
    ops.bend3 = expand3(ops.bend);
    Eigen::SelfAdjointEigenSolver<MatrixXd> bes(ops.bend3);
    VectorXd ev = bes.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    ops.bend3_sqrt = bes.eigenvectors() * ev.asDiagonal() * bes.eigenvectors().transpose();
    return ops;
}

VectorXd positions(const Matrix3Xd& tau, const Vector3d& midpoint, const DiscretizationOps& ops) {
    int Nx = ops.params.Nx();
    VectorXd X(3 * Nx);
    Eigen::Map<Matrix3Xd> Xm(X.data(), 3, Nx);
    Xm = tau * ops.xmap_tau.transpose();
    Xm.colwise() += midpoint;
    return X;
}

FilamentShape make_shape(const Matrix3Xd& tau, const Vector3d& midpoint, const DiscretizationOps& ops) {
    FilamentShape s;
    s.tau = tau;
    s.midpoint = midpoint;
    s.X = positions(tau, midpoint, ops);
    return s;
}

FilamentShape shape_from_positions(const VectorXd& X, const DiscretizationOps& ops) {
    VectorXd tm = ops.xmap_lu.solve(X);
    FilamentShape s;
    int N = ops.params.N;
    s.tau = Eigen::Map<const Matrix3Xd>(tm.data(), 3, N);
    s.midpoint = tm.segment<3>(3 * N);
    s.X = X;
    return s;
}

// Energy and force go through the factored operator stepwise; this keeps
// affine (zero curvature) shapes at exactly zero force despite the large
// norm of the assembled bending matrix.
double bending_energy(const VectorXd& X, const DiscretizationOps& ops) {
    return 0.5 * ops.params.kappa * apply_scalar_op(ops.bend_u, X).squaredNorm();
}

VectorXd bending_force(const VectorXd& X, const DiscretizationOps& ops) {
    VectorXd y = apply_scalar_op(ops.bend_u, X);
    return -ops.params.kappa * apply_scalar_op(ops.bend_u.transpose(), y);
}

namespace {
Matrix3d cross_matrix(const Vector3d& t) {
    Matrix3d C;
    C << 0, -t.z(), t.y(),
         t.z(), 0, -t.x(),
         -t.y(), t.x(), 0;
    return C;
}
} // namespace

MatrixXd kinematic_matrix(const FilamentShape& shape, const DiscretizationOps& ops) {
    int N = ops.params.N, Nx = ops.params.Nx();
    for (int p = 0; p < N; p++)
        if (std::abs(shape.tau.col(p).norm() - 1.0) > 1e-6)
            throw std::runtime_error("kinematic_matrix: tangent vector is not unit length");
    MatrixXd K(3 * Nx, 3 * (N + 1));
    for (int p = 0; p < N; p++) {
        Matrix3d mC = -cross_matrix(shape.tau.col(p));
        K.middleCols(3 * p, 3) = ops.xmap.middleCols(3 * p, 3) * mC;
    }
    K.rightCols(3) = ops.xmap.rightCols(3);
    return K;
}

FilamentShape rotate_and_integrate(const FilamentShape& shape, const VectorXd& alpha_dt,
                                   const DiscretizationOps& ops) {
    int N = ops.params.N;
    if (alpha_dt.size() != 3 * (N + 1))
        throw std::invalid_argument("rotate_and_integrate: alpha size mismatch");
    Matrix3Xd tau(3, N);
    for (int p = 0; p < N; p++) {
        Vector3d om = alpha_dt.segment<3>(3 * p);
        double th = om.norm();
        Vector3d t = shape.tau.col(p);
        if (th < 1e-8) {
            // series branch: sin(th)/th ~ 1 - th^2/6, (1-cos)/th^2 ~ 1/2
            Vector3d oxt = om.cross(t);
            tau.col(p) = t + (1.0 - th * th / 6.0) * oxt + 0.5 * om.cross(oxt);
        } else {
            Vector3d axis = om / th;
            tau.col(p) = t * std::cos(th) + axis.cross(t) * std::sin(th) +
                         axis * (axis.dot(t)) * (1.0 - std::cos(th));
        }
        double n = tau.col(p).norm();
        if (std::abs(n - 1.0) > 1e-10)
            throw std::runtime_error("rotate_and_integrate: unit tangent drift exceeds tolerance");
        tau.col(p) /= n;
    }
    return make_shape(tau, shape.midpoint + alpha_dt.segment<3>(3 * N), ops);
}

} // namespace slender
