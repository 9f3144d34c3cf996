#include "slender/saddle.hpp"

#include <cmath>
#include <stdexcept>

namespace slender {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SaddleSolver::SaddleSolver(const DiscretizationOps& ops, const MobilityOperator& mob,
                           const std::vector<FilamentShape>& fibers, double dt)
    : ops_(ops), mob_(mob), dt_(dt), nfib_(int(fibers.size())),
      nx3_(3 * ops.params.Nx()) {
    K_.reserve(nfib_);
    pfac_.reserve(nfib_);
    const auto& pre = mob_.precond_blocks();
    for (int f = 0; f < nfib_; f++) {
        K_.push_back(kinematic_matrix(fibers[f], ops_));
        // per-fiber saddle matrix with the block-diagonal mobility
        MatrixXd S = MatrixXd::Zero(2 * nx3_, 2 * nx3_);
        S.topLeftCorner(nx3_, nx3_) = -pre[f];
        S.topRightCorner(nx3_, nx3_) = K_[f] + dt_ * pre[f] * ops_.bend3 * K_[f];
        S.bottomLeftCorner(nx3_, nx3_) = K_[f].transpose();
        pfac_.emplace_back(S);
    }
}

VectorXd SaddleSolver::K_apply(const VectorXd& alpha) const {
    VectorXd out(nfib_ * nx3_);
    for (int f = 0; f < nfib_; f++)
        out.segment(f * nx3_, nx3_) = K_[f] * alpha.segment(f * nx3_, nx3_);
    return out;
}

VectorXd SaddleSolver::bendK_apply(const VectorXd& alpha) const {
    VectorXd Ka = K_apply(alpha);
    VectorXd out(nfib_ * nx3_);
    for (int f = 0; f < nfib_; f++)
        out.segment(f * nx3_, nx3_) = ops_.bend3 * Ka.segment(f * nx3_, nx3_);
    return out;
}

VectorXd SaddleSolver::apply(const VectorXd& x) const {
    int n = nfib_ * nx3_;
    VectorXd Lambda = x.head(n), alpha = x.tail(n);
    VectorXd Ka = K_apply(alpha);
    VectorXd G(n);
    for (int f = 0; f < nfib_; f++)
        G.segment(f * nx3_, nx3_) =
            dt_ * (ops_.bend3 * Ka.segment(f * nx3_, nx3_)) - Lambda.segment(f * nx3_, nx3_);
    VectorXd out(2 * n);
    out.head(n) = mob_.apply(G) + Ka;
    for (int f = 0; f < nfib_; f++)
        out.segment(n + f * nx3_, nx3_) = K_[f].transpose() * Lambda.segment(f * nx3_, nx3_);
    return out;
}

VectorXd SaddleSolver::precond(const VectorXd& r) const {
    int n = nfib_ * nx3_;
    VectorXd out(2 * n);
    VectorXd rf(2 * nx3_);
    for (int f = 0; f < nfib_; f++) {
        rf.head(nx3_) = r.segment(f * nx3_, nx3_);
        rf.tail(nx3_) = r.segment(n + f * nx3_, nx3_);
        VectorXd xf = pfac_[f].solve(rf);
        out.segment(f * nx3_, nx3_) = xf.head(nx3_);
        out.segment(n + f * nx3_, nx3_) = xf.tail(nx3_);
    }
    return out;
}

SaddleResult SaddleSolver::local_solve(const VectorXd& U_rhs) const {
    int n = nfib_ * nx3_;
    VectorXd b = VectorXd::Zero(2 * n);
    b.head(n) = U_rhs;
    VectorXd x = precond(b);
    SaddleResult res;
    res.Lambda = x.head(n);
    res.alpha = x.tail(n);
    res.iterations = 0;
    res.converged = true;
    return res;
}

SaddleResult SaddleSolver::solve(const VectorXd& U_rhs, double tol, int max_iters,
                                 bool allow_unconverged) const {
    int n = nfib_ * nx3_;
    VectorXd b = VectorXd::Zero(2 * n);
    b.head(n) = U_rhs;

    SaddleResult res;
    double bnorm = b.norm();
    if (bnorm == 0) {
        res.Lambda = VectorXd::Zero(n);
        res.alpha = VectorXd::Zero(n);
        res.converged = true;
        return res;
    }

    // right-preconditioned GMRES without restarts
    int m = std::min(max_iters, 2 * n);
    std::vector<VectorXd> V;
    V.reserve(m + 1);
    MatrixXd H = MatrixXd::Zero(m + 1, m);
    VectorXd cs = VectorXd::Zero(m), sn = VectorXd::Zero(m);
    VectorXd g = VectorXd::Zero(m + 1);
    V.push_back(b / bnorm);
    g(0) = bnorm;

    int j = 0;
    double rel = 1.0;
    for (; j < m; j++) {
        VectorXd w = apply(precond(V[j]));
        for (int i = 0; i <= j; i++) {
            H(i, j) = V[i].dot(w);
            w -= H(i, j) * V[i];
        }
        double hsub = w.norm();
        H(j + 1, j) = hsub;
        if (hsub > 0) V.push_back(w / hsub);

        for (int i = 0; i < j; i++) {
            double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
            H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
            H(i, j) = t;
        }
        double denom = std::hypot(H(j, j), H(j + 1, j));
        cs(j) = H(j, j) / denom;
        sn(j) = H(j + 1, j) / denom;
        H(j, j) = denom;
        H(j + 1, j) = 0;
        g(j + 1) = -sn(j) * g(j);
        g(j) = cs(j) * g(j);

        rel = std::abs(g(j + 1)) / bnorm;
        if (rel < tol || hsub == 0) { // converged or lucky breakdown
            j++;
            break;
        }
    }

    VectorXd y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    VectorXd x = VectorXd::Zero(2 * n);
    for (int i = 0; i < j; i++) x += y(i) * V[i];
    x = precond(x);

    res.iterations = j;
    res.residual = rel;
    res.converged = rel < tol;
    if (!res.converged && !allow_unconverged)
        throw std::runtime_error("saddle solve stagnated: residual " + std::to_string(rel) +
                                 " after " + std::to_string(j) + " iterations");
    res.Lambda = x.head(n);
    res.alpha = x.tail(n);
    return res;
}

} // namespace slender
