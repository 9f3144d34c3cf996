#include "slender/mobility.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slender {

using Eigen::MatrixX3d;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd clamp_eigenvalues(const MatrixXd& A, double floor, MatrixXd* sqrt_out = nullptr,
                           MatrixXd* inv_sqrt_out = nullptr) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
    VectorXd ev = es.eigenvalues().cwiseMax(floor);
    const MatrixXd& V = es.eigenvectors();
    if (sqrt_out) *sqrt_out = V * ev.cwiseSqrt().asDiagonal() * V.transpose();
    if (inv_sqrt_out) *inv_sqrt_out = V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
    return V * ev.asDiagonal() * V.transpose();
}

} // namespace

MobilityOperator::MobilityOperator(const DiscretizationOps& ops, const MobilityConfig& cfg,
                                   const Domain& dom)
    : ops_(ops), cfg_(cfg), dom_(dom) {
    const FilamentParams& p = ops.params;
    Winv3_ = expand3(ops.Winv);
    if (cfg_.N2 == 0) cfg_.N2 = default_local_points(p.eps());
    tables_ = precompute_q_tables(ops.x_grid, p.ahat(), cfg_.N2);
    if (cfg_.mode == MobilityMode::FatCorrected) {
        if (cfg_.epshat_star < p.epshat())
            throw std::invalid_argument("MobilityOperator: fattened aspect ratio below the true one");
        tables_star_ = precompute_q_tables(ops.x_grid, cfg_.epshat_star * p.L, cfg_.N2);
    }
    if (cfg_.mode != MobilityMode::LocalOnly) {
        // the SPD noise splitting needs a resolved fattened self term; the
        // plain oversampled mode may deliberately under-resolve
        if (cfg_.mode == MobilityMode::FatCorrected && cfg_.Nu < p.Nx())
            throw std::invalid_argument("MobilityOperator: Nu must be at least Nx");
        if (cfg_.Nu < 2) throw std::invalid_argument("MobilityOperator: Nu must be at least 2");
        ugrid_ = cheb_grid(cfg_.Nu, p.L, GridKind::Type2);
        Eu_ = resampling_matrix(ops.x_grid, ugrid_);
        proj_ = ops.Winv * Eu_.transpose() * ugrid_.weights.asDiagonal();
    }
}

double MobilityOperator::lambda_floor() const {
    const FilamentParams& p = ops_.params;
    return cfg_.lambda_star / (8.0 * std::numbers::pi * p.mu * p.L);
}

MatrixXd MobilityOperator::local_sqs(const VectorXd& X, const SelfQuadTables& t) const {
    MatrixXd MW = self_quadrature_matrix(X, ops_.x_grid, t, ops_.params.mu) * Winv3_;
    MatrixXd sym = 0.5 * (MW + MW.transpose());
    if (!cfg_.truncate) return sym;
    return clamp_eigenvalues(sym, lambda_floor());
}

MatrixXd MobilityOperator::oversampled_self_block(const MatrixX3d& pts, double ahat) const {
    Domain free; // self term never wraps around the box
    MatrixXd Mu = grand_rpy_matrix(pts, ahat, ops_.params.mu, free);
    MatrixXd P = expand3(proj_);
    return P * Mu * P.transpose();
}

void MobilityOperator::update(const std::vector<FilamentShape>& fibers) {
    const FilamentParams& p = ops_.params;
    nfib_ = int(fibers.size());
    int Nx = p.Nx();
    fib_.assign(nfib_, {});
    precond_.assign(nfib_, MatrixXd());
    double floor = lambda_floor();

    if (cfg_.mode != MobilityMode::LocalOnly) {
        upts_.resize(nfib_ * cfg_.Nu, 3);
        for (int i = 0; i < nfib_; i++) {
            Eigen::Map<const Eigen::Matrix3Xd> Xm(fibers[i].X.data(), 3, Nx);
            upts_.middleRows(i * cfg_.Nu, cfg_.Nu) = (Xm * Eu_.transpose()).transpose();
        }
    }

    for (int i = 0; i < nfib_; i++) {
        FiberLocal& fl = fib_[i];
        switch (cfg_.mode) {
        case MobilityMode::LocalOnly: {
            MatrixXd MW = self_quadrature_matrix(fibers[i].X, ops_.x_grid, tables_, p.mu) * Winv3_;
            fl.sqs = clamp_eigenvalues(0.5 * (MW + MW.transpose()), floor,
                                       need_noise_ ? &fl.noise_sqrt : nullptr,
                                       need_noise_ ? &fl.inv_sqrt : nullptr);
            precond_[i] = fl.sqs;
            break;
        }
        case MobilityMode::Oversampled:
            precond_[i] = local_sqs(fibers[i].X, tables_);
            break;
        case MobilityMode::FirstKind:
            fl.sqs = local_sqs(fibers[i].X, tables_);
            fl.os_self = oversampled_self_block(upts_.middleRows(i * cfg_.Nu, cfg_.Nu), p.ahat());
            precond_[i] = fl.sqs;
            break;
        case MobilityMode::FatCorrected:
            fl.sqs = local_sqs(fibers[i].X, tables_);
            fl.sqs_star = local_sqs(fibers[i].X, tables_star_);
            if (need_noise_)
                clamp_eigenvalues(fl.sqs - fl.sqs_star, floor, &fl.noise_sqrt);
            precond_[i] = fl.sqs;
            break;
        }
    }

    chol_fallback_ = false;
    grand_sqrt_.resize(0, 0);
    if (need_noise_ && cfg_.mode != MobilityMode::LocalOnly) {
        if (cfg_.mode == MobilityMode::FirstKind)
            throw std::logic_error("MobilityOperator: the first-kind mobility has no noise model");
        double ahat = cfg_.mode == MobilityMode::FatCorrected ? cfg_.epshat_star * p.L : p.ahat();
        MatrixXd Mu = grand_rpy_matrix(upts_, ahat, p.mu, dom_);
        Eigen::LLT<MatrixXd> llt(Mu);
        if (llt.info() == Eigen::Success) {
            grand_sqrt_ = llt.matrixL();
        } else {
            // minimum-image truncation can break positive definiteness in
            // small periodic boxes; fall back to a clamped eigen factor
            chol_fallback_ = true;
            clamp_eigenvalues(Mu, 0.0, &grand_sqrt_);
        }
    }
}

VectorXd MobilityOperator::oversampled_pipeline(const VectorXd& F, double ahat) const {
    const FilamentParams& p = ops_.params;
    int Nx = p.Nx(), Nu = cfg_.Nu;
    VectorXd Fu(3 * nfib_ * Nu);
    for (int i = 0; i < nfib_; i++) {
        VectorXd f = apply_scalar_op(ops_.Winv, F.segment(3 * Nx * i, 3 * Nx));
        VectorXd fu = apply_scalar_op(Eu_, f);
        for (int j = 0; j < Nu; j++)
            Fu.segment<3>(3 * (i * Nu + j)) = ugrid_.weights(j) * fu.segment<3>(3 * j);
    }
    VectorXd Uu = grand_rpy_apply(upts_, Fu, ahat, p.mu, dom_);
    VectorXd U(3 * Nx * nfib_);
    for (int i = 0; i < nfib_; i++)
        U.segment(3 * Nx * i, 3 * Nx) = apply_scalar_op(proj_, Uu.segment(3 * Nu * i, 3 * Nu));
    return U;
}

VectorXd MobilityOperator::apply(const VectorXd& F) const {
    const FilamentParams& p = ops_.params;
    int Nx = p.Nx();
    if (F.size() != 3 * Nx * nfib_) throw std::invalid_argument("MobilityOperator::apply: size mismatch");
    VectorXd U;
    switch (cfg_.mode) {
    case MobilityMode::LocalOnly:
        U.resize(F.size());
        for (int i = 0; i < nfib_; i++)
            U.segment(3 * Nx * i, 3 * Nx) = fib_[i].sqs * F.segment(3 * Nx * i, 3 * Nx);
        return U;
    case MobilityMode::Oversampled:
        return oversampled_pipeline(F, p.ahat());
    case MobilityMode::FirstKind:
        U = oversampled_pipeline(F, p.ahat());
        for (int i = 0; i < nfib_; i++)
            U.segment(3 * Nx * i, 3 * Nx) +=
                (fib_[i].sqs - fib_[i].os_self) * F.segment(3 * Nx * i, 3 * Nx);
        return U;
    case MobilityMode::FatCorrected:
        U = oversampled_pipeline(F, cfg_.epshat_star * p.L);
        for (int i = 0; i < nfib_; i++)
            U.segment(3 * Nx * i, 3 * Nx) +=
                (fib_[i].sqs - fib_[i].sqs_star) * F.segment(3 * Nx * i, 3 * Nx);
        return U;
    }
    return U;
}

std::vector<MatrixXd> MobilityOperator::local_blocks() const {
    const FilamentParams& p = ops_.params;
    std::vector<MatrixXd> out(nfib_);
    for (int i = 0; i < nfib_; i++) {
        switch (cfg_.mode) {
        case MobilityMode::LocalOnly:
        case MobilityMode::FirstKind:
            out[i] = fib_[i].sqs; // FirstKind: BDiag{os} cancels by construction
            break;
        case MobilityMode::Oversampled:
            out[i] = oversampled_self_block(upts_.middleRows(i * cfg_.Nu, cfg_.Nu), p.ahat());
            break;
        case MobilityMode::FatCorrected:
            out[i] = oversampled_self_block(upts_.middleRows(i * cfg_.Nu, cfg_.Nu),
                                            cfg_.epshat_star * p.L) -
                     fib_[i].sqs_star + fib_[i].sqs;
            break;
        }
    }
    return out;
}

int MobilityOperator::noise_size() const {
    int Nx = ops_.params.Nx();
    switch (cfg_.mode) {
    case MobilityMode::LocalOnly:
        return 3 * Nx * nfib_;
    case MobilityMode::Oversampled:
        return 3 * cfg_.Nu * nfib_;
    case MobilityMode::FatCorrected:
        return 3 * cfg_.Nu * nfib_ + 3 * Nx * nfib_;
    default:
        throw std::logic_error("MobilityOperator: no noise model in this mode");
    }
}

VectorXd MobilityOperator::noise_velocity(const VectorXd& W) const {
    if (W.size() != noise_size())
        throw std::invalid_argument("MobilityOperator::noise_velocity: size mismatch");
    const FilamentParams& p = ops_.params;
    int Nx = p.Nx();
    if (cfg_.mode == MobilityMode::LocalOnly) return sqrt_apply(W);
    if (grand_sqrt_.size() == 0)
        throw std::logic_error("MobilityOperator: noise factors not built; set_need_noise before update");
    int Nu = cfg_.Nu;
    VectorXd Uu = grand_sqrt_ * W.head(3 * Nu * nfib_);
    VectorXd U(3 * Nx * nfib_);
    for (int i = 0; i < nfib_; i++)
        U.segment(3 * Nx * i, 3 * Nx) = apply_scalar_op(proj_, Uu.segment(3 * Nu * i, 3 * Nu));
    if (cfg_.mode == MobilityMode::FatCorrected)
        for (int i = 0; i < nfib_; i++)
            U.segment(3 * Nx * i, 3 * Nx) +=
                fib_[i].noise_sqrt * W.segment(3 * Nu * nfib_ + 3 * Nx * i, 3 * Nx);
    return U;
}

VectorXd MobilityOperator::sqrt_apply(const VectorXd& eta) const {
    if (cfg_.mode != MobilityMode::LocalOnly)
        throw std::logic_error("MobilityOperator::sqrt_apply: local mode only");
    int Nx = ops_.params.Nx();
    VectorXd U(3 * Nx * nfib_);
    for (int i = 0; i < nfib_; i++)
        U.segment(3 * Nx * i, 3 * Nx) = fib_[i].noise_sqrt * eta.segment(3 * Nx * i, 3 * Nx);
    return U;
}

VectorXd MobilityOperator::inv_sqrt_apply(const VectorXd& eta) const {
    if (cfg_.mode != MobilityMode::LocalOnly)
        throw std::logic_error("MobilityOperator::inv_sqrt_apply: local mode only");
    int Nx = ops_.params.Nx();
    VectorXd U(3 * Nx * nfib_);
    for (int i = 0; i < nfib_; i++)
        U.segment(3 * Nx * i, 3 * Nx) = fib_[i].inv_sqrt * eta.segment(3 * Nx * i, 3 * Nx);
    return U;
}

} // namespace slender
