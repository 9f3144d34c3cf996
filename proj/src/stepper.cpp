#include "slender/stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace slender {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::mt19937_64 substream(unsigned long long seed, long step, int purpose) {
    auto mix = [](unsigned long long z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    unsigned long long h = mix(seed ^ mix((unsigned long long)(step) ^ mix((unsigned long long)(purpose))));
    return std::mt19937_64(h);
}

namespace {

VectorXd randn(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    VectorXd v(n);
    for (int k = 0; k < n; k++) v(k) = gauss(rng);
    return v;
}

// RNG purposes; distinct constants keep substreams independent
enum Purpose { BrownianNoise = 0, RFDNoise = 1, BendingNoise = 2 };

} // namespace

Stepper::Stepper(const DiscretizationOps& ops, MobilityOperator& mob, const StepperConfig& cfg)
    : ops_(ops), mob_(mob), cfg_(cfg), Wsqrt3_(expand3(ops.Wsqrt)) {
    if (cfg_.scheme == Scheme::Brownian && cfg_.kBT > 0) mob_.set_need_noise(true);
}

void Stepper::reset(long step) {
    step_ = step;
    have_lambda_ = false;
    stats_ = StepStats{};
}

VectorXd Stepper::bending_forces(const std::vector<FilamentShape>& fibers) const {
    int n3 = 3 * ops_.params.Nx();
    VectorXd F(n3 * fibers.size());
    for (size_t f = 0; f < fibers.size(); f++)
        F.segment(f * n3, n3) = bending_force(fibers[f].X, ops_);
    return F;
}

void Stepper::advance(std::vector<FilamentShape>& fibers, const VectorXd& alpha,
                      double dt) const {
    int n3 = 3 * ops_.params.Nx();
    for (size_t f = 0; f < fibers.size(); f++)
        fibers[f] = rotate_and_integrate(fibers[f], dt * alpha.segment(f * n3, n3), ops_);
}

VectorXd Stepper::K_pinv_apply(const SaddleSolver& sys, const VectorXd& U) const {
    int n3 = 3 * ops_.params.Nx();
    int nf = int(U.size()) / n3;
    VectorXd alpha(U.size());
    for (int f = 0; f < nf; f++) {
        Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Wsqrt3_ * sys.K(f));
        alpha.segment(f * n3, n3) = cod.solve(Wsqrt3_ * U.segment(f * n3, n3));
    }
    return alpha;
}

void Stepper::step(std::vector<FilamentShape>& fibers, const VectorXd& Fext) {
    stats_ = StepStats{};
    switch (cfg_.scheme) {
    case Scheme::DeterministicFull:
        deterministic_step(fibers, Fext);
        break;
    case Scheme::DeterministicLagged:
        lagged_step(fibers, Fext);
        break;
    case Scheme::Brownian:
        if (cfg_.kBT > 0)
            brownian_step(fibers, Fext);
        else
            deterministic_step(fibers, Fext);
        break;
    }
    step_++;
}

void Stepper::deterministic_step(std::vector<FilamentShape>& fibers, const VectorXd& Fext) {
    mob_.update(fibers);
    SaddleSolver sys(ops_, mob_, fibers, cfg_.dt);
    VectorXd rhs = mob_.apply(Fext + bending_forces(fibers));
    SaddleResult res = sys.solve(rhs, cfg_.gmres_tol, cfg_.gmres_max_iters);
    stats_.iterations = res.iterations;
    stats_.residual = res.residual;
    advance(fibers, res.alpha, cfg_.dt);
    lambda_prev_ = res.Lambda;
    have_lambda_ = true;
}

void Stepper::lagged_step(std::vector<FilamentShape>& fibers, const VectorXd& Fext) {
    if (!have_lambda_) {
        // no force history at the first step: take a fully implicit one
        deterministic_step(fibers, Fext);
        stats_.lagged_fallback = true;
        return;
    }
    mob_.update(fibers);
    SaddleSolver sys(ops_, mob_, fibers, cfg_.dt);
    int n3 = 3 * ops_.params.Nx();

    const auto& pre = mob_.precond_blocks();
    auto nonlocal = [&](const VectorXd& v) {
        VectorXd out = mob_.apply(v);
        for (size_t f = 0; f < fibers.size(); f++)
            out.segment(f * n3, n3) -= pre[f] * v.segment(f * n3, n3);
        return out;
    };

    // locally implicit solve with the time-lagged nonlocal force
    VectorXd rhs1 = mob_.apply(Fext + bending_forces(fibers)) + nonlocal(lambda_prev_);
    SaddleResult base = sys.local_solve(rhs1);

    // residual correction, iteration-capped
    VectorXd rhs2 = nonlocal(base.Lambda - lambda_prev_ - cfg_.dt * sys.bendK_apply(base.alpha));
    SaddleResult corr = sys.solve(rhs2, cfg_.gmres_tol, cfg_.lagged_cap, true);
    stats_.iterations = corr.iterations;
    stats_.residual = corr.residual;

    VectorXd alpha = base.alpha + corr.alpha;
    lambda_prev_ = base.Lambda + corr.Lambda;
    have_lambda_ = true;
    advance(fibers, alpha, cfg_.dt);
}

void Stepper::brownian_step(std::vector<FilamentShape>& fibers, const VectorXd& Fext) {
    const double dt = cfg_.dt, kBT = cfg_.kBT;
    const double L = ops_.params.L;
    int n3 = 3 * ops_.params.Nx();
    int n = int(fibers.size()) * n3;

    mob_.update(fibers);
    SaddleSolver sys_n(ops_, mob_, fibers, dt);
    VectorXd Fb = bending_forces(fibers);

    // Brownian velocity with covariance (2 kBT / dt) M
    auto rng_b = substream(cfg_.seed, step_, BrownianNoise);
    VectorXd eta = randn(mob_.noise_size(), rng_b);
    VectorXd U_B = std::sqrt(2.0 * kBT / dt) * mob_.noise_velocity(eta);

    // bending-noise correction at the start-of-step mobility
    auto rng_t = substream(cfg_.seed, step_, BendingNoise);
    VectorXd eta_t = randn(n, rng_t);
    VectorXd Lhalf_eta(n);
    for (size_t f = 0; f < fibers.size(); f++)
        Lhalf_eta.segment(f * n3, n3) = ops_.bend3_sqrt * eta_t.segment(f * n3, n3);
    VectorXd U_MBE = std::sqrt(kBT) * mob_.apply(Lhalf_eta);

    VectorXd alpha_star = K_pinv_apply(sys_n, U_B);

    // drift term: both variants estimate kBT div M
    VectorXd U_MD;
    VectorXd v_dense, Mn_v;
    if (cfg_.drift == DriftMode::Dense) {
        if (mob_.config().mode != MobilityMode::LocalOnly)
            throw std::logic_error("dense drift needs the block-diagonal mobility");
        v_dense = mob_.inv_sqrt_apply(eta);
        Mn_v = mob_.apply(v_dense);
    } else {
        auto rng_r = substream(cfg_.seed, step_, RFDNoise);
        VectorXd eta_r = randn(n, rng_r);
        VectorXd Mn_eta = mob_.apply(eta_r);
        VectorXd alpha_r = K_pinv_apply(sys_n, eta_r);
        std::vector<FilamentShape> rfd = fibers;
        advance(rfd, alpha_r, cfg_.rfd_delta * L);
        mob_.update(rfd);
        U_MD = kBT / (cfg_.rfd_delta * L) * (mob_.apply(eta_r) - Mn_eta);
    }

    // midpoint configuration and mobility
    std::vector<FilamentShape> mid = fibers;
    advance(mid, alpha_star, dt / 2.0);
    mob_.update(mid);
    if (cfg_.drift == DriftMode::Dense)
        U_MD = std::sqrt(2.0 * kBT / dt) * (mob_.apply(v_dense) - Mn_v);

    SaddleSolver sys(ops_, mob_, mid, dt);
    VectorXd rhs = mob_.apply(Fext + Fb) + U_B + U_MBE + U_MD;
    SaddleResult res = sys.solve(rhs, cfg_.gmres_tol, cfg_.gmres_max_iters);
    stats_.iterations = res.iterations;
    stats_.residual = res.residual;

    advance(fibers, res.alpha, dt);
    lambda_prev_ = res.Lambda;
    have_lambda_ = true;
}

} // namespace slender
