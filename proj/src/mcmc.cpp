#include "slender/mcmc.hpp"

#include <cmath>

namespace slender {

using Eigen::Matrix3Xd;
using Eigen::Vector3d;
using Eigen::VectorXd;

double end_to_end_distance(const FilamentShape& shape, const DiscretizationOps& ops) {
    int Nx = ops.params.Nx();
    return (shape.X.segment<3>(3 * (Nx - 1)) - shape.X.segment<3>(0)).norm();
}

namespace {

double bend_energy_tau(const Matrix3Xd& tau, const DiscretizationOps& ops) {
    return bending_energy(positions(tau, Vector3d::Zero(), ops), ops);
}

Vector3d rotate_about(const Vector3d& t, const Vector3d& axis, double angle) {
    Vector3d u = axis.normalized();
    Vector3d r = t * std::cos(angle) + u.cross(t) * std::sin(angle) +
                 u * (u.dot(t)) * (1.0 - std::cos(angle));
    return r.normalized();
}

} // namespace

std::vector<FilamentShape> mcmc_equilibrium_sampler(const DiscretizationOps& ops, double kBT,
                                                    int nsamples, std::mt19937_64& rng,
                                                    MCMCStats* stats) {
    const int N = ops.params.N;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, N - 1);
    std::normal_distribution<double> gauss;

    Matrix3Xd tau(3, N);
    tau.colwise() = Vector3d::UnitX();
    double E = bend_energy_tau(tau, ops);

    double sigma = 0.3;
    auto sweep = [&](bool adapt) {
        int acc = 0;
        for (int k = 0; k < N; k++) {
            int p = pick(rng);
            Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
            if (axis.norm() < 1e-12) continue;
            Vector3d old = tau.col(p);
            tau.col(p) = rotate_about(old, axis, sigma * gauss(rng));
            double En = bend_energy_tau(tau, ops);
            bool take = kBT > 0 ? (En <= E || uni(rng) < std::exp((E - En) / kBT)) : (En <= E);
            if (take) {
                E = En;
                acc++;
            } else {
                tau.col(p) = old;
            }
        }
        if (adapt) {
            double rate = double(acc) / N;
            sigma = std::clamp(sigma * std::exp(0.5 * (rate - 0.3)), 1e-4, 1.5);
        }
        return acc;
    };

    // burn-in with step-size adaptation toward ~30% acceptance
    int burnin = 2000;
    for (int s = 0; s < burnin; s++) sweep(true);

    // pilot run: integrated autocorrelation of the end-to-end distance
    int npilot = 2000;
    VectorXd e2e(npilot);
    for (int s = 0; s < npilot; s++) {
        sweep(false);
        e2e(s) = (positions(tau, Vector3d::Zero(), ops).tail<3>() -
                  positions(tau, Vector3d::Zero(), ops).head<3>())
                     .norm();
    }
    double mean = e2e.mean();
    VectorXd d = e2e.array() - mean;
    double var = d.squaredNorm() / npilot;
    double tau_int = 0.5;
    if (var > 0)
        for (int lag = 1; lag < npilot / 4; lag++) {
            double c = d.head(npilot - lag).dot(d.tail(npilot - lag)) / ((npilot - lag) * var);
            if (c <= 0) break;
            tau_int += c;
        }
    int thin = std::max(1, int(std::ceil(2.0 * tau_int)));

    std::vector<FilamentShape> samples;
    samples.reserve(nsamples);
    long acc = 0, tot = 0;
    for (int s = 0; s < nsamples; s++) {
        for (int t = 0; t < thin; t++) {
            acc += sweep(false);
            tot += N;
        }
        samples.push_back(make_shape(tau, Vector3d::Zero(), ops));
    }

    if (stats) {
        stats->sigma = sigma;
        stats->acceptance = tot ? double(acc) / tot : 0.0;
        stats->autocorr_time = tau_int;
        stats->thin = thin;
    }
    return samples;
}

} // namespace slender
