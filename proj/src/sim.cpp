#include "slender/sim.hpp"

#include "slender/network.hpp"
#include "slender/stepper.hpp"
#include "slender/sterics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace slender {

using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

// substream purposes 0..2 are used inside the stepper
constexpr int kGillespiePurpose = 3;
constexpr int kInitPurpose = 100;

Vector3d random_unit(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double z = 2.0 * uni(rng) - 1.0;
    double phi = 2.0 * M_PI * uni(rng);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

} // namespace

std::vector<FilamentShape> initial_fibers(const SimConfig& cfg, const DiscretizationOps& ops) {
    int N = cfg.fil.N;
    std::vector<FilamentShape> fibers;
    if (cfg.preset == "sedimentation") {
        // parallel straight fibers along x, stacked vertically in the xz plane
        double sep = cfg.init_separation > 0 ? cfg.init_separation : cfg.fil.L / 2.0;
        for (int f = 0; f < cfg.nfibers; f++) {
            Eigen::Matrix3Xd tau = Vector3d::UnitX().replicate(1, N);
            fibers.push_back(make_shape(tau, Vector3d(0, 0, f * sep), ops));
        }
        return fibers;
    }
    // straight fibers, orientations uniform on the sphere, midpoints
    // uniform in the periodic cell (or an L-sized box in free space)
    auto rng = substream(cfg.step.seed, 0, kInitPurpose);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double box = cfg.domain.periodic ? cfg.domain.Ld : cfg.fil.L;
    for (int f = 0; f < cfg.nfibers; f++) {
        Eigen::Matrix3Xd tau = random_unit(rng).replicate(1, N);
        Vector3d mp(box * uni(rng), box * uni(rng), box * uni(rng));
        fibers.push_back(make_shape(tau, mp, ops));
    }
    return fibers;
}

SimResult run_simulation(const SimConfig& cfg, const std::string& output_dir) {
    DiscretizationOps ops = build_discretization(cfg.fil);
    MobilityOperator mob(ops, cfg.mob, cfg.domain);

    StepperConfig sc = cfg.step;
    sc.dt = cfg.resolved_dt();
    Stepper stepper(ops, mob, sc);

    std::vector<FilamentShape> fibers = initial_fibers(cfg, ops);
    CrossLinkNetwork net(cfg.nfibers, cfg.cl.Ncl);
    StericParams sp = cfg.steric_params();

    int Nx = cfg.fil.Nx();
    long nsteps = cfg.resolved_steps();

    SimResult result;
    std::unique_ptr<TrajectoryWriter> writer;
    if (!output_dir.empty()) {
        std::filesystem::create_directories(output_dir);
        result.trajectory_path = output_dir + "/trajectory.bin";
        result.manifest_path = output_dir + "/manifest.txt";
        TrajectoryHeader hdr;
        hdr.nfibers = cfg.nfibers;
        hdr.N = cfg.fil.N;
        hdr.L = cfg.fil.L;
        hdr.a = cfg.fil.a;
        hdr.kappa = cfg.fil.kappa;
        hdr.mu = cfg.fil.mu;
        writer = std::make_unique<TrajectoryWriter>(result.trajectory_path, hdr);
        std::ofstream manifest(result.manifest_path);
        manifest << "# run manifest\nformat_version = 1\n" << serialize_config(cfg);
    }

    // configuration-independent gravity contribution, one fiber
    VectorXd grav_block = VectorXd::Zero(3 * Nx);
    if (cfg.gravity != 0) {
        VectorXd density = VectorXd::Zero(3 * Nx);
        for (int k = 0; k < Nx; k++) density(3 * k + 2) = -cfg.gravity;
        grav_block = apply_scalar_op(ops.W, density);
    }

    // diagnostics accumulated since the previous stored frame
    std::int64_t newton_failures = 0, contacts = 0;

    auto capture = [&](double time) {
        TrajectoryFrame fr;
        fr.time = time;
        for (const auto& fib : fibers) {
            fr.tau.push_back(fib.tau);
            fr.midpoint.push_back(fib.midpoint);
        }
        fr.gmres_iterations = stepper.stats().iterations;
        fr.newton_failures = newton_failures;
        fr.contacts = contacts;
        if (cfg.crosslinks_on) {
            fr.cl_state.assign(net.state.begin(), net.state.end());
            for (auto [p, q] : net.links)
                fr.cl_links.push_back({std::int32_t(p), std::int32_t(q)});
        }
        result.frames.push_back(fr);
        if (writer) writer->append(fr);
        newton_failures = 0;
        contacts = 0;
    };

    capture(0.0);
    for (long s = 0; s < nsteps; s++) {
        if (cfg.crosslinks_on) {
            auto rng = substream(cfg.step.seed, s, kGillespiePurpose);
            gillespie_update(net, fibers, ops, sc.dt, rng, cfg.domain, cfg.cl);
        }

        VectorXd Fext = VectorXd::Zero(3 * Nx * cfg.nfibers);
        if (cfg.gravity != 0)
            for (int f = 0; f < cfg.nfibers; f++)
                Fext.segment(3 * Nx * f, 3 * Nx) = grav_block;
        if (cfg.sterics_on) {
            StericForces st = segment_steric_forces(fibers, ops, cfg.domain, sp);
            for (int f = 0; f < cfg.nfibers; f++)
                Fext.segment(3 * Nx * f, 3 * Nx) += st.force[f];
            newton_failures += st.diag.newton_aborts + st.diag.newton_maxiters;
            contacts += st.diag.intervals;
        }
        if (cfg.crosslinks_on) {
            auto Fcl = crosslink_forces(net, fibers, ops, cfg.domain, cfg.cl);
            for (int f = 0; f < cfg.nfibers; f++)
                Fext.segment(3 * Nx * f, 3 * Nx) += Fcl[f];
        }

        try {
            stepper.step(fibers, Fext);
        } catch (const std::exception& e) {
            result.aborted = true;
            result.error = e.what();
            break;
        }
        result.steps_completed = s + 1;
        if ((s + 1) % cfg.output_every == 0 || s + 1 == nsteps) capture((s + 1) * sc.dt);
    }
    return result;
}

} // namespace slender
