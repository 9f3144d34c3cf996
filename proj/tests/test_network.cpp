#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slender/network.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace slender;
using Eigen::Matrix3Xd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double pi = std::numbers::pi;

FilamentParams make_params(int N) {
    FilamentParams p;
    p.L = 2.0;
    p.a = 8e-3;
    p.kappa = 1.0;
    p.mu = 1.0;
    p.N = N;
    return p;
}

FilamentShape straight_shape(const DiscretizationOps& ops, const Vector3d& dir,
                             const Vector3d& mp = Vector3d::Zero()) {
    Matrix3Xd tau(3, ops.params.N);
    tau.colwise() = dir;
    return make_shape(tau, mp, ops);
}

FilamentShape bent_shape(const DiscretizationOps& ops, double amp, double phase,
                         const Vector3d& mp) {
    Matrix3Xd tau(3, ops.params.N);
    for (int q = 0; q < ops.params.N; q++) {
        double th = amp * std::sin(2.0 * pi * ops.tau_grid.nodes(q) / ops.params.L + phase);
        tau.col(q) = Vector3d(std::cos(th), std::sin(th), 0);
    }
    return make_shape(tau, mp, ops);
}

Vector3d total_force(const VectorXd& F) {
    Vector3d s = Vector3d::Zero();
    for (int k = 0; k < F.size() / 3; k++) s += F.segment<3>(3 * k);
    return s;
}

} // namespace

TEST_CASE("binding rate") {
    CLParams cl;
    cl.Kc = 10.0;
    cl.ell_c = 0.05;
    cl.kon_s = 3.0;
    cl.kBT = 0.4;

    CHECK(binding_rate(cl.ell_c, cl) == doctest::Approx(cl.kon_s).epsilon(1e-14));
    // spring energy of one kBT
    double ell1 = cl.ell_c + std::sqrt(2.0 * cl.kBT / cl.Kc);
    CHECK(binding_rate(ell1, cl) == doctest::Approx(cl.kon_s * std::exp(-1.0)).epsilon(1e-12));
    // candidate cutoff sits at two standard deviations
    CHECK(binding_rate(cl.cutoff(), cl) ==
          doctest::Approx(cl.kon_s * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("gillespie update") {
    auto p = make_params(16);
    auto ops = build_discretization(p);
    Domain dom;

    SUBCASE("all rates zero leaves the network unchanged") {
        std::vector<FilamentShape> fibers = {straight_shape(ops, Vector3d::UnitX())};
        CLParams cl;
        cl.Ncl = 8;
        CrossLinkNetwork net(1, cl.Ncl);
        net.state[3] = CrossLinkNetwork::Singly;
        std::mt19937_64 rng(7);
        gillespie_update(net, fibers, ops, 1.0, rng, dom, cl);
        CHECK(net.state[3] == CrossLinkNetwork::Singly);
        CHECK(net.links.empty());
        CHECK(net.valid());
    }

    SUBCASE("first-end attachment matches the exponential law") {
        std::vector<FilamentShape> fibers = {straight_shape(ops, Vector3d::UnitX())};
        CLParams cl;
        cl.Ncl = 16;
        cl.kon = 1.3;
        double dt = 0.4;
        double p_bind = 1.0 - std::exp(-cl.kon * cl.ds(p.L) * dt);

        std::mt19937_64 rng(42);
        long trials = 0, bound = 0;
        for (int rep = 0; rep < 100000 / cl.Ncl + 1; rep++) {
            CrossLinkNetwork net(1, cl.Ncl);
            gillespie_update(net, fibers, ops, dt, rng, dom, cl);
            CHECK(net.valid());
            for (int k = 0; k < cl.Ncl; k++) {
                trials++;
                if (net.state[k] == CrossLinkNetwork::Singly) bound++;
            }
        }
        double phat = double(bound) / trials;
        double se = std::sqrt(p_bind * (1.0 - p_bind) / trials);
        CHECK(std::abs(phat - p_bind) < 3.0 * se);
    }

    SUBCASE("doubly-bound fraction matches the two-state chain") {
        // two parallel fibers, one candidate pair within the cutoff
        CLParams cl;
        cl.Ncl = 2; // sites at the fiber ends only
        cl.Kc = 20.0;
        cl.ell_c = 0.05;
        cl.kon_s = 4.0;
        cl.koff_s = 1.5;
        cl.kBT = 1.0;
        // colinear fibers so only the facing ends are within the cutoff
        double gap = cl.ell_c + 0.3 * std::sqrt(cl.kBT / cl.Kc);
        std::vector<FilamentShape> fibers = {
            straight_shape(ops, Vector3d::UnitX()),
            straight_shape(ops, Vector3d::UnitX(), Vector3d(p.L + gap, 0, 0))};
        auto pts = binding_sites(fibers, ops, cl);
        double d01 = (pts.row(1) - pts.row(2)).norm();
        REQUIRE(d01 == doctest::Approx(gap).epsilon(1e-12));
        REQUIRE(d01 < cl.cutoff());
        REQUIRE((pts.row(0) - pts.row(2)).norm() > cl.cutoff());

        double kb = binding_rate(d01, cl);
        double pD = kb / (kb + 2.0 * cl.koff_s);
        double dt = 5.0 / (kb + 2.0 * cl.koff_s); // decorrelated samples

        CrossLinkNetwork net(2, cl.Ncl);
        net.state[1] = CrossLinkNetwork::Singly;
        std::mt19937_64 rng(1234);
        long nsamp = 20000, nD = 0;
        for (long k = 0; k < nsamp; k++) {
            gillespie_update(net, fibers, ops, dt, rng, dom, cl);
            REQUIRE(net.valid());
            if (!net.links.empty()) nD++;
        }
        double phat = double(nD) / nsamp;
        double se = std::sqrt(pD * (1.0 - pD) / nsamp);
        CHECK(std::abs(phat - pD) < 3.0 * se);
    }

    SUBCASE("no same-fiber links form") {
        CLParams cl;
        cl.Ncl = 12;
        cl.Kc = 5.0;
        cl.ell_c = 0.1;
        cl.kon = 10.0;
        cl.koff = 1.0;
        cl.kon_s = 50.0;
        cl.koff_s = 1.0;
        std::vector<FilamentShape> fibers = {
            bent_shape(ops, 0.3, 0.2, Vector3d::Zero()),
            bent_shape(ops, 0.25, 1.0, Vector3d(0, 0.05, 0))};
        CrossLinkNetwork net(2, cl.Ncl);
        std::mt19937_64 rng(9);
        for (int step = 0; step < 50; step++) {
            gillespie_update(net, fibers, ops, 0.05, rng, dom, cl);
            REQUIRE(net.valid());
        }
        CHECK(net.links.size() > 0); // the chain actually fired
    }
}

TEST_CASE("crosslink forces") {
    auto p = make_params(16);
    auto ops = build_discretization(p);
    Domain dom;
    CLParams cl;
    cl.Ncl = 8;
    cl.Kc = 7.0;
    cl.ell_c = 0.05;

    SUBCASE("rest length gives zero force, stretch gives Hooke's law") {
        for (double stretch : {0.0, 0.03}) {
            std::vector<FilamentShape> fibers = {
                straight_shape(ops, Vector3d::UnitX()),
                straight_shape(ops, Vector3d::UnitX(), Vector3d(0, cl.ell_c + stretch, 0))};
            CrossLinkNetwork net(2, cl.Ncl);
            net.state[3] = CrossLinkNetwork::Doubly;
            net.state[cl.Ncl + 3] = CrossLinkNetwork::Doubly;
            net.links.push_back({3, cl.Ncl + 3});
            auto F = crosslink_forces(net, fibers, ops, dom, cl);
            Vector3d t0 = total_force(F[0]), t1 = total_force(F[1]);
            CHECK(t0.norm() == doctest::Approx(cl.Kc * stretch).epsilon(1e-10));
            CHECK((t0 + t1).norm() < 1e-12 * (cl.Kc * cl.ell_c));
            if (stretch > 0) CHECK(t0(1) > 0); // fiber 0 pulled toward fiber 1
        }
    }

    SUBCASE("force is the negative gradient of the energy") {
        std::vector<FilamentShape> fibers = {
            bent_shape(ops, 0.3, 0.2, Vector3d::Zero()),
            bent_shape(ops, 0.2, 1.3, Vector3d(0.03, 0.08, 0.02))};
        CrossLinkNetwork net(2, cl.Ncl);
        for (int k : {1, 4, 6}) {
            net.state[k] = CrossLinkNetwork::Doubly;
            net.state[cl.Ncl + (7 - k)] = CrossLinkNetwork::Doubly;
            net.links.push_back({k, cl.Ncl + (7 - k)});
        }
        auto F = crosslink_forces(net, fibers, ops, dom, cl);

        std::mt19937_64 rng(3);
        std::normal_distribution<double> gauss;
        int Nx = p.Nx();
        VectorXd V0(3 * Nx), V1(3 * Nx);
        for (int k = 0; k < 3 * Nx; k++) {
            V0(k) = gauss(rng);
            V1(k) = gauss(rng);
        }
        auto energy_at = [&](double c) {
            auto fb = fibers;
            fb[0].X += c * V0;
            fb[1].X += c * V1;
            return crosslink_energy(net, fb, ops, dom, cl);
        };
        double h = 1e-6;
        double dE = (energy_at(h) - energy_at(-h)) / (2 * h);
        double Fdir = F[0].dot(V0) + F[1].dot(V1);
        CHECK(dE == doctest::Approx(-Fdir).epsilon(1e-5));
    }

    SUBCASE("periodic links act through the boundary") {
        Domain pd;
        pd.periodic = true;
        pd.Ld = 3.0;
        double stretch = 0.02;
        std::vector<FilamentShape> fibers = {
            straight_shape(ops, Vector3d::UnitX(), Vector3d(0, 0.0, 0)),
            straight_shape(ops, Vector3d::UnitX(),
                           Vector3d(0, pd.Ld - cl.ell_c - stretch, 0))};
        CrossLinkNetwork net(2, cl.Ncl);
        net.state[2] = CrossLinkNetwork::Doubly;
        net.state[cl.Ncl + 2] = CrossLinkNetwork::Doubly;
        net.links.push_back({2, cl.Ncl + 2});
        auto F = crosslink_forces(net, fibers, ops, pd, cl);
        Vector3d t0 = total_force(F[0]);
        CHECK(t0.norm() == doctest::Approx(cl.Kc * stretch).epsilon(1e-10));
        CHECK(t0(1) < 0); // pulled downward through the boundary image
    }
}
