#include "slender/network.hpp"

#include "slender/neighbor.hpp"

#include <algorithm>
#include <cmath>

namespace slender {

using Eigen::MatrixX3d;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

double binding_rate(double ell, const CLParams& params) {
    double d = ell - params.ell_c;
    return params.kon_s * std::exp(-params.Kc * d * d / (2.0 * params.kBT));
}

bool CrossLinkNetwork::valid() const {
    std::vector<int> doubly(state.size(), 0);
    for (auto [p, q] : links) {
        if (fiber_of(p) == fiber_of(q)) return false;
        doubly[p]++;
        doubly[q]++;
    }
    for (size_t k = 0; k < state.size(); k++) {
        if (state[k] == Doubly && doubly[k] != 1) return false;
        if (state[k] != Doubly && doubly[k] != 0) return false;
    }
    return true;
}

MatrixX3d binding_sites(const std::vector<FilamentShape>& fibers, const DiscretizationOps& ops,
                        const CLParams& params) {
    int nf = int(fibers.size()), Ncl = params.Ncl, Nx = ops.params.Nx();
    VectorXd su = VectorXd::LinSpaced(Ncl, 0.0, ops.params.L);
    MatrixXd Ru = resampling_matrix(ops.x_grid, su);
    MatrixX3d pts(nf * Ncl, 3);
    for (int fb = 0; fb < nf; fb++) {
        MatrixXd vals(Nx, 3);
        for (int k = 0; k < Nx; k++) vals.row(k) = fibers[fb].X.segment<3>(3 * k).transpose();
        pts.middleRows(fb * Ncl, Ncl) = Ru * vals;
    }
    return pts;
}

void gillespie_update(CrossLinkNetwork& net, const std::vector<FilamentShape>& fibers,
                      const DiscretizationOps& ops, double dt, std::mt19937_64& rng,
                      const Domain& dom, const CLParams& params) {
    MatrixX3d pts = binding_sites(fibers, ops, params);
    int nsites = int(pts.rows());
    double kon_site = params.kon * params.ds(ops.params.L);

    // candidate partner pairs within the binding cutoff, rebuilt once per
    // step (geometry is frozen during the reaction interval)
    struct Candidate {
        int p, q;
        double rate; // second-end rate at the frozen distance
    };
    std::vector<Candidate> cand;
    if (params.kon_s > 0)
        for (auto [p, q] : neighbor_search(pts, params.cutoff(), dom)) {
            if (net.fiber_of(p) == net.fiber_of(q)) continue;
            double ell = dom.min_image((pts.row(p) - pts.row(q)).transpose()).norm();
            cand.push_back({p, q, binding_rate(ell, params)});
        }

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto exp_draw = [&](double rate) { return -std::log(1.0 - uni(rng)) / rate; };

    double t = 0;
    while (true) {
        // reaction rates at the current occupancy
        double r_attach = 0, r_detach = 0, r_bind = 0;
        for (int k = 0; k < nsites; k++) {
            if (net.state[k] == CrossLinkNetwork::Free) r_attach += kon_site;
            if (net.state[k] == CrossLinkNetwork::Singly) r_detach += params.koff;
        }
        std::vector<double> bind_rate(cand.size(), 0.0);
        for (size_t c = 0; c < cand.size(); c++) {
            const auto& cd = cand[c];
            double r = 0;
            if (net.state[cd.p] == CrossLinkNetwork::Singly &&
                net.state[cd.q] == CrossLinkNetwork::Free)
                r += cd.rate;
            if (net.state[cd.q] == CrossLinkNetwork::Singly &&
                net.state[cd.p] == CrossLinkNetwork::Free)
                r += cd.rate;
            bind_rate[c] = r;
            r_bind += r;
        }
        double r_release = 2.0 * params.koff_s * double(net.links.size());
        double total = r_attach + r_detach + r_bind + r_release;
        if (total <= 0) return;

        t += exp_draw(total);
        if (t > dt) return;

        double pick = uni(rng) * total;
        if (pick < r_attach) {
            int n = int(pick / kon_site);
            for (int k = 0; k < nsites; k++)
                if (net.state[k] == CrossLinkNetwork::Free && n-- == 0) {
                    net.state[k] = CrossLinkNetwork::Singly;
                    break;
                }
        } else if ((pick -= r_attach) < r_detach) {
            int n = int(pick / params.koff);
            for (int k = 0; k < nsites; k++)
                if (net.state[k] == CrossLinkNetwork::Singly && n-- == 0) {
                    net.state[k] = CrossLinkNetwork::Free;
                    break;
                }
        } else if ((pick -= r_detach) < r_bind) {
            for (size_t c = 0; c < cand.size(); c++) {
                if (pick >= bind_rate[c]) {
                    pick -= bind_rate[c];
                    continue;
                }
                const auto& cd = cand[c];
                // when both directions are open, either singly end binds
                int p = cd.p, q = cd.q;
                bool pq = net.state[p] == CrossLinkNetwork::Singly &&
                          net.state[q] == CrossLinkNetwork::Free;
                bool qp = net.state[q] == CrossLinkNetwork::Singly &&
                          net.state[p] == CrossLinkNetwork::Free;
                if (pq && qp && pick >= cd.rate) std::swap(p, q);
                else if (!pq) std::swap(p, q);
                net.state[p] = CrossLinkNetwork::Doubly;
                net.state[q] = CrossLinkNetwork::Doubly;
                net.links.push_back({p, q});
                break;
            }
        } else {
            pick -= r_bind;
            size_t li = std::min(net.links.size() - 1, size_t(pick / (2.0 * params.koff_s)));
            auto [p, q] = net.links[li];
            bool first_end = uni(rng) < 0.5;
            int gone = first_end ? p : q, kept = first_end ? q : p;
            net.state[gone] = CrossLinkNetwork::Free;
            net.state[kept] = CrossLinkNetwork::Singly;
            net.links.erase(net.links.begin() + li);
        }
    }
}

double crosslink_energy(const CrossLinkNetwork& net, const std::vector<FilamentShape>& fibers,
                        const DiscretizationOps& ops, const Domain& dom,
                        const CLParams& params) {
    MatrixX3d pts = binding_sites(fibers, ops, params);
    double E = 0;
    for (auto [p, q] : net.links) {
        double ell = dom.min_image((pts.row(p) - pts.row(q)).transpose()).norm();
        E += 0.5 * params.Kc * (ell - params.ell_c) * (ell - params.ell_c);
    }
    return E;
}

std::vector<VectorXd> crosslink_forces(const CrossLinkNetwork& net,
                                       const std::vector<FilamentShape>& fibers,
                                       const DiscretizationOps& ops, const Domain& dom,
                                       const CLParams& params) {
    int nf = int(fibers.size()), Nx = ops.params.Nx();
    std::vector<VectorXd> F(nf, VectorXd::Zero(3 * Nx));
    if (net.links.empty()) return F;

    MatrixX3d pts = binding_sites(fibers, ops, params);
    VectorXd su = VectorXd::LinSpaced(params.Ncl, 0.0, ops.params.L);
    MatrixXd Ru = resampling_matrix(ops.x_grid, su);

    for (auto [p, q] : net.links) {
        Vector3d d = dom.min_image((pts.row(p) - pts.row(q)).transpose());
        double ell = d.norm();
        if (ell == 0) continue;
        // tension Kc (ell - ell_c) pulls the ends together when stretched
        Vector3d f_on_p = -params.Kc * (ell - params.ell_c) / ell * d;
        const RowVectorXd& rp = Ru.row(p % params.Ncl);
        const RowVectorXd& rq = Ru.row(q % params.Ncl);
        int fi = net.fiber_of(p), fj = net.fiber_of(q);
        for (int k = 0; k < Nx; k++) {
            F[fi].segment<3>(3 * k) += rp(k) * f_on_p;
            F[fj].segment<3>(3 * k) -= rq(k) * f_on_p;
        }
    }
    return F;
}

} // namespace slender
