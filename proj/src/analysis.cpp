#include "slender/analysis.hpp"

#include "slender/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace slender {

using Eigen::MatrixXd;
using Eigen::VectorXd;

EndToEndStats end_to_end_stats(const std::vector<TrajectoryFrame>& frames,
                               const DiscretizationOps& ops, double burn_in_time, int nbins,
                               double lo, double hi) {
    if (hi <= lo) hi = ops.params.L;
    std::vector<double> samples;
    for (const auto& fr : frames) {
        if (fr.time < burn_in_time) continue;
        for (size_t f = 0; f < fr.tau.size(); f++)
            samples.push_back(
                end_to_end_distance(make_shape(fr.tau[f], fr.midpoint[f], ops), ops));
    }

    EndToEndStats st;
    st.nsamples = long(samples.size());
    st.edges = VectorXd::LinSpaced(nbins + 1, lo, hi);
    st.pdf = VectorXd::Zero(nbins);
    if (samples.empty()) return st;

    for (double x : samples) {
        int b = int((x - lo) / (hi - lo) * nbins);
        st.pdf(std::clamp(b, 0, nbins - 1)) += 1.0 / samples.size();
    }
    st.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    double ss = 0;
    for (double x : samples) ss += (x - st.mean) * (x - st.mean);
    st.variance = samples.size() > 1 ? ss / (samples.size() - 1) : 0.0;
    st.se_mean = std::sqrt(st.variance / samples.size());
    return st;
}

double histogram_l1(const VectorXd& p, const VectorXd& q) { return (p - q).lpNorm<1>(); }

double vertical_extent(const FilamentShape& shape, const DiscretizationOps& ops, int nsample) {
    VectorXd s = VectorXd::LinSpaced(nsample, 0.0, ops.params.L);
    MatrixXd E = resampling_matrix(ops.x_grid, s);
    int Nx = ops.params.Nx();
    VectorXd z(Nx);
    for (int k = 0; k < Nx; k++) z(k) = shape.X(3 * k + 2);
    VectorXd zu = E * z;
    return zu.maxCoeff() - zu.minCoeff();
}

SedimentationSeries sedimentation_metrics(const std::vector<TrajectoryFrame>& frames,
                                          const DiscretizationOps& ops) {
    SedimentationSeries out;
    int nt = int(frames.size());
    int nf = nt ? int(frames[0].tau.size()) : 0;
    out.time.resize(nt);
    out.h.resize(nt, nf);
    out.d = VectorXd::Zero(nt);
    out.dh = VectorXd::Zero(nt);
    for (int t = 0; t < nt; t++) {
        out.time(t) = frames[t].time;
        std::vector<FilamentShape> shapes;
        for (int f = 0; f < nf; f++) {
            shapes.push_back(make_shape(frames[t].tau[f], frames[t].midpoint[f], ops));
            out.h(t, f) = vertical_extent(shapes.back(), ops);
        }
        if (nf >= 2) {
            out.d(t) = (frames[t].midpoint[1] - frames[t].midpoint[0]).norm();
            out.dh(t) = out.h(t, 0) - out.h(t, 1);
        }
    }
    return out;
}

BundleReport bundle_detection(const std::vector<std::pair<std::int32_t, std::int32_t>>& links,
                              int nfibers, int Ncl, double L, double volume) {
    double ds = L / (Ncl - 1);

    // collect site coordinates of every link per fiber pair
    struct PairLinks {
        std::vector<std::pair<double, double>> s; // (s on lower fiber, s on higher)
    };
    std::map<std::pair<int, int>, PairLinks> by_pair;
    for (auto [p, q] : links) {
        int fi = p / Ncl, fj = q / Ncl;
        double si = (p % Ncl) * ds, sj = (q % Ncl) * ds;
        if (fi > fj) {
            std::swap(fi, fj);
            std::swap(si, sj);
        }
        by_pair[{fi, fj}].s.push_back({si, sj});
    }

    // union-find over fibers
    std::vector<int> parent(nfibers);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    for (const auto& [key, pl] : by_pair) {
        bool edge = false;
        for (size_t i = 0; i < pl.s.size() && !edge; i++)
            for (size_t j = i + 1; j < pl.s.size() && !edge; j++)
                if (std::abs(pl.s[i].first - pl.s[j].first) >= L / 4.0 ||
                    std::abs(pl.s[i].second - pl.s[j].second) >= L / 4.0)
                    edge = true;
        if (edge) parent[find(key.first)] = find(key.second);
    }

    BundleReport rep;
    rep.label.resize(nfibers);
    std::map<int, int> size;
    for (int f = 0; f < nfibers; f++) {
        rep.label[f] = find(f);
        size[rep.label[f]]++;
    }
    rep.ncomponents = int(size.size());
    int in_bundles = 0;
    for (auto [root, n] : size)
        if (n >= 2) {
            rep.nbundles++;
            in_bundles += n;
        }
    rep.fiber_fraction = nfibers ? double(in_bundles) / nfibers : 0.0;
    rep.bundles_per_volume = volume > 0 ? rep.nbundles / volume : 0.0;
    return rep;
}

} // namespace slender
