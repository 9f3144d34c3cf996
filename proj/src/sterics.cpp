#include "slender/sterics.hpp"

#include "slender/neighbor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace slender {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

std::pair<double, double> potential_density(double r, const StericParams& params) {
    double E = params.E0 / params.a * std::erf(r / (params.delta * std::sqrt(2.0)));
    double dE = params.E0 / (params.a * params.delta) * std::sqrt(2.0 / M_PI) *
                std::exp(-r * r / (2.0 * params.delta * params.delta));
    return {E, dE};
}

namespace {

// Energy density of one point pair: the potential shifted so it vanishes
// continuously at the cutoff, with -d/dr equal to the repulsive kernel.
double energy_density(double r, const StericParams& params) {
    double x = r / (params.delta * std::sqrt(2.0));
    return params.E0 / params.a * (std::erfc(x) - std::erfc(2.0 * std::sqrt(2.0)));
}

Vector3d clenshaw(const MatrixXd& c, double eta) {
    Vector3d b1 = Vector3d::Zero(), b2 = Vector3d::Zero();
    for (int k = int(c.rows()) - 1; k >= 1; k--) {
        Vector3d b = 2.0 * eta * b1 - b2 + c.row(k).transpose();
        b2 = b1;
        b1 = b;
    }
    return c.row(0).transpose() + eta * b1 - b2;
}

} // namespace

Vector3d FiberGeom::eval(double s) const { return clenshaw(cX, 2.0 * s / L - 1.0); }
Vector3d FiberGeom::deriv(double s) const { return clenshaw(cXs, 2.0 * s / L - 1.0); }
Vector3d FiberGeom::deriv2(double s) const { return clenshaw(cXss, 2.0 * s / L - 1.0); }

FiberGeom make_geom(const FilamentShape& shape, const DiscretizationOps& ops) {
    int Nx = ops.params.Nx();
    MatrixXd vals(Nx, 3);
    for (int k = 0; k < Nx; k++) vals.row(k) = shape.X.segment<3>(3 * k).transpose();
    FiberGeom g;
    g.L = ops.params.L;
    MatrixXd Dc = derivative_coefficient_matrix(Nx, g.L);
    g.cX = ops.coeff * vals;
    g.cXs = Dc * g.cX;
    g.cXss = Dc * g.cXs;
    return g;
}

double curvature_deviation(const FiberGeom& geom, double s_lo, double s_hi) {
    Vector3d X0 = geom.eval(s_lo), X1 = geom.eval(s_hi);
    Vector3d Xm = geom.eval(0.5 * (s_lo + s_hi));
    Vector3d u = X1 - X0;
    double n = u.norm();
    Vector3d w = Xm - X0;
    if (n < 1e-14) return w.norm();
    u /= n;
    return (w - w.dot(u) * u).norm();
}

ClosestResult closest_points(const FiberGeom& gi, const FiberGeom& gj, double si0, double sj0,
                             const Domain& dom, const StericParams& params) {
    const double L = gi.L;
    const double tol = 0.01 * params.delta / L;
    const double eps_b = 1e-10;

    // frozen periodic image: hold the shift of the initial guess
    Vector3d d0 = gi.eval(si0) - gj.eval(sj0);
    Vector3d shift = dom.min_image(d0) - d0;

    auto dvec = [&](double si, double sj) { return (gi.eval(si) - gj.eval(sj) + shift).eval(); };
    auto fval = [&](double si, double sj) { return 0.5 * dvec(si, sj).squaredNorm(); };

    ClosestResult res;
    Vector2d s(si0, sj0);
    for (int it = 0; it < params.max_iters; it++) {
        res.iterations = it;
        Vector3d d = dvec(s(0), s(1));
        Vector3d Xis = gi.deriv(s(0)), Xjs = gj.deriv(s(1));
        Vector2d g(d.dot(Xis), -d.dot(Xjs));

        // freeze components whose descent direction points outside [0,L]
        bool free0 = !((s(0) <= eps_b && g(0) > 0) || (s(0) >= L - eps_b && g(0) < 0));
        bool free1 = !((s(1) <= eps_b && g(1) > 0) || (s(1) >= L - eps_b && g(1) < 0));
        Vector2d ge(free0 ? g(0) : 0.0, free1 ? g(1) : 0.0);
        if (ge.norm() < tol) {
            res.status = ClosestResult::Converged;
            res.si = s(0);
            res.sj = s(1);
            res.d = d;
            return res;
        }

        Matrix2d H;
        H(0, 0) = Xis.squaredNorm() + d.dot(gi.deriv2(s(0)));
        H(1, 1) = Xjs.squaredNorm() - d.dot(gj.deriv2(s(1)));
        H(0, 1) = H(1, 0) = -Xis.dot(Xjs);
        if (!free0) {
            H.row(0).setZero();
            H.col(0).setZero();
            H(0, 0) = 1;
        }
        if (!free1) {
            H.row(1).setZero();
            H.col(1).setZero();
            H(1, 1) = 1;
        }

        Eigen::SelfAdjointEigenSolver<Matrix2d> eig(H);
        double l1 = eig.eigenvalues()(1), l2 = eig.eigenvalues()(0); // l1 >= l2
        if (l1 <= 0) {
            res.status = ClosestResult::NegativeHessian;
            res.si = s(0);
            res.sj = s(1);
            res.d = d;
            return res;
        }
        l2 = std::max(l2, l1 / params.kappa_max);
        Matrix2d Hinv = eig.eigenvectors() * Vector2d(1.0 / l2, 1.0 / l1).asDiagonal() *
                        eig.eigenvectors().transpose();
        Vector2d p = -Hinv * ge;
        if (p.norm() > 0.1 * L) p *= 0.1 * L / p.norm();

        double F0 = 0.5 * d.squaredNorm();
        double slope = ge.dot(p);
        double alpha = 1.0;
        Vector2d sn;
        for (int t = 0; t < 40; t++) {
            sn = (s + alpha * p).cwiseMax(0.0).cwiseMin(L);
            if (fval(sn(0), sn(1)) <= F0 + 1e-4 * alpha * slope) break;
            alpha *= 0.5;
        }
        s = sn;
    }
    res.status = ClosestResult::MaxIters;
    res.si = s(0);
    res.sj = s(1);
    res.d = dvec(s(0), s(1));
    return res;
}

std::optional<InteractionInterval>
interaction_interval(const FiberGeom& gi, const FiberGeom& gj, const ClosestResult& min,
                     const StericParams& params) {
    double rmax = params.rmax();
    double dn = min.d.norm();
    if (dn >= rmax) return std::nullopt;

    Vector3d Xis = gi.deriv(min.si), Xiss = gi.deriv2(min.si);
    Vector3d Xjs = gj.deriv(min.sj), Xjss = gj.deriv2(min.sj);
    const Vector3d& dv = min.d;
    double a = Xis.squaredNorm() + dv.dot(Xiss);
    double b = Xjs.squaredNorm() - dv.dot(Xjss);
    double c = dv.dot(Xis);
    double d = -dv.dot(Xjs);
    double e = -Xis.dot(Xjs);
    double f = dn * dn - rmax * rmax;

    const double L = gi.L;
    double Lseg = L / params.Nseg;

    // largest excursion compatible with the quadratic model, dropping
    // the cross term; used when the level set is not a proper ellipse
    auto axis_extent = [&](double qa, double qc) {
        double disc = qc * qc - qa * f;
        if (qa > 1e-12 && disc >= 0) {
            double r1 = (-qc + std::sqrt(disc)) / qa;
            double r2 = (-qc - std::sqrt(disc)) / qa;
            return std::max(std::abs(r1), std::abs(r2));
        }
        return rmax * Lseg / params.delta;
    };

    double di, dj;
    double denom = 8.0 * e * e - 8.0 * a * b;
    double disc_i = std::pow(8.0 * d * e - 8.0 * c * b, 2) -
                    4.0 * (4.0 * e * e - 4.0 * a * b) * (4.0 * d * d - 4.0 * b * f);
    double disc_j = std::pow(8.0 * c * e - 8.0 * a * d, 2) -
                    4.0 * (4.0 * e * e - 4.0 * a * b) * (4.0 * c * c - 4.0 * a * f);
    double scale = std::max({std::abs(8.0 * e * e), std::abs(8.0 * a * b), 1e-30});
    if (std::abs(denom) > 1e-10 * scale && disc_i >= 0 && disc_j >= 0) {
        double ri1 = (8.0 * c * b - 8.0 * d * e + std::sqrt(disc_i)) / denom;
        double ri2 = (8.0 * c * b - 8.0 * d * e - std::sqrt(disc_i)) / denom;
        double rj1 = (8.0 * a * d - 8.0 * c * e + std::sqrt(disc_j)) / denom;
        double rj2 = (8.0 * a * d - 8.0 * c * e - std::sqrt(disc_j)) / denom;
        di = std::max(std::abs(ri1), std::abs(ri2));
        dj = std::max(std::abs(rj1), std::abs(rj2));
    } else {
        di = axis_extent(a, c);
        dj = axis_extent(b, d);
    }

    InteractionInterval iv;
    iv.si_lo = std::max(0.0, min.si - di);
    iv.si_hi = std::min(L, min.si + di);
    iv.sj_lo = std::max(0.0, min.sj - dj);
    iv.sj_hi = std::min(L, min.sj + dj);
    return iv;
}

std::vector<InteractionInterval> merge_intervals(std::vector<InteractionInterval> v) {
    auto overlap = [](const InteractionInterval& a, const InteractionInterval& b) {
        return a.si_lo <= b.si_hi && b.si_lo <= a.si_hi && a.sj_lo <= b.sj_hi &&
               b.sj_lo <= a.sj_hi;
    };
    bool merged = true;
    while (merged) {
        merged = false;
        for (size_t i = 0; i < v.size() && !merged; i++)
            for (size_t j = i + 1; j < v.size() && !merged; j++)
                if (overlap(v[i], v[j])) {
                    v[i].si_lo = std::min(v[i].si_lo, v[j].si_lo);
                    v[i].si_hi = std::max(v[i].si_hi, v[j].si_hi);
                    v[i].sj_lo = std::min(v[i].sj_lo, v[j].sj_lo);
                    v[i].sj_hi = std::max(v[i].sj_hi, v[j].sj_hi);
                    v.erase(v.begin() + j);
                    merged = true;
                }
    }
    std::sort(v.begin(), v.end(),
              [](const InteractionInterval& a, const InteractionInterval& b) {
                  return a.si_lo < b.si_lo;
              });
    return v;
}

namespace {

// Pair kernel between two fibers sampled at arbitrary points with
// quadrature weights; accumulates point forces and the pair energy.
void pair_quadrature(const FiberGeom& gi, const FiberGeom& gj, const VectorXd& si,
                     const VectorXd& wi, const VectorXd& sj, const VectorXd& wj,
                     const Domain& dom, const StericParams& params, Eigen::MatrixX3d& Fi,
                     Eigen::MatrixX3d& Fj, double& energy) {
    double rmax = params.rmax();
    std::vector<Vector3d> Pi(si.size()), Pj(sj.size());
    for (int a = 0; a < si.size(); a++) Pi[a] = gi.eval(si(a));
    for (int b = 0; b < sj.size(); b++) Pj[b] = gj.eval(sj(b));
    for (int a = 0; a < si.size(); a++)
        for (int b = 0; b < sj.size(); b++) {
            Vector3d d = dom.min_image(Pi[a] - Pj[b]);
            double r = d.norm();
            if (r >= rmax || r == 0) continue;
            double dE = potential_density(r, params).second;
            Vector3d fk = wi(a) * wj(b) * dE / r * d;
            Fi.row(a) += fk.transpose();
            Fj.row(b) -= fk.transpose();
            energy += wi(a) * wj(b) * energy_density(r, params);
        }
}

// Scatter point forces back to Chebyshev nodes through the transpose of
// the sampling matrix, into an interleaved 3Nx vector.
void scatter(const MatrixXd& E, const Eigen::MatrixX3d& Fp, VectorXd& Fnode) {
    MatrixXd Fn = E.transpose() * Fp; // Nx x 3
    for (int k = 0; k < Fn.rows(); k++) Fnode.segment<3>(3 * k) += Fn.row(k).transpose();
}

// Uniform-point kernel restricted to one fiber pair (used as the
// fallback when Newton fails on that pair).
void uniform_pair(const FilamentShape& si, const FilamentShape& sj, const DiscretizationOps& ops,
                  int Nu, const Domain& dom, const StericParams& params, VectorXd& Fi,
                  VectorXd& Fj, double& energy) {
    double L = ops.params.L;
    VectorXd su = VectorXd::LinSpaced(Nu, 0.0, L);
    VectorXd wu = VectorXd::Constant(Nu, L / (Nu - 1));
    wu(0) *= 0.5;
    wu(Nu - 1) *= 0.5;
    MatrixXd Eu = resampling_matrix(ops.x_grid, su);
    FiberGeom gi = make_geom(si, ops), gj = make_geom(sj, ops);
    Eigen::MatrixX3d Fpi = Eigen::MatrixX3d::Zero(Nu, 3), Fpj = Eigen::MatrixX3d::Zero(Nu, 3);
    pair_quadrature(gi, gj, su, wu, su, wu, dom, params, Fpi, Fpj, energy);
    scatter(Eu, Fpi, Fi);
    scatter(Eu, Fpj, Fj);
}

// Closest points of two straight segments [A0,A1], [B0,B1]; returns the
// parameters in [0,1] and the distance.
double segment_segment(const Vector3d& A0, const Vector3d& A1, const Vector3d& B0,
                       const Vector3d& B1, double& t, double& u) {
    Vector3d da = A1 - A0, db = B1 - B0, r = A0 - B0;
    double a = da.squaredNorm(), e = db.squaredNorm(), f = db.dot(r);
    double c = da.dot(r), b = da.dot(db);
    double den = a * e - b * b;
    t = (den > 1e-14 * a * e + 1e-300) ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
    u = (e > 0) ? (b * t + f) / e : 0.0;
    if (u < 0) {
        u = 0;
        t = (a > 0) ? std::clamp(-c / a, 0.0, 1.0) : 0.0;
    } else if (u > 1) {
        u = 1;
        t = (a > 0) ? std::clamp((b - c) / a, 0.0, 1.0) : 0.0;
    }
    return (A0 + t * da - B0 - u * db).norm();
}

} // namespace

StericForces uniform_steric_forces(const std::vector<FilamentShape>& fibers,
                                   const DiscretizationOps& ops, int Nu, const Domain& dom,
                                   const StericParams& params) {
    int nf = int(fibers.size());
    int Nx = ops.params.Nx();
    double L = ops.params.L;
    StericForces out;
    out.force.assign(nf, VectorXd::Zero(3 * Nx));
    if (nf < 2 || Nu < 2) return out;

    VectorXd su = VectorXd::LinSpaced(Nu, 0.0, L);
    VectorXd wu = VectorXd::Constant(Nu, L / (Nu - 1));
    wu(0) *= 0.5;
    wu(Nu - 1) *= 0.5;
    MatrixXd Eu = resampling_matrix(ops.x_grid, su);

    Eigen::MatrixX3d pts(nf * Nu, 3);
    for (int fb = 0; fb < nf; fb++) {
        MatrixXd vals(Nx, 3);
        for (int k = 0; k < Nx; k++) vals.row(k) = fibers[fb].X.segment<3>(3 * k).transpose();
        pts.middleRows(fb * Nu, Nu) = Eu * vals;
    }

    std::vector<Eigen::MatrixX3d> Fp(nf, Eigen::MatrixX3d::Zero(Nu, 3));
    auto pairs = neighbor_search(pts, params.rmax(), dom);
    for (auto [p, q] : pairs) {
        int fi = p / Nu, fj = q / Nu;
        if (fi == fj) continue;
        Vector3d d = dom.min_image((pts.row(p) - pts.row(q)).transpose());
        double r = d.norm();
        if (r >= params.rmax() || r == 0) continue;
        double dE = potential_density(r, params).second;
        Vector3d fk = wu(p % Nu) * wu(q % Nu) * dE / r * d;
        Fp[fi].row(p % Nu) += fk.transpose();
        Fp[fj].row(q % Nu) -= fk.transpose();
        out.energy += wu(p % Nu) * wu(q % Nu) * energy_density(r, params);
    }
    for (int fb = 0; fb < nf; fb++) scatter(Eu, Fp[fb], out.force[fb]);
    return out;
}

StericForces segment_steric_forces(const std::vector<FilamentShape>& fibers,
                                   const DiscretizationOps& ops, const Domain& dom,
                                   const StericParams& params) {
    int nf = int(fibers.size());
    int Nx = ops.params.Nx();
    double L = ops.params.L;
    double rmax = params.rmax();
    int ns = params.Nseg;
    double Lseg = L / ns;

    StericForces out;
    out.force.assign(nf, VectorXd::Zero(3 * Nx));
    if (nf < 2) return out;

    std::vector<FiberGeom> geom(nf);
    for (int fb = 0; fb < nf; fb++) geom[fb] = make_geom(fibers[fb], ops);

    // straight pieces: endpoints, midpoints, chord deviations
    Eigen::MatrixX3d mids(nf * ns, 3);
    std::vector<Vector3d> e0(nf * ns), e1(nf * ns);
    VectorXd dh(nf * ns);
    double dh_max = 0;
    for (int fb = 0; fb < nf; fb++)
        for (int p = 0; p < ns; p++) {
            int id = fb * ns + p;
            double lo = p * Lseg, hi = lo + Lseg;
            e0[id] = geom[fb].eval(lo);
            e1[id] = geom[fb].eval(hi);
            mids.row(id) = geom[fb].eval(0.5 * (lo + hi)).transpose();
            dh(id) = curvature_deviation(geom[fb], lo, hi);
            dh_max = std::max(dh_max, dh(id));
        }

    double r_cut = Lseg + rmax + 2.0 * dh_max;
    std::vector<std::pair<int, int>> cand;
    if (!dom.periodic || r_cut < dom.Ld / 2.0) {
        cand = neighbor_search(mids, r_cut, dom);
    } else {
        for (int i = 0; i < nf * ns; i++)
            for (int j = i + 1; j < nf * ns; j++) cand.push_back({i, j});
    }

    std::map<std::pair<int, int>, std::vector<InteractionInterval>> windows;
    std::set<std::pair<int, int>> failed;
    for (auto [pi, pj] : cand) {
        int fi = pi / ns, fj = pj / ns;
        if (fi == fj) continue;
        if (fi > fj) {
            std::swap(fi, fj);
            std::swap(pi, pj);
        }
        out.diag.candidate_pairs++;

        // straight-chord distance with the periodic image of the pieces
        Vector3d img = dom.min_image((mids.row(pi) - mids.row(pj)).transpose()) -
                       (mids.row(pi) - mids.row(pj)).transpose();
        double t, u;
        double dseg = segment_segment(e0[pi] + img, e1[pi] + img, e0[pj], e1[pj], t, u);
        if (dseg >= rmax + dh(pi) + dh(pj)) {
            out.diag.screened_pairs++;
            continue;
        }

        double si0 = (pi % ns) * Lseg + t * Lseg;
        double sj0 = (pj % ns) * Lseg + u * Lseg;
        out.diag.newton_solves++;
        ClosestResult cr = closest_points(geom[fi], geom[fj], si0, sj0, dom, params);
        if (!cr.ok()) {
            if (cr.status == ClosestResult::NegativeHessian)
                out.diag.newton_aborts++;
            else
                out.diag.newton_maxiters++;
            failed.insert({fi, fj});
            continue;
        }
        auto iv = interaction_interval(geom[fi], geom[fj], cr, params);
        if (iv) windows[{fi, fj}].push_back(*iv);
    }

    for (auto& [key, ivs] : windows) {
        auto [fi, fj] = key;
        if (failed.count(key)) continue;
        auto merged = merge_intervals(std::move(ivs));
        for (const auto& iv : merged) {
            out.diag.intervals++;
            int ni = int(params.Ndelta * (iv.si_hi - iv.si_lo) / params.delta) + 1;
            int nj = int(params.Ndelta * (iv.sj_hi - iv.sj_lo) / params.delta) + 1;
            VectorXd si, wi, sj, wj;
            gauss_legendre(ni, iv.si_lo, iv.si_hi, si, wi);
            gauss_legendre(nj, iv.sj_lo, iv.sj_hi, sj, wj);
            Eigen::MatrixX3d Fpi = Eigen::MatrixX3d::Zero(ni, 3);
            Eigen::MatrixX3d Fpj = Eigen::MatrixX3d::Zero(nj, 3);
            pair_quadrature(geom[fi], geom[fj], si, wi, sj, wj, dom, params, Fpi, Fpj,
                            out.energy);
            scatter(resampling_matrix(ops.x_grid, si), Fpi, out.force[fi]);
            scatter(resampling_matrix(ops.x_grid, sj), Fpj, out.force[fj]);
        }
    }

    // pairs where Newton failed get the first-kind algorithm instead of
    // silently dropping the contact
    for (auto [fi, fj] : failed) {
        out.diag.fallback_pairs++;
        int Nu = std::max(32, int(L / params.delta) + 1);
        uniform_pair(fibers[fi], fibers[fj], ops, Nu, dom, params, out.force[fi], out.force[fj],
                     out.energy);
    }
    return out;
}

} // namespace slender
