#include "slender/selfquad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slender {

using Eigen::Matrix3d;
using Eigen::Matrix3Xd;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double pi = std::numbers::pi;

// antiderivative of T_k evaluated at x
double cheb_antideriv(int k, double x) {
    if (k == 0) return x;
    if (k == 1) return 0.5 * x * x;
    // T_{k-1} and T_{k+1} by recurrence
    double tm = 1.0, tk = x;
    for (int j = 2; j <= k - 1; j++) {
        double t = 2.0 * x * tk - tm;
        tm = tk;
        tk = t;
    }
    double tkm1 = tk;                      // T_{k-1}
    double tkk = 2.0 * x * tk - tm;        // T_k
    double tkp1 = 2.0 * x * tkk - tkm1;    // T_{k+1}
    return 0.5 * (tkp1 / (k + 1) - tkm1 / (k - 1));
}

VectorXd cheb_all(double x, int n) {
    VectorXd T(n);
    T(0) = 1.0;
    if (n > 1) T(1) = x;
    for (int k = 2; k < n; k++) T(k) = 2.0 * x * T(k - 1) - T(k - 2);
    return T;
}

// adaptive panel integration of T_k(x) * sign(x - eta) / (x - eta)^2 for all k
void doublet_moments_panel(double eta, double a, double b, int n, int depth, VectorXd& acc) {
    static thread_local VectorXd x7, w7, x15, w15;
    if (x7.size() == 0) {
        gauss_legendre(7, -1, 1, x7, w7);
        gauss_legendre(15, -1, 1, x15, w15);
    }
    auto eval = [&](const VectorXd& xs, const VectorXd& ws) {
        VectorXd I = VectorXd::Zero(n);
        for (int i = 0; i < xs.size(); i++) {
            double x = a + (b - a) * 0.5 * (xs(i) + 1.0);
            double d = x - eta;
            double v = (d > 0 ? 1.0 : -1.0) / (d * d);
            I += (ws(i) * (b - a) * 0.5 * v) * cheb_all(x, n);
        }
        return I;
    };
    VectorXd I1 = eval(x7, w7), I2 = eval(x15, w15);
    if (depth > 48 || (I2 - I1).cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + I2.cwiseAbs().maxCoeff())) {
        acc += I2;
        return;
    }
    double m = 0.5 * (a + b);
    doublet_moments_panel(eta, a, m, n, depth + 1, acc);
    doublet_moments_panel(eta, m, b, n, depth + 1, acc);
}

// RPY kernels (without the 1/(8 pi mu) prefactor) at displacement r, |r| = R
Matrix3d kern_far(const Vector3d& r, double R, double ahat) {
    Vector3d rh = r / R;
    Matrix3d rr = rh * rh.transpose();
    return (Matrix3d::Identity() + rr) / R +
           (2.0 * ahat * ahat / 3.0) * (Matrix3d::Identity() - 3.0 * rr) / (R * R * R);
}

Matrix3d kern_overlap(const Vector3d& r, double R, double ahat) {
    Matrix3d K = (4.0 / (3.0 * ahat) - 3.0 * R / (8.0 * ahat * ahat)) * Matrix3d::Identity();
    if (R > 0) K += (1.0 / (8.0 * ahat * ahat * R)) * r * r.transpose();
    return K;
}

// true RPY branch for the near region
Matrix3d kern_near(const Vector3d& r, double R, double ahat) {
    return R > 2.0 * ahat ? kern_far(r, R, ahat) : kern_overlap(r, R, ahat);
}

// branch-mismatch correction outside the near region: the spectral part
// assumed the far kernel, so subtract it and add the overlap one wherever
// the chord distance is actually below the overlap threshold
Matrix3d kern_patch(const Vector3d& r, double R, double ahat) {
    if (R >= 2.0 * ahat) return Matrix3d::Zero();
    return kern_overlap(r, R, ahat) - kern_far(r, R, ahat);
}

} // namespace

int default_local_points(double eps) {
    return eps < 1e-3 ? 4 : 8;
}

SelfQuadTables precompute_q_tables(const ChebGrid& xgrid, double ahat, int N2) {
    double L = xgrid.length;
    if (2.0 * ahat >= L) throw std::invalid_argument("precompute_q_tables: 2*ahat must be < L");
    int Nx = xgrid.order;
    SelfQuadTables t;
    t.ahat = ahat;
    t.L = L;
    t.Nx = Nx;
    t.N2 = N2;
    t.aS.resize(Nx);
    t.aD.resize(Nx);
    t.qS = MatrixXd::Zero(Nx, Nx);
    t.qD = MatrixXd::Zero(Nx, Nx);
    t.local.resize(Nx);
    t.outer.resize(Nx);

    double gap = 4.0 * ahat / L; // half-width of the excluded zone in eta
    for (int p = 0; p < Nx; p++) {
        double s = xgrid.nodes(p);
        double eta = xgrid.eta(p);
        double el = eta - gap, eh = eta + gap;
        bool lower = el > -1.0, upper = eh < 1.0;

        if (lower && upper)
            t.aS(p) = std::log((L - s) * s / (4.0 * ahat * ahat));
        else if (!lower)
            t.aS(p) = std::log((L - s) / (2.0 * ahat));
        else
            t.aS(p) = std::log(s / (2.0 * ahat));

        if (lower && upper)
            t.aD(p) = 1.0 / (4.0 * ahat * ahat) - 0.5 / (s * s) - 0.5 / ((L - s) * (L - s));
        else if (!lower)
            t.aD(p) = 1.0 / (8.0 * ahat * ahat) - 0.5 / ((L - s) * (L - s));
        else
            t.aD(p) = 1.0 / (8.0 * ahat * ahat) - 0.5 / (s * s);

        for (int k = 0; k < Nx; k++) {
            double v = 0;
            if (lower) v -= cheb_antideriv(k, el) - cheb_antideriv(k, -1.0);
            if (upper) v += cheb_antideriv(k, 1.0) - cheb_antideriv(k, eh);
            t.qS(p, k) = v;
        }
        VectorXd qd = VectorXd::Zero(Nx);
        if (lower) doublet_moments_panel(eta, -1.0, el, Nx, 0, qd);
        if (upper) doublet_moments_panel(eta, eh, 1.0, Nx, 0, qd);
        t.qD.row(p) = qd.transpose();

        // near-region GL panels on (s - 2ahat, s) and (s, s + 2ahat), clipped
        int half = N2 / 2;
        double lo = std::max(0.0, s - 2.0 * ahat), hi = std::min(L, s + 2.0 * ahat);
        std::vector<std::pair<double, double>> ivals;
        if (s - lo > 0) ivals.push_back({lo, s});
        if (hi - s > 0) ivals.push_back({s, hi});
        auto fill = [&](SelfQuadTables::LocalPanel& panel,
                        const std::vector<std::pair<double, double>>& parts, int npts) {
            int rows = npts * int(parts.size());
            panel.interp.resize(rows, Nx);
            panel.w.resize(rows);
            int r = 0;
            for (auto [a, b] : parts) {
                VectorXd xs, ws;
                gauss_legendre(npts, a, b, xs, ws);
                for (int i = 0; i < npts; i++, r++) {
                    panel.interp.row(r) = interpolation_row(xgrid, xs(i));
                    panel.w(r) = ws(i);
                }
            }
        };
        fill(t.local[p], ivals, half);
        // correction panels over 2ahat < |s - s'| < 6ahat, clipped
        std::vector<std::pair<double, double>> ovals;
        for (double edge : {-1.0, 1.0}) {
            double near = s + edge * 2.0 * ahat;
            double far = s + edge * 6.0 * ahat;
            double a = std::clamp(std::min(near, far), 0.0, L);
            double b = std::clamp(std::max(near, far), 0.0, L);
            double m = 0.5 * (a + b);
            if (b - a > 0) {
                ovals.push_back({a, m});
                ovals.push_back({m, b});
            }
        }
        t.outer[p] = {};
        fill(t.outer[p], ovals, std::max(half, 4));
    }
    MatrixXd C = coefficient_matrix(xgrid);
    t.RS = (L / 2.0) * t.qS * C;
    t.RD = (2.0 / L) * t.qD * C;
    return t;
}

VectorXd self_special_quadrature(const VectorXd& X, const VectorXd& f, const ChebGrid& xgrid,
                                 const SelfQuadTables& t, double mu) {
    int Nx = t.Nx;
    double pre = 1.0 / (8.0 * pi * mu);
    VectorXd Xsv = apply_scalar_op(xgrid.diff, X);
    VectorXd Xssv = apply_scalar_op(xgrid.diff, Xsv);
    VectorXd fsv = apply_scalar_op(xgrid.diff, f);
    Eigen::Map<const Matrix3Xd> Xm(X.data(), 3, Nx), Xs(Xsv.data(), 3, Nx),
        Xss(Xssv.data(), 3, Nx), fm(f.data(), 3, Nx), fs(fsv.data(), 3, Nx);

    VectorXd U(3 * Nx);
    for (int p = 0; p < Nx; p++) {
        double sp = xgrid.nodes(p);
        Vector3d xp = Xm.col(p), fp = fm.col(p);
        Vector3d ts = Xs.col(p);
        double nt = ts.norm();
        Vector3d that = ts / nt;
        Matrix3d Pp = Matrix3d::Identity() + that * that.transpose();
        Matrix3d Pm = Matrix3d::Identity() - 3.0 * that * that.transpose();

        Matrix3Xd gS(3, Nx), gD(3, Nx);
        for (int q = 0; q < Nx; q++) {
            if (q == p) {
                Vector3d xss = Xss.col(p);
                double td = ts.dot(xss);
                Matrix3d AS = (0.5 / (nt * nt * nt)) *
                              (ts * xss.transpose() + xss * ts.transpose() -
                               td * (Matrix3d::Identity() + 3.0 * that * that.transpose()));
                gS.col(q) = pre * (AS * fp + (Pp / nt) * fs.col(p));
                Matrix3d AD = (0.5 / std::pow(nt, 5)) *
                              (-3.0 * (ts * xss.transpose() + xss * ts.transpose()) -
                               td * (3.0 * Matrix3d::Identity() - 15.0 * that * that.transpose()));
                gD.col(q) = pre * (AD * fp + (Pm / (nt * nt * nt)) * fs.col(p));
                continue;
            }
            double ds = xgrid.nodes(q) - sp;
            double sgn = ds > 0 ? 1.0 : -1.0;
            Vector3d r = xp - Xm.col(q);
            double R = r.norm();
            Vector3d rh = r / R;
            Vector3d fq = fm.col(q);
            Vector3d Sf = pre * (fq + rh * rh.dot(fq)) / R;
            gS.col(q) = sgn * Sf - (pre / (nt * ds)) * (Pp * fp);
            Vector3d Df = pre * (fq - 3.0 * rh * rh.dot(fq)) / (R * R * R);
            gD.col(q) = sgn * ds * ds * Df - (pre / (nt * nt * nt * ds)) * (Pm * fp);
        }
        Vector3d u = (t.aS(p) * pre / nt) * (Pp * fp) + gS * t.RS.row(p).transpose();
        Vector3d ud = (t.aD(p) * pre / (nt * nt * nt)) * (Pm * fp) + gD * t.RD.row(p).transpose();
        u += (2.0 * t.ahat * t.ahat / 3.0) * ud;

        const auto& loc = t.local[p];
        for (int g = 0; g < loc.w.size(); g++) {
            Vector3d xg = Xm * loc.interp.row(g).transpose();
            Vector3d fg = fm * loc.interp.row(g).transpose();
            Vector3d r = xp - xg;
            u += pre * loc.w(g) * (kern_near(r, r.norm(), t.ahat) * fg);
        }
        const auto& out = t.outer[p];
        for (int g = 0; g < out.w.size(); g++) {
            Vector3d xg = Xm * out.interp.row(g).transpose();
            Vector3d fg = fm * out.interp.row(g).transpose();
            Vector3d r = xp - xg;
            u += pre * out.w(g) * (kern_patch(r, r.norm(), t.ahat) * fg);
        }
        U.segment<3>(3 * p) = u;
    }
    return U;
}

MatrixXd self_quadrature_matrix(const VectorXd& X, const ChebGrid& xgrid,
                                const SelfQuadTables& t, double mu) {
    int Nx = t.Nx;
    double pre = 1.0 / (8.0 * pi * mu);
    VectorXd Xsv = apply_scalar_op(xgrid.diff, X);
    VectorXd Xssv = apply_scalar_op(xgrid.diff, Xsv);
    Eigen::Map<const Matrix3Xd> Xm(X.data(), 3, Nx), Xs(Xsv.data(), 3, Nx), Xss(Xssv.data(), 3, Nx);
    const MatrixXd& D = xgrid.diff;

    MatrixXd M = MatrixXd::Zero(3 * Nx, 3 * Nx);
    for (int p = 0; p < Nx; p++) {
        double sp = xgrid.nodes(p);
        Vector3d xp = Xm.col(p);
        Vector3d ts = Xs.col(p);
        double nt = ts.norm();
        Vector3d that = ts / nt;
        Matrix3d Pp = Matrix3d::Identity() + that * that.transpose();
        Matrix3d Pm = Matrix3d::Identity() - 3.0 * that * that.transpose();
        double db = 2.0 * t.ahat * t.ahat / 3.0;

        for (int q = 0; q < Nx; q++) {
            if (q == p) continue;
            double ds = xgrid.nodes(q) - sp;
            double sgn = ds > 0 ? 1.0 : -1.0;
            Vector3d r = xp - Xm.col(q);
            double R = r.norm();
            Vector3d rh = r / R;
            Matrix3d S = pre * (Matrix3d::Identity() + rh * rh.transpose()) / R;
            Matrix3d Db = pre * (Matrix3d::Identity() - 3.0 * rh * rh.transpose()) / (R * R * R);
            // g columns contribute to (p,q) through the sampled kernel and to
            // (p,p) through the subtracted singularity
            M.block<3, 3>(3 * p, 3 * q) += t.RS(p, q) * sgn * S + db * t.RD(p, q) * sgn * ds * ds * Db;
            M.block<3, 3>(3 * p, 3 * p) -=
                (t.RS(p, q) * pre / (nt * ds)) * Pp + db * (t.RD(p, q) * pre / (nt * nt * nt * ds)) * Pm;
        }
        // limit values at q = p: shape part plus force-derivative part
        Vector3d xss = Xss.col(p);
        double td = ts.dot(xss);
        Matrix3d AS = pre * (0.5 / (nt * nt * nt)) *
                      (ts * xss.transpose() + xss * ts.transpose() -
                       td * (Matrix3d::Identity() + 3.0 * that * that.transpose()));
        Matrix3d AD = pre * (0.5 / std::pow(nt, 5)) *
                      (-3.0 * (ts * xss.transpose() + xss * ts.transpose()) -
                       td * (3.0 * Matrix3d::Identity() - 15.0 * that * that.transpose()));
        M.block<3, 3>(3 * p, 3 * p) += t.RS(p, p) * AS + db * t.RD(p, p) * AD;
        Matrix3d BS = pre * Pp / nt;
        Matrix3d BD = pre * Pm / (nt * nt * nt);
        for (int r2 = 0; r2 < Nx; r2++)
            M.block<3, 3>(3 * p, 3 * r2) += (t.RS(p, p) * D(p, r2)) * BS + db * (t.RD(p, p) * D(p, r2)) * BD;
        // inner (subtracted) parts
        M.block<3, 3>(3 * p, 3 * p) += (t.aS(p) * pre / nt) * Pp + db * (t.aD(p) * pre / (nt * nt * nt)) * Pm;
        // near region and branch-mismatch correction zone
        for (const auto* panel : {&t.local[p], &t.outer[p]}) {
            bool patch = panel == &t.outer[p];
            for (int g = 0; g < panel->w.size(); g++) {
                Vector3d xg = Xm * panel->interp.row(g).transpose();
                Vector3d r = xp - xg;
                double R = r.norm();
                Matrix3d K = patch ? kern_patch(r, R, t.ahat) : kern_near(r, R, t.ahat);
                K *= pre * panel->w(g);
                for (int q = 0; q < Nx; q++)
                    M.block<3, 3>(3 * p, 3 * q) += panel->interp(g, q) * K;
            }
        }
    }
    return M;
}

} // namespace slender
