#include "slender/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slender {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

namespace {

constexpr double pi = std::numbers::pi;

// Quadrature weights via the coefficient transform: integrate the Chebyshev
// interpolant term by term using int_{-1}^1 T_k = 2/(1-k^2) for even k.
VectorXd quadrature_weights(const MatrixXd& coeff, double length) {
    int n = coeff.rows();
    VectorXd moments = VectorXd::Zero(n);
    for (int k = 0; k < n; k += 2)
        moments(k) = 2.0 / (1.0 - double(k) * double(k));
    return (length / 2.0) * (coeff.transpose() * moments);
}

MatrixXd diff_matrix(const VectorXd& s, const VectorXd& bary) {
    int n = s.size();
    MatrixXd D = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; i++) {
        double rowsum = 0;
        for (int j = 0; j < n; j++) {
            if (j == i) continue;
            D(i, j) = (bary(j) / bary(i)) / (s(i) - s(j));
            rowsum += D(i, j);
        }
        D(i, i) = -rowsum;
    }
    return D;
}

// Barycentric second-derivative matrix (Welfert): better roundoff than D*D
// and exact on constants through the negative-sum diagonal.
MatrixXd diff2_matrix(const VectorXd& s, const MatrixXd& D) {
    int n = s.size();
    MatrixXd D2 = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; i++) {
        double rowsum = 0;
        for (int j = 0; j < n; j++) {
            if (j == i) continue;
            D2(i, j) = 2.0 * D(i, j) * (D(i, i) - 1.0 / (s(i) - s(j)));
            rowsum += D2(i, j);
        }
        D2(i, i) = -rowsum;
    }
    return D2;
}

} // namespace

ChebGrid cheb_grid(int order, double length, GridKind kind) {
    if (order < 1 || length <= 0)
        throw std::invalid_argument("cheb_grid: order must be >= 1 and length > 0");
    if (kind == GridKind::Type2 && order < 2)
        throw std::invalid_argument("cheb_grid: Type2 grid needs at least 2 nodes");
    ChebGrid g;
    g.order = order;
    g.kind = kind;
    g.length = length;
    g.eta.resize(order);
    g.bary.resize(order);
    if (kind == GridKind::Type1) {
        for (int j = 0; j < order; j++) {
            double theta = (2.0 * j + 1.0) * pi / (2.0 * order);
            g.eta(j) = -std::cos(theta);
            g.bary(j) = (j % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
        }
    } else {
        for (int j = 0; j < order; j++) {
            g.eta(j) = -std::cos(j * pi / (order - 1));
            g.bary(j) = (j % 2 == 0 ? 1.0 : -1.0);
        }
        g.bary(0) *= 0.5;
        g.bary(order - 1) *= 0.5;
    }
    g.nodes = (length / 2.0) * (g.eta.array() + 1.0).matrix();
    if (order == 1) {
        g.diff = MatrixXd::Zero(1, 1);
        g.diff2 = MatrixXd::Zero(1, 1);
        g.weights = VectorXd::Constant(1, length);
        return g;
    }
    g.diff = diff_matrix(g.nodes, g.bary);
    g.diff2 = diff2_matrix(g.nodes, g.diff);
    g.weights = quadrature_weights(coefficient_matrix(g), length);
    return g;
}

RowVectorXd interpolation_row(const ChebGrid& grid, double s) {
    int n = grid.order;
    RowVectorXd row(n);
    double denom = 0;
    for (int j = 0; j < n; j++) {
        double d = s - grid.nodes(j);
        if (d == 0) {
            row.setZero();
            row(j) = 1.0;
            return row;
        }
        row(j) = grid.bary(j) / d;
        denom += row(j);
    }
    return row / denom;
}

MatrixXd resampling_matrix(const ChebGrid& grid, const VectorXd& targets) {
    MatrixXd E(targets.size(), grid.order);
    for (int i = 0; i < targets.size(); i++)
        E.row(i) = interpolation_row(grid, targets(i));
    return E;
}

MatrixXd resampling_matrix(const ChebGrid& grid, const ChebGrid& target) {
    return resampling_matrix(grid, target.nodes);
}

MatrixXd coefficient_matrix(const ChebGrid& grid) {
    int n = grid.order;
    MatrixXd C(n, n);
    if (grid.kind == GridKind::Type1) {
        // a_k = (2/n) sum_j f_j cos(k theta_j), halved for k = 0
        for (int k = 0; k < n; k++)
            for (int j = 0; j < n; j++) {
                double theta = std::acos(grid.eta(j));
                C(k, j) = (k == 0 ? 1.0 : 2.0) / n * std::cos(k * theta);
            }
    } else {
        // Clenshaw-Curtis transform with halved first/last terms and modes
        for (int k = 0; k < n; k++)
            for (int j = 0; j < n; j++) {
                double theta = std::acos(grid.eta(j));
                double c = 2.0 / (n - 1) * std::cos(k * theta);
                if (j == 0 || j == n - 1) c *= 0.5;
                if (k == 0 || k == n - 1) c *= 0.5;
                C(k, j) = c;
            }
    }
    return C;
}

MatrixXd evaluation_matrix(const VectorXd& eta, int ncoeff) {
    MatrixXd V(eta.size(), ncoeff);
    for (int j = 0; j < eta.size(); j++) {
        double x = eta(j);
        double tm = 1.0, tk = x;
        V(j, 0) = 1.0;
        if (ncoeff > 1) V(j, 1) = x;
        for (int k = 2; k < ncoeff; k++) {
            double t = 2.0 * x * tk - tm;
            tm = tk;
            tk = t;
            V(j, k) = t;
        }
    }
    return V;
}

MatrixXd evaluation_matrix(const ChebGrid& grid) {
    return evaluation_matrix(grid.eta, grid.order);
}

MatrixXd antiderivative_matrix(int ncoeff) {
    if (ncoeff < 1) throw std::invalid_argument("antiderivative_matrix: need >= 1 coefficient");
    MatrixXd A = MatrixXd::Zero(ncoeff + 1, ncoeff);
    // b_1 = a_0 - a_2/2, b_k = (a_{k-1} - a_{k+1})/(2k) for k >= 2, b_0 = 0
    A(1, 0) = 1.0;
    if (ncoeff > 2) A(1, 2) = -0.5;
    for (int k = 2; k <= ncoeff; k++) {
        A(k, k - 1) = 1.0 / (2.0 * k);
        if (k + 1 < ncoeff) A(k, k + 1) -= 1.0 / (2.0 * k);
    }
    return A;
}

MatrixXd derivative_coefficient_matrix(int ncoeff, double length) {
    MatrixXd Dc = MatrixXd::Zero(ncoeff, ncoeff);
    // b_{k-1} = b_{k+1} + 2k a_k, descending recurrence; b_0 halved
    for (int col = 0; col < ncoeff; col++) {
        VectorXd a = VectorXd::Unit(ncoeff, col);
        VectorXd b = VectorXd::Zero(ncoeff + 1);
        for (int k = ncoeff - 1; k >= 1; k--)
            b(k - 1) = b(k + 1) + 2.0 * k * a(k);
        b(0) *= 0.5;
        Dc.col(col) = (2.0 / length) * b.head(ncoeff);
    }
    return Dc;
}

MatrixXd l2_weight_matrix(const ChebGrid& grid) {
    ChebGrid fine = cheb_grid(2 * grid.order, grid.length, GridKind::Type2);
    MatrixXd E = resampling_matrix(grid, fine);
    return E.transpose() * fine.weights.asDiagonal() * E;
}

void gauss_legendre(int n, double a, double b, VectorXd& nodes, VectorXd& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; i++) {
        // Newton on P_n from a Chebyshev-based initial guess
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; it++) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; k++) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            double pm = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pm) / (x * x - 1.0);
            double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes(n - 1 - i) = a + (b - a) * 0.5 * (x + 1.0);
        weights(n - 1 - i) = (b - a) / ((1.0 - x * x) * dp * dp);
    }
}

MatrixXd expand3(const MatrixXd& A) {
    MatrixXd B = MatrixXd::Zero(3 * A.rows(), 3 * A.cols());
    for (int i = 0; i < A.rows(); i++)
        for (int j = 0; j < A.cols(); j++)
            for (int c = 0; c < 3; c++)
                B(3 * i + c, 3 * j + c) = A(i, j);
    return B;
}

VectorXd apply_scalar_op(const MatrixXd& A, const VectorXd& v) {
    if (v.size() != 3 * A.cols())
        throw std::invalid_argument("apply_scalar_op: size mismatch");
    Eigen::Map<const Eigen::Matrix3Xd> V(v.data(), 3, A.cols());
    VectorXd out(3 * A.rows());
    Eigen::Map<Eigen::Matrix3Xd>(out.data(), 3, A.rows()) = V * A.transpose();
    return out;
}

} // namespace slender
