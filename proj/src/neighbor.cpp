#include "slender/neighbor.hpp"

#include <cmath>
#include <stdexcept>

namespace slender {

using Eigen::MatrixX3d;
using Eigen::Vector3d;
using Eigen::Vector3i;

namespace {

std::vector<std::pair<int, int>> all_pairs(const MatrixX3d& pts, double r_cut, const Domain& dom) {
    std::vector<std::pair<int, int>> out;
    int n = int(pts.rows());
    double r2 = r_cut * r_cut;
    for (int i = 0; i < n; i++)
        for (int j = i + 1; j < n; j++) {
            Vector3d d = dom.min_image(pts.row(i) - pts.row(j));
            if (d.squaredNorm() < r2) out.push_back({i, j});
        }
    return out;
}

} // namespace

std::vector<std::pair<int, int>> neighbor_search(const MatrixX3d& pts, double r_cut,
                                                 const Domain& dom) {
    if (r_cut <= 0) throw std::invalid_argument("neighbor_search: r_cut must be positive");
    if (dom.periodic && r_cut >= dom.Ld / 2.0)
        throw std::invalid_argument("neighbor_search: r_cut must be < Ld/2 on a periodic domain");
    int n = int(pts.rows());
    if (n < 2) return {};

    Vector3d lo, span;
    if (dom.periodic) {
        lo.setZero();
        span.setConstant(dom.Ld);
    } else {
        lo = pts.colwise().minCoeff().transpose();
        Vector3d hi = pts.colwise().maxCoeff().transpose();
        span = hi - lo;
    }
    Vector3i nc;
    for (int k = 0; k < 3; k++) nc(k) = std::max(1, int(std::floor(span(k) / r_cut)));
    // too few cells for the stencil to beat the quadratic scan
    if (n < 64 || (dom.periodic && nc.minCoeff() < 3)) return all_pairs(pts, r_cut, dom);

    auto cell_of = [&](const Vector3d& x) {
        Vector3i c;
        for (int k = 0; k < 3; k++) {
            double u = dom.periodic ? x(k) - dom.Ld * std::floor(x(k) / dom.Ld) : x(k) - lo(k);
            c(k) = std::min(nc(k) - 1, std::max(0, int(std::floor(u / span(k) * nc(k)))));
        }
        return c;
    };
    auto flat = [&](const Vector3i& c) { return (c(0) * nc(1) + c(1)) * nc(2) + c(2); };

    std::vector<std::vector<int>> cells(size_t(nc(0)) * nc(1) * nc(2));
    for (int i = 0; i < n; i++) cells[flat(cell_of(pts.row(i).transpose()))].push_back(i);

    double r2 = r_cut * r_cut;
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; i++) {
        Vector3i c = cell_of(pts.row(i).transpose());
        for (int dx = -1; dx <= 1; dx++)
            for (int dy = -1; dy <= 1; dy++)
                for (int dz = -1; dz <= 1; dz++) {
                    Vector3i b = c + Vector3i(dx, dy, dz);
                    for (int k = 0; k < 3; k++) {
                        if (dom.periodic)
                            b(k) = (b(k) + nc(k)) % nc(k);
                        else if (b(k) < 0 || b(k) >= nc(k))
                            goto next_cell;
                    }
                    for (int j : cells[flat(b)]) {
                        if (j <= i) continue;
                        Vector3d d = dom.min_image(pts.row(i) - pts.row(j));
                        if (d.squaredNorm() < r2) out.push_back({i, j});
                    }
                next_cell:;
                }
    }
    return out;
}

} // namespace slender
