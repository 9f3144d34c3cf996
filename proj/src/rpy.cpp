#include "slender/rpy.hpp"

#include <cmath>
#include <numbers>

namespace slender {

using Eigen::Matrix3d;
using Eigen::MatrixX3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

Matrix3d rpy_kernel_disp(const Vector3d& r, double ahat, double mu) {
    double pre = 1.0 / (8.0 * std::numbers::pi * mu);
    double R = r.norm();
    if (R > 2.0 * ahat) {
        Matrix3d rr = (r / R) * (r / R).transpose();
        return pre * ((Matrix3d::Identity() + rr) / R +
                      (2.0 * ahat * ahat / 3.0) * (Matrix3d::Identity() - 3.0 * rr) / (R * R * R));
    }
    Matrix3d out = pre * (4.0 / (3.0 * ahat) - 3.0 * R / (8.0 * ahat * ahat)) * Matrix3d::Identity();
    if (R > 0) out += pre * (1.0 / (8.0 * ahat * ahat * R)) * r * r.transpose();
    return out;
}

Matrix3d rpy_kernel(const Vector3d& x, const Vector3d& y, double ahat, double mu) {
    return rpy_kernel_disp(x - y, ahat, mu);
}

VectorXd grand_rpy_apply(const MatrixX3d& pts, const VectorXd& F, double ahat, double mu,
                         const Domain& dom) {
    int n = pts.rows();
    VectorXd U = VectorXd::Zero(3 * n);
    double pre = 1.0 / (8.0 * std::numbers::pi * mu);
    double self = 4.0 / (3.0 * ahat) * pre;
    for (int i = 0; i < n; i++) {
        Vector3d xi = pts.row(i);
        Vector3d ui = self * F.segment<3>(3 * i);
        for (int j = 0; j < n; j++) {
            if (j == i) continue;
            Vector3d r = dom.min_image(xi - Vector3d(pts.row(j)));
            Vector3d f = F.segment<3>(3 * j);
            double R2 = r.squaredNorm();
            double R = std::sqrt(R2);
            if (R > 2.0 * ahat) {
                double rf = r.dot(f) / R2;
                double c1 = pre / R;
                double c2 = pre * 2.0 * ahat * ahat / (3.0 * R * R2);
                ui += (c1 + c2) * f + (c1 - 3.0 * c2) * rf * r;
            } else {
                ui += pre * (4.0 / (3.0 * ahat) - 3.0 * R / (8.0 * ahat * ahat)) * f;
                if (R > 0) ui += pre / (8.0 * ahat * ahat * R) * r.dot(f) * r;
            }
        }
        U.segment<3>(3 * i) = ui;
    }
    return U;
}

MatrixXd grand_rpy_matrix(const MatrixX3d& pts, double ahat, double mu, const Domain& dom) {
    int n = pts.rows();
    MatrixXd M(3 * n, 3 * n);
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) {
            Vector3d r = dom.min_image(Vector3d(pts.row(i)) - Vector3d(pts.row(j)));
            M.block<3, 3>(3 * i, 3 * j) = rpy_kernel_disp(r, ahat, mu);
        }
    return M;
}

} // namespace slender
