#ifndef SLENDER_DOMAIN_HPP
#define SLENDER_DOMAIN_HPP

#include <Eigen/Dense>

namespace slender {

/**
 * Free-space or cubic periodic domain. Periodic interactions use
 * minimum-image displacements; this is an approximation to a full
 * periodic (Ewald) sum that is accurate when the box is much larger
 * than the interaction range.
 */
struct Domain {
    bool periodic = false;
    double Ld = 0; // box edge, cubic

    Eigen::Vector3d min_image(const Eigen::Vector3d& d) const {
        if (!periodic) return d;
        Eigen::Vector3d r = d;
        for (int c = 0; c < 3; c++) r(c) -= Ld * std::round(r(c) / Ld);
        return r;
    }
    // fold a point into [0, Ld)^3
    Eigen::Vector3d wrap(const Eigen::Vector3d& x) const {
        if (!periodic) return x;
        Eigen::Vector3d r = x;
        for (int c = 0; c < 3; c++) r(c) -= Ld * std::floor(r(c) / Ld);
        return r;
    }
};

} // namespace slender

#endif
