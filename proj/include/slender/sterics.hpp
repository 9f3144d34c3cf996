#ifndef SLENDER_STERICS_HPP
#define SLENDER_STERICS_HPP

#include "slender/domain.hpp"
#include "slender/filament.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace slender {

/**
 * Parameters of the regularized steric repulsion between fibers. The
 * pair potential density is a smeared contact: Ehat(r) scales like
 * E0/a for r below a few Gaussian widths delta and its derivative is a
 * Gaussian, truncated at rmax = 4 delta where it is negligible.
 */
struct StericParams {
    double E0 = 1;       // force scale, energy / length
    double a = 1e-3;     // fiber radius (sets the potential amplitude)
    double delta = 1e-3; // Gaussian width, = a by default
    int Ndelta = 1;      // Gauss-Legendre points per standard deviation
    int Nseg = 10;       // straight pieces per fiber for screening
    double kappa_max = 1e6; // Newton Hessian condition cap
    int max_iters = 100;    // Newton iteration cap

    double rmax() const { return 4.0 * delta; }
};

// Potential density and its radial derivative at separation r.
std::pair<double, double> potential_density(double r, const StericParams& params);

/**
 * Continuum view of one fiber: Chebyshev coefficients of the position
 * and its first two arclength derivatives, evaluated anywhere on [0,L]
 * by Clenshaw summation.
 */
struct FiberGeom {
    double L = 0;
    Eigen::MatrixXd cX;   // Nx x 3 coefficients of X
    Eigen::MatrixXd cXs;  // coefficients of X'
    Eigen::MatrixXd cXss; // coefficients of X''

    Eigen::Vector3d eval(double s) const;
    Eigen::Vector3d deriv(double s) const;
    Eigen::Vector3d deriv2(double s) const;
};

FiberGeom make_geom(const FilamentShape& shape, const DiscretizationOps& ops);

// Midpoint-to-chord distance of the fiber piece [s_lo, s_hi].
double curvature_deviation(const FiberGeom& geom, double s_lo, double s_hi);

/** Result of the projected Newton closest-point solve on one fiber pair. */
struct ClosestResult {
    enum Status { Converged, NegativeHessian, MaxIters };
    Status status = MaxIters;
    double si = 0, sj = 0;     // arclength coordinates of the minimum
    Eigen::Vector3d d = Eigen::Vector3d::Zero(); // Xi(si) - Xj(sj), image-shifted
    int iterations = 0;

    bool ok() const { return status == Converged; }
};

// Local minimizer of the squared fiber-fiber distance from the given
// guess. The periodic image shift is frozen at the guess.
ClosestResult closest_points(const FiberGeom& gi, const FiberGeom& gj, double si0, double sj0,
                             const Domain& dom, const StericParams& params);

/** Arclength windows on both fibers around one distance minimum. */
struct InteractionInterval {
    double si_lo = 0, si_hi = 0;
    double sj_lo = 0, sj_hi = 0;
};

// Window where the quadratic model of the squared distance around the
// minimum stays below rmax; none when the minimum itself is beyond rmax.
std::optional<InteractionInterval>
interaction_interval(const FiberGeom& gi, const FiberGeom& gj, const ClosestResult& min,
                     const StericParams& params);

// Union of overlapping 2-D rectangles (overlap required in both the
// si and sj coordinates), sorted by si_lo.
std::vector<InteractionInterval> merge_intervals(std::vector<InteractionInterval> intervals);

/** Per-call counters from the segment algorithm. */
struct StericDiagnostics {
    long candidate_pairs = 0;  // piece pairs from the neighbor search
    long screened_pairs = 0;   // skipped by the straight-segment bound
    long newton_solves = 0;
    long newton_aborts = 0;    // negative-definite Hessian
    long newton_maxiters = 0;
    long fallback_pairs = 0;   // fiber pairs sent to the uniform algorithm
    long intervals = 0;        // merged intervals quadratured
};

/** Forces (per fiber, 3Nx interleaved), total pair energy, counters. */
struct StericForces {
    std::vector<Eigen::VectorXd> force;
    double energy = 0;
    StericDiagnostics diag;
};

// First-kind algorithm: resample every fiber at Nu uniform points,
// trapezoid weights, and sum the pair kernel over all close point pairs.
StericForces uniform_steric_forces(const std::vector<FilamentShape>& fibers,
                                   const DiscretizationOps& ops, int Nu, const Domain& dom,
                                   const StericParams& params);

// Segment algorithm: screen straight pieces, run Newton on surviving
// piece pairs, build and merge interaction intervals, and integrate the
// kernel with Gauss-Legendre rules sized to the Gaussian width.
StericForces segment_steric_forces(const std::vector<FilamentShape>& fibers,
                                   const DiscretizationOps& ops, const Domain& dom,
                                   const StericParams& params);

} // namespace slender

#endif
