#ifndef SLENDER_ANALYSIS_HPP
#define SLENDER_ANALYSIS_HPP

#include "slender/trajectory.hpp"

#include <vector>

namespace slender {

/** Pooled end-to-end distance statistics over frames and fibers. */
struct EndToEndStats {
    Eigen::VectorXd edges;  // nbins + 1 histogram edges
    Eigen::VectorXd pdf;    // normalized bin probabilities (sum 1)
    double mean = 0;
    double variance = 0;
    double se_mean = 0; // naive standard error over pooled samples
    long nsamples = 0;
};

EndToEndStats end_to_end_stats(const std::vector<TrajectoryFrame>& frames,
                               const DiscretizationOps& ops, double burn_in_time,
                               int nbins = 20, double lo = 0, double hi = -1);

// L1 distance between two normalized histograms on the same edges.
double histogram_l1(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/** Per-frame sedimentation observables (two-fiber layout uses fibers 0, 1). */
struct SedimentationSeries {
    Eigen::VectorXd time;
    Eigen::MatrixXd h;      // vertical extent per fiber (frames x fibers)
    Eigen::VectorXd d;      // midpoint separation of fibers 0 and 1
    Eigen::VectorXd dh;     // h(0) - h(1)
};

SedimentationSeries sedimentation_metrics(const std::vector<TrajectoryFrame>& frames,
                                          const DiscretizationOps& ops);

// vertical extent of one fiber from a fine resampling of the interpolant
double vertical_extent(const FilamentShape& shape, const DiscretizationOps& ops,
                       int nsample = 201);

/** Connected components of the cross-linked fiber graph. */
struct BundleReport {
    std::vector<int> label;        // component id per fiber
    int nbundles = 0;              // components with >= 2 fibers
    int ncomponents = 0;           // all components, singletons included
    double fiber_fraction = 0;     // fibers inside bundles
    double bundles_per_volume = 0; // nbundles / volume (0 when volume 0)
};

// Fibers are linked when they share at least two cross-links whose
// binding sites are at least L/4 apart along either fiber.
BundleReport bundle_detection(const std::vector<std::pair<std::int32_t, std::int32_t>>& links,
                              int nfibers, int Ncl, double L, double volume = 0);

} // namespace slender

#endif
