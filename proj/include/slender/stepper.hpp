#ifndef SLENDER_STEPPER_HPP
#define SLENDER_STEPPER_HPP

#include "slender/saddle.hpp"

#include <random>
#include <vector>

namespace slender {

enum class Scheme {
    DeterministicFull,   // fully implicit backward Euler, GMRES to tolerance
    DeterministicLagged, // locally implicit + capped residual correction
    Brownian,            // midpoint scheme with drift and bending-noise terms
};

enum class DriftMode {
    RFD,   // random finite difference of the mobility
    Dense, // explicit mobility difference (block-diagonal modes only)
};

struct StepperConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::DeterministicFull;
    double gmres_tol = 1e-3;
    int gmres_max_iters = 200;
    int lagged_cap = 10;      // iteration cap of the residual correction
    double rfd_delta = 1e-5;  // finite-difference size in units of L
    double kBT = 0;
    DriftMode drift = DriftMode::RFD;
    unsigned long long seed = 0;
};

/** Per-step solver diagnostics. */
struct StepStats {
    int iterations = 0;
    double residual = 0;
    bool lagged_fallback = false; // lagged scheme fell back (no history yet)
};

// Deterministic RNG substream for (seed, step, purpose): results do not
// depend on evaluation order or thread count.
std::mt19937_64 substream(unsigned long long seed, long step, int purpose);

/**
 * Advances fibers by one time step. The caller supplies the external
 * force (gravity, sterics, cross-linkers) evaluated at the current
 * configuration as a grand 3Nx-per-fiber vector; bending forces and
 * constraint forces are handled internally. The mobility operator is
 * updated to whatever configurations the scheme requires.
 */
class Stepper {
public:
    Stepper(const DiscretizationOps& ops, MobilityOperator& mob, const StepperConfig& cfg);

    void step(std::vector<FilamentShape>& fibers, const Eigen::VectorXd& Fext);

    const StepStats& stats() const { return stats_; }
    long step_index() const { return step_; }
    const Eigen::VectorXd& lambda() const { return lambda_prev_; }
    void reset(long step = 0);

    // weighted least-squares pseudo-inverse of K: minimizes the L2 norm
    // of K alpha - U fiber by fiber (K is rank deficient)
    Eigen::VectorXd K_pinv_apply(const SaddleSolver& sys, const Eigen::VectorXd& U) const;

private:
    void deterministic_step(std::vector<FilamentShape>& fibers, const Eigen::VectorXd& Fext);
    void lagged_step(std::vector<FilamentShape>& fibers, const Eigen::VectorXd& Fext);
    void brownian_step(std::vector<FilamentShape>& fibers, const Eigen::VectorXd& Fext);

    Eigen::VectorXd bending_forces(const std::vector<FilamentShape>& fibers) const;
    void advance(std::vector<FilamentShape>& fibers, const Eigen::VectorXd& alpha,
                 double dt) const;

    const DiscretizationOps& ops_;
    MobilityOperator& mob_;
    StepperConfig cfg_;
    Eigen::MatrixXd Wsqrt3_; // expanded weight square root for the K pseudo-inverse
    long step_ = 0;
    StepStats stats_;
    Eigen::VectorXd lambda_prev_;
    bool have_lambda_ = false;
};

} // namespace slender

#endif
