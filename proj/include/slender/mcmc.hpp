#ifndef SLENDER_MCMC_HPP
#define SLENDER_MCMC_HPP

#include "slender/filament.hpp"

#include <random>
#include <vector>

namespace slender {

/**
 * Metropolis sampler of the equilibrium Gibbs-Boltzmann distribution of
 * a single free fiber: density proportional to exp(-E_bend / kBT) over
 * unit tangent configurations. Proposals rotate one random tangent by a
 * small random angle; the step size adapts during burn-in and samples
 * are thinned by the measured autocorrelation of the end-to-end
 * distance.
 */
struct MCMCStats {
    double sigma = 0;        // final proposal angle scale
    double acceptance = 0;   // post-burn-in acceptance rate
    double autocorr_time = 0; // integrated, in sweeps
    int thin = 1;            // sweeps between retained samples
};

std::vector<FilamentShape> mcmc_equilibrium_sampler(const DiscretizationOps& ops, double kBT,
                                                    int nsamples, std::mt19937_64& rng,
                                                    MCMCStats* stats = nullptr);

// distance between the fiber endpoints
double end_to_end_distance(const FilamentShape& shape, const DiscretizationOps& ops);

} // namespace slender

#endif
