#ifndef SLENDER_NETWORK_HPP
#define SLENDER_NETWORK_HPP

#include "slender/domain.hpp"
#include "slender/filament.hpp"

#include <random>
#include <utility>
#include <vector>

namespace slender {

/**
 * Transient cross-linker parameters. Linkers are Hookean springs with
 * rest length ell_c that attach to a uniform grid of Ncl binding sites
 * per fiber; the reservoir of free linkers is unlimited.
 */
struct CLParams {
    int Ncl = 16;        // binding sites per fiber
    double Kc = 1;       // spring stiffness, force / length
    double ell_c = 0.05; // rest length
    double kon = 0;      // free-end attachment rate density (per length per time)
    double koff = 0;     // singly-bound detach rate
    double kon_s = 0;    // second-end base binding rate
    double koff_s = 0;   // doubly-bound detach rate per end
    double kBT = 1;

    double ds(double L) const { return L / (Ncl - 1); }
    // pairs farther than this have negligible second-end binding rate
    double cutoff() const { return ell_c + 2.0 * std::sqrt(kBT / Kc); }
};

// Second-end binding rate at end-to-end distance ell: the base rate
// weighted by the Boltzmann factor of the spring energy.
double binding_rate(double ell, const CLParams& params);

/**
 * Cross-linker occupancy state. Sites are numbered fiber-major
 * (site = fiber * Ncl + index); each site holds at most one linker end.
 * A doubly-bound linker occupies two sites on distinct fibers.
 */
struct CrossLinkNetwork {
    enum SiteState : int { Free = 0, Singly = 1, Doubly = 2 };
    int nf = 0;
    int Ncl = 0;
    std::vector<int> state;                    // per site
    std::vector<std::pair<int, int>> links;    // doubly-bound site pairs

    CrossLinkNetwork() = default;
    CrossLinkNetwork(int nfibers, int ncl)
        : nf(nfibers), Ncl(ncl), state(size_t(nfibers) * ncl, Free) {}

    int fiber_of(int site) const { return site / Ncl; }
    double s_of(int site, double L) const { return (site % Ncl) * L / (Ncl - 1); }
    bool valid() const; // occupancy invariants hold
};

// Binding-site positions of all fibers, site-major (nf*Ncl x 3).
Eigen::MatrixX3d binding_sites(const std::vector<FilamentShape>& fibers,
                               const DiscretizationOps& ops, const CLParams& params);

// Exact stochastic simulation of the four linker reactions over dt with
// the geometry frozen: attach a first end, detach a single end, bind the
// free end to a nearby site on another fiber, release one end of a link.
void gillespie_update(CrossLinkNetwork& net, const std::vector<FilamentShape>& fibers,
                      const DiscretizationOps& ops, double dt, std::mt19937_64& rng,
                      const Domain& dom, const CLParams& params);

// Total spring energy of the doubly-bound linkers.
double crosslink_energy(const CrossLinkNetwork& net, const std::vector<FilamentShape>& fibers,
                        const DiscretizationOps& ops, const Domain& dom,
                        const CLParams& params);

// Spring forces of the doubly-bound linkers scattered to the Chebyshev
// nodes (per fiber, 3Nx interleaved); equal and opposite per link.
std::vector<Eigen::VectorXd> crosslink_forces(const CrossLinkNetwork& net,
                                              const std::vector<FilamentShape>& fibers,
                                              const DiscretizationOps& ops, const Domain& dom,
                                              const CLParams& params);

} // namespace slender

#endif
