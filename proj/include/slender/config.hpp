#ifndef SLENDER_CONFIG_HPP
#define SLENDER_CONFIG_HPP

#include "slender/domain.hpp"
#include "slender/mobility.hpp"
#include "slender/network.hpp"
#include "slender/stepper.hpp"
#include "slender/sterics.hpp"

#include <string>

namespace slender {

/**
 * Complete description of one simulation run. Parsed from a flat
 * key = value text file; derived quantities (beta, tbar, tau_fund) are
 * always recomputed from the primitives.
 */
struct SimConfig {
    std::string preset = "equilibrium"; // equilibrium | sedimentation | bundling

    FilamentParams fil;
    MobilityConfig mob;
    StepperConfig step;
    Domain domain;

    int nfibers = 1;
    double gravity = 0; // downward force density g (total force g L per fiber)

    bool sterics_on = false;
    double steric_B = 0;  // E0 = B kBT when both positive
    double steric_E0 = 0; // explicit override
    int steric_Ndelta = 1;
    int steric_Nseg = 10;

    bool crosslinks_on = false;
    CLParams cl;

    double dt_fund = 0;     // time step in units of tau_fund (wins over dt)
    double t_final = 0;     // absolute final time
    double t_final_fund = 0; // final time in units of tau_fund (wins)
    long nsteps = 0;        // explicit step count (wins over both)
    int output_every = 10;  // frames cadence, in steps
    double init_separation = 0; // sedimentation preset; 0 picks L/2

    // derived quantities
    double beta() const { return gravity * std::pow(fil.L, 3) / fil.kappa; }
    double tbar() const { return std::pow(fil.L, 4) * fil.mu / fil.kappa; }
    // slowest bending timescale
    double tau_fund() const {
        return 0.003 * 4.0 * M_PI * fil.mu * std::pow(fil.L, 4) /
               (fil.kappa * std::log(1.0 / fil.epshat()));
    }

    double resolved_dt() const { return dt_fund > 0 ? dt_fund * tau_fund() : step.dt; }
    long resolved_steps() const {
        if (nsteps > 0) return nsteps;
        double T = t_final_fund > 0 ? t_final_fund * tau_fund() : t_final;
        return long(std::llround(T / resolved_dt()));
    }
    StericParams steric_params() const;
};

// Fill defaults for a named experiment preset; throws on unknown names.
SimConfig preset_config(const std::string& name);

// Parse `key = value` lines ('#' comments); unknown keys throw
// std::runtime_error naming the key.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

// Echo of every key in parseable form (used by the run manifest).
std::string serialize_config(const SimConfig& cfg);

} // namespace slender

#endif
