#ifndef SLENDER_SIM_HPP
#define SLENDER_SIM_HPP

#include "slender/config.hpp"
#include "slender/trajectory.hpp"

#include <string>
#include <vector>

namespace slender {

/** Outcome of one simulation run. */
struct SimResult {
    std::vector<TrajectoryFrame> frames;
    long steps_completed = 0;
    bool aborted = false;     // solver failure cut the run short
    std::string error;        // diagnostic when aborted
    std::string trajectory_path;
    std::string manifest_path;
};

// Initial fiber configurations for a config: straight fibers with
// preset-dependent placement, deterministic in the seed.
std::vector<FilamentShape> initial_fibers(const SimConfig& cfg, const DiscretizationOps& ops);

/**
 * Runs the configured simulation, streaming frames to
 * output_dir/trajectory.bin (plus a manifest echoing the full
 * configuration). Solver failures abort the run but keep every frame
 * written so far. Empty output_dir skips the files.
 */
SimResult run_simulation(const SimConfig& cfg, const std::string& output_dir);

} // namespace slender

#endif
