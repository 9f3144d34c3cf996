#ifndef SLENDER_TRAJECTORY_HPP
#define SLENDER_TRAJECTORY_HPP

#include "slender/filament.hpp"
#include "slender/network.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace slender {

/**
 * One stored snapshot: fiber states (tangents + midpoints reconstruct the
 * positions exactly), solver and contact diagnostics, and the
 * cross-linker occupancy. Serialization round-trips bit exactly.
 */
struct TrajectoryFrame {
    double time = 0;
    std::vector<Eigen::Matrix3Xd> tau;
    std::vector<Eigen::Vector3d> midpoint;
    // diagnostics
    std::int32_t gmres_iterations = 0;
    std::int64_t newton_failures = 0;
    std::int64_t contacts = 0;
    // cross-linker snapshot
    std::vector<std::int32_t> cl_state;
    std::vector<std::pair<std::int32_t, std::int32_t>> cl_links;

    bool operator==(const TrajectoryFrame&) const;
};

/** File header: enough to rebuild the discretization for analysis. */
struct TrajectoryHeader {
    std::int32_t nfibers = 0;
    std::int32_t N = 0;
    double L = 0, a = 0, kappa = 0, mu = 0;
};

/** Streaming writer; frames already written survive a later abort. */
class TrajectoryWriter {
public:
    TrajectoryWriter(const std::string& path, const TrajectoryHeader& header);
    void append(const TrajectoryFrame& frame);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    TrajectoryHeader header_;
};

std::vector<TrajectoryFrame> read_trajectory(const std::string& path, TrajectoryHeader& header);

// Per-frame, per-fiber summary table (time, fiber, midpoint, end-to-end
// distance, vertical extent) for plotting.
void export_csv(const std::string& path, const std::vector<TrajectoryFrame>& frames,
                const DiscretizationOps& ops);

} // namespace slender

#endif
