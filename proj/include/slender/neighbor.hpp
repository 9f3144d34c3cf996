#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "slender/domain.hpp"

namespace slender {

/**
 * Cell-list neighbor search. Returns all unordered point pairs (i < j) whose
 * minimum-image distance is below r_cut. Exact: agrees with the all-pairs scan.
 */
std::vector<std::pair<int, int>> neighbor_search(const Eigen::MatrixX3d& pts, double r_cut,
                                                 const Domain& dom);

} // namespace slender
