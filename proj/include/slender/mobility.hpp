#ifndef SLENDER_MOBILITY_HPP
#define SLENDER_MOBILITY_HPP

#include "slender/domain.hpp"
#include "slender/filament.hpp"
#include "slender/rpy.hpp"
#include "slender/selfquad.hpp"

#include <vector>

#include <Eigen/Dense>

namespace slender {

enum class MobilityMode {
    LocalOnly,    // block diagonal special quadrature only
    Oversampled,  // reference mobility, self + nonlocal on the upsampled grid
    FatCorrected, // oversampled at a fattened radius with a local SPD correction
    FirstKind,    // oversampled nonlocal + special-quadrature self; not SPD, test fixture
};

struct MobilityConfig {
    MobilityMode mode = MobilityMode::LocalOnly;
    double epshat_star = 1e-2; // fattened aspect ratio (fat-corrected mode)
    int Nu = 100;              // oversampling count
    double lambda_star = 1e-3; // eigenvalue floor in units of 1/(8 pi mu L)
    int N2 = 0;                // local GL count; 0 picks the default for eps
    bool truncate = true;      // apply the eigenvalue floor to the local matrices
};

/**
 * Force -> velocity map for a collection of fibers sharing one
 * discretization. update() rebuilds the shape-dependent pieces (local
 * dense matrices, upsampled positions, noise factors); apply() acts on
 * grand force vectors (3Nx per fiber, interleaved, fibers concatenated).
 */
class MobilityOperator {
public:
    MobilityOperator(const DiscretizationOps& ops, const MobilityConfig& cfg, const Domain& dom);

    // build the noise factorizations during update (needed for Brownian runs)
    void set_need_noise(bool need) { need_noise_ = need; }

    void update(const std::vector<FilamentShape>& fibers);

    int nfibers() const { return nfib_; }
    const MobilityConfig& config() const { return cfg_; }
    const DiscretizationOps& ops() const { return ops_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& F) const;

    // true block-diagonal part of the operator (dense per fiber)
    std::vector<Eigen::MatrixXd> local_blocks() const;
    // SPD per-fiber approximations of the local blocks, for preconditioning
    const std::vector<Eigen::MatrixXd>& precond_blocks() const { return precond_; }

    // number of standard Gaussians consumed by one noise draw
    int noise_size() const;
    // velocity with covariance equal to the operator (SPD modes only)
    Eigen::VectorXd noise_velocity(const Eigen::VectorXd& W) const;
    // local mode only: symmetric square root and its inverse
    Eigen::VectorXd sqrt_apply(const Eigen::VectorXd& eta) const;
    Eigen::VectorXd inv_sqrt_apply(const Eigen::VectorXd& eta) const;

    // true eigenvalue floor in physical units
    double lambda_floor() const;
    bool noise_factor_fell_back() const { return chol_fallback_; }

private:
    struct FiberLocal {
        Eigen::MatrixXd sqs;       // special-quadrature local matrix, true radius
        Eigen::MatrixXd sqs_star;  // same at the fattened radius
        Eigen::MatrixXd os_self;   // oversampled self block (FirstKind)
        Eigen::MatrixXd noise_sqrt; // local sqrt factor (mode dependent)
        Eigen::MatrixXd inv_sqrt;  // local mode only
    };

    Eigen::MatrixXd local_sqs(const Eigen::VectorXd& X, const SelfQuadTables& t) const;
    Eigen::MatrixXd oversampled_self_block(const Eigen::MatrixX3d& pts, double ahat) const;
    Eigen::VectorXd oversampled_pipeline(const Eigen::VectorXd& F, double ahat) const;

    const DiscretizationOps& ops_;
    MobilityConfig cfg_;
    Domain dom_;
    bool need_noise_ = false;
    mutable bool chol_fallback_ = false;
    int nfib_ = 0;
    SelfQuadTables tables_;      // true radius
    SelfQuadTables tables_star_; // fattened radius
    Eigen::MatrixXd Winv3_;      // expanded L2 inverse weights
    Eigen::MatrixXd Eu_;         // scalar upsample matrix Nu x Nx
    Eigen::MatrixXd proj_;       // scalar projection Winv * Eu^T * Wu
    ChebGrid ugrid_;
    std::vector<FiberLocal> fib_;
    std::vector<Eigen::MatrixXd> precond_;
    Eigen::MatrixX3d upts_;      // all upsampled points, fibers concatenated
    Eigen::MatrixXd grand_sqrt_; // factor of the grand upsampled RPY matrix
};

} // namespace slender

#endif
