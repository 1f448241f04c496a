#pragma once

// Full-order model for u_t - nu u_xx + u u_x = 0 on (0, 1), u = 0 at both
// ends, discretized with linear elements and backward Euler in time.

#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cfrom/fe_core.hpp"

namespace cfrom::fom {

struct FomConfig {
    double nu = 1e-3;
    double dt = 1e-3;
    double t_end = 1.0;
    int n_elements = 1024;
    int snapshot_stride = 10;
    double newton_tol = 1e-12;
    int newton_max_iter = 25;

    /// Throws ConfigError on nu <= 0, dt <= 0, t_end < 0, stride < 1, or a
    /// t_end that is not an integer number of steps within 1e-9.
    void validate() const;

    /// Number of time steps t_end / dt.
    long n_steps() const;
};

/// Stored FOM states. Column j of `data` holds the interior nodal values at
/// `times[j]`; the first column is the initial condition at t = 0.
struct SnapshotSet {
    fe::Mesh1D mesh{2};
    FomConfig config;
    Eigen::MatrixXd data;
    std::vector<double> times;

    Eigen::Index count() const noexcept { return data.cols(); }
    Eigen::VectorXd snapshot(Eigen::Index j) const { return data.col(j); }
};

/// Time stamp of stored snapshot j.
double snapshot_time(const FomConfig& cfg, long j);

/// L2 projection of the step that equals `left_value` on (0, jump] and 0 on
/// (jump, 1). The load vector is integrated exactly against the hats.
Eigen::VectorXd project_step(const fe::Mesh1D& mesh, double jump, double left_value);

/// L2 projection of the Burgers initial condition (1 on (0, 1/2], 0 after).
Eigen::VectorXd project_initial_condition(const fe::Mesh1D& mesh);

struct NewtonReport {
    int iterations = 0;
    /// Residual norm before each update and at exit.
    std::vector<double> residuals;
};

class BurgersFom {
public:
    explicit BurgersFom(FomConfig cfg);

    const FomConfig& config() const noexcept { return cfg_; }
    const fe::Mesh1D& mesh() const noexcept { return mesh_; }
    const fe::TriDiagMatrix& mass() const noexcept { return mass_; }
    const fe::TriDiagMatrix& stiffness() const noexcept { return stiffness_; }

    /// Residual M (u - u_old) / dt + nu K u + N(u).
    Eigen::VectorXd residual(const Eigen::VectorXd& u, const Eigen::VectorXd& u_old) const;

    /// One backward Euler step solved by Newton with the analytic Jacobian.
    /// Converged once ||R|| <= newton_tol * max(1, ||u_old||).
    Eigen::VectorXd step(const Eigen::VectorXd& u_old, NewtonReport* report = nullptr) const;

    /// Called after each accepted step with (step index, time, state).
    using StepObserver = std::function<void(long, double, const Eigen::VectorXd&)>;

    /// Integrates from the projected initial condition to t_end, keeping every
    /// snapshot_stride-th state (the initial state included).
    SnapshotSet run(const StepObserver& observer = {}) const;

private:
    FomConfig cfg_;
    fe::Mesh1D mesh_;
    fe::TriDiagMatrix mass_;
    fe::TriDiagMatrix stiffness_;
};

Eigen::VectorXd step_backward_euler(const Eigen::VectorXd& u_old, const FomConfig& cfg);

SnapshotSet run_fom(const FomConfig& cfg);

void write_snapshots(const std::filesystem::path& base, const SnapshotSet& snaps);
SnapshotSet read_snapshots(const std::filesystem::path& base);

}  // namespace cfrom::fom
