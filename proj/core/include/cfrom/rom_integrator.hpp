#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cfrom/galerkin_rom.hpp"
#include "cfrom/pod_basis.hpp"

namespace cfrom::rom {

/// Column k holds the coefficients at time k * dt.
struct RomTrajectory {
    Eigen::MatrixXd a;
    double dt = 0.0;

    int r() const noexcept { return static_cast<int>(a.rows()); }
    long n_steps() const noexcept { return static_cast<long>(a.cols()) - 1; }
    double time(long k) const noexcept { return static_cast<double>(k) * dt; }

    /// Column index of time t. Throws LookupError unless t lies on the grid
    /// within 1e-9.
    long index_of(double t) const;
};

/// b + A a + sum_{m,n} B(i, m, n) a_n a_m.
Eigen::VectorXd rom_rhs(const RomOperators& ops, const Eigen::VectorXd& a);

/// a^{k+1} = a^k + dt rom_rhs(a^k). Stores every state. Throws BlowUpError
/// carrying the step index as soon as a state stops being finite.
RomTrajectory integrate_forward_euler(const RomOperators& ops, const Eigen::VectorXd& a0,
                                      double dt, double t_end);

/// FE coefficient vectors sum_j a_j(t) phi_j at the requested times.
std::vector<Eigen::VectorXd> reconstruct(const RomTrajectory& traj, const pod::PodBasis& basis,
                                         const std::vector<double>& at_times);

}  // namespace cfrom::rom
