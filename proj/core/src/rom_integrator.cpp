#include "cfrom/rom_integrator.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "cfrom/errors.hpp"

namespace cfrom::rom {

long RomTrajectory::index_of(double t) const {
    const double k = std::round(t / dt);
    if (k < 0 || k > static_cast<double>(n_steps()) || std::abs(t - k * dt) > 1e-9) {
        std::ostringstream msg;
        msg << "time " << t << " is not on the trajectory grid (dt = " << dt << ", "
            << n_steps() << " steps)";
        throw LookupError(msg.str());
    }
    return static_cast<long>(k);
}

Eigen::VectorXd rom_rhs(const RomOperators& ops, const Eigen::VectorXd& a) {
    if (a.size() != ops.r) {
        throw ShapeError("state has length " + std::to_string(a.size()) + ", operators have r = " +
                         std::to_string(ops.r));
    }
    Eigen::VectorXd f = ops.b + ops.A * a;
    f += ops.B.contract(a);
    return f;
}

RomTrajectory integrate_forward_euler(const RomOperators& ops, const Eigen::VectorXd& a0,
                                      double dt, double t_end) {
    if (!(dt > 0.0)) throw RangeError("ROM time step must be positive");
    if (!(t_end >= 0.0)) throw RangeError("ROM final time must be non-negative");
    const double ratio = t_end / dt;
    const double steps_d = std::round(ratio);
    if (std::abs(ratio - steps_d) > 1e-9) {
        throw RangeError("t_end / dt is not an integer step count");
    }
    if (a0.size() != ops.r) throw ShapeError("initial state length does not match r");

    const auto steps = static_cast<long>(steps_d);
    RomTrajectory traj;
    traj.dt = dt;
    traj.a.resize(ops.r, steps + 1);
    traj.a.col(0) = a0;

    Eigen::VectorXd a = a0;
    for (long k = 0; k < steps; ++k) {
        a += dt * rom_rhs(ops, a);
        if (!a.allFinite()) {
            throw BlowUpError("ROM state became non-finite at step " + std::to_string(k + 1),
                              k + 1);
        }
        traj.a.col(k + 1) = a;
    }
    return traj;
}

std::vector<Eigen::VectorXd> reconstruct(const RomTrajectory& traj, const pod::PodBasis& basis,
                                         const std::vector<double>& at_times) {
    if (traj.r() > basis.d()) throw ShapeError("trajectory rank exceeds basis size");
    const auto phi = basis.modes.leftCols(traj.r());
    std::vector<Eigen::VectorXd> fields;
    fields.reserve(at_times.size());
    for (double t : at_times) {
        fields.emplace_back(phi * traj.a.col(traj.index_of(t)));
    }
    return fields;
}

}  // namespace cfrom::rom
