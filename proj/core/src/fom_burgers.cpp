#include "cfrom/fom_burgers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cfrom/errors.hpp"
#include "cfrom/io.hpp"

namespace cfrom::fom {

namespace {

long checked_step_count(double t_end, double dt) {
    const double ratio = t_end / dt;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-9) {
        std::ostringstream msg;
        msg << "t_end / dt = " << ratio << " is not an integer step count";
        throw ConfigError(msg.str());
    }
    return static_cast<long>(n);
}

// Integral of the hat centred at `center` from -inf to x.
double hat_antiderivative(double x, double center, double h) {
    const double t = (x - center) / h;
    if (t <= -1.0) return 0.0;
    if (t <= 0.0) return 0.5 * h * (1.0 + t) * (1.0 + t);
    if (t <= 1.0) return h * (1.0 - 0.5 * (1.0 - t) * (1.0 - t));
    return h;
}

std::string at_time(double t) {
    std::ostringstream s;
    s << " (at t = " << t << ")";
    return s.str();
}

}  // namespace

void FomConfig::validate() const {
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
    if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be at least 1");
    if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
    if (newton_max_iter < 1) throw ConfigError("newton_max_iter must be at least 1");
    if (n_elements < 2) throw ConfigError("n_elements must be at least 2");
    checked_step_count(t_end, dt);
}

long FomConfig::n_steps() const { return checked_step_count(t_end, dt); }

double snapshot_time(const FomConfig& cfg, long j) {
    return static_cast<double>(j * cfg.snapshot_stride) * cfg.dt;
}

Eigen::VectorXd project_step(const fe::Mesh1D& mesh, double jump, double left_value) {
    const int n = mesh.n_dofs();
    const double h = mesh.h();
    Eigen::VectorXd load(n);
    for (int i = 0; i < n; ++i) {
        const double xi = mesh.node(i + 1);
        load(i) = left_value * (hat_antiderivative(jump, xi, h) - hat_antiderivative(0.0, xi, h));
    }
    return fe::assemble_mass(mesh).solve(load);
}

Eigen::VectorXd project_initial_condition(const fe::Mesh1D& mesh) {
    return project_step(mesh, 0.5, 1.0);
}

BurgersFom::BurgersFom(FomConfig cfg)
    : cfg_(cfg),
      mesh_((cfg.validate(), cfg.n_elements)),
      mass_(fe::assemble_mass(mesh_)),
      stiffness_(fe::assemble_stiffness(mesh_)) {}

Eigen::VectorXd BurgersFom::residual(const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& u_old) const {
    Eigen::VectorXd r = mass_.apply(Eigen::VectorXd(u - u_old)) / cfg_.dt;
    r += cfg_.nu * stiffness_.apply(u);
    r += fe::nonlinear_form(u, mesh_);
    return r;
}

Eigen::VectorXd BurgersFom::step(const Eigen::VectorXd& u_old, NewtonReport* report) const {
    if (!u_old.allFinite()) {
        throw DivergenceError("non-finite state entering backward Euler step");
    }
    const double tol = cfg_.newton_tol * std::max(1.0, u_old.norm());
    const fe::TriDiagMatrix linear_part = (1.0 / cfg_.dt) * mass_ + cfg_.nu * stiffness_;

    NewtonReport local;
    NewtonReport& rep = report ? *report : local;
    rep = {};

    Eigen::VectorXd u = u_old;
    for (int it = 0;; ++it) {
        const Eigen::VectorXd r = residual(u, u_old);
        const double rnorm = r.norm();
        rep.residuals.push_back(rnorm);
        if (!std::isfinite(rnorm)) {
            throw DivergenceError("non-finite Newton residual");
        }
        if (rnorm <= tol) {
            rep.iterations = it;
            return u;
        }
        if (it == cfg_.newton_max_iter) {
            throw NonConvergenceError("Newton did not converge in " + std::to_string(it) +
                                          " iterations, residual " + io::format_double(rnorm),
                                      rnorm);
        }
        const fe::TriDiagMatrix jac = linear_part + fe::nonlinear_jacobian(u, mesh_);
        u -= jac.solve(r);
        if (!u.allFinite()) {
            throw DivergenceError("non-finite Newton update");
        }
    }
}

SnapshotSet BurgersFom::run(const StepObserver& observer) const {
    const long steps = cfg_.n_steps();
    const long stride = cfg_.snapshot_stride;
    const long stored = steps / stride + 1;

    SnapshotSet snaps;
    snaps.mesh = mesh_;
    snaps.config = cfg_;
    snaps.data.resize(mesh_.n_dofs(), stored);
    snaps.times.reserve(static_cast<std::size_t>(stored));

    Eigen::VectorXd u = project_initial_condition(mesh_);
    snaps.data.col(0) = u;
    snaps.times.push_back(0.0);
    if (observer) observer(0, 0.0, u);

    for (long k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * cfg_.dt;
        try {
            u = step(u);
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError(e.what() + at_time(t), e.last_residual());
        } catch (const DivergenceError& e) {
            throw DivergenceError(e.what() + at_time(t));
        }
        if (observer) observer(k, t, u);
        if (k % stride == 0) {
            const long j = k / stride;
            snaps.data.col(j) = u;
            snaps.times.push_back(snapshot_time(cfg_, j));
        }
    }
    return snaps;
}

Eigen::VectorXd step_backward_euler(const Eigen::VectorXd& u_old, const FomConfig& cfg) {
    return BurgersFom(cfg).step(u_old);
}

SnapshotSet run_fom(const FomConfig& cfg) { return BurgersFom(cfg).run(); }

void write_snapshots(const std::filesystem::path& base, const SnapshotSet& snaps) {
    const FomConfig& cfg = snaps.config;
    io::Header h;
    h.set("n_elements", snaps.mesh.n_elements());
    h.set("nu", cfg.nu);
    h.set("dt", cfg.dt);
    h.set("t_end", cfg.t_end);
    h.set("snapshot_stride", cfg.snapshot_stride);
    h.set("count", static_cast<long>(snaps.count()));
    io::write_header(io::header_path(base), h);
    // Column-major storage already lays records out back to back.
    io::write_f64(io::data_path(base),
                  std::span<const double>(snaps.data.data(),
                                          static_cast<std::size_t>(snaps.data.size())));
}

SnapshotSet read_snapshots(const std::filesystem::path& base) {
    const io::Header h = io::read_header(io::header_path(base));
    SnapshotSet snaps;
    snaps.config.n_elements = static_cast<int>(h.get_long("n_elements"));
    snaps.config.nu = h.get_double("nu");
    snaps.config.dt = h.get_double("dt");
    snaps.config.t_end = h.get_double("t_end");
    snaps.config.snapshot_stride = static_cast<int>(h.get_long("snapshot_stride"));
    const long count = h.get_long("count");
    if (count < 1) throw IoError("snapshot count must be positive");
    snaps.mesh = fe::Mesh1D(snaps.config.n_elements);

    const auto n = static_cast<std::size_t>(snaps.mesh.n_dofs());
    const std::vector<double> values =
        io::read_f64(io::data_path(base), n * static_cast<std::size_t>(count));
    snaps.data = Eigen::Map<const Eigen::MatrixXd>(values.data(), snaps.mesh.n_dofs(), count);
    snaps.times.reserve(static_cast<std::size_t>(count));
    for (long j = 0; j < count; ++j) {
        snaps.times.push_back(snapshot_time(snaps.config, j));
    }
    return snaps;
}

}  // namespace cfrom::fom
