#include "cfrom/closure_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cfrom/errors.hpp"
#include "cfrom/fe_core.hpp"
#include "cfrom/io.hpp"

namespace cfrom::closure {

std::string to_string(Ansatz a) { return a == Ansatz::Linear ? "linear" : "quadratic"; }

Ansatz parse_ansatz(const std::string& text) {
    if (text == "linear") return Ansatz::Linear;
    if (text == "quadratic") return Ansatz::Quadratic;
    throw ConfigError("unknown ansatz '" + text + "' (expected linear or quadratic)");
}

std::string to_string(SolveRoute route) {
    switch (route) {
        case SolveRoute::Ridge: return "ridge";
        case SolveRoute::Cholesky: return "cholesky";
        case SolveRoute::PseudoInverse: return "pseudo_inverse";
        case SolveRoute::LeastSquares: return "least_squares";
        case SolveRoute::MinimumNorm: return "minimum_norm";
    }
    return "unknown";
}

namespace {

SolveRoute parse_route(const std::string& text) {
    for (SolveRoute r : {SolveRoute::Ridge, SolveRoute::Cholesky, SolveRoute::PseudoInverse,
                         SolveRoute::LeastSquares, SolveRoute::MinimumNorm}) {
        if (to_string(r) == text) return r;
    }
    throw IoError("unknown solve route '" + text + "'");
}

double condition_number(const Eigen::VectorXd& eigenvalues) {
    const double lo = eigenvalues.minCoeff();
    const double hi = eigenvalues.maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace

ClosureTarget compute_gsnap(const rom::SnapCoeffs& coeffs, const pod::PodBasis& basis, int r,
                            int m) {
    if (r < 1 || r > m || m > basis.d()) {
        throw RangeError("closure ranks must satisfy 1 <= r <= m <= d, got r = " +
                         std::to_string(r) + ", m = " + std::to_string(m) +
                         ", d = " + std::to_string(basis.d()));
    }
    if (coeffs.a.rows() < m) {
        throw RangeError("snapshot coefficients hold " + std::to_string(coeffs.a.rows()) +
                         " rows, need " + std::to_string(m));
    }

    const Eigen::Index count = coeffs.a.cols();
    const auto phi_m = basis.modes.leftCols(m);
    const auto phi_r = basis.modes.leftCols(r);

    ClosureTarget target;
    target.r = r;
    target.m = m;
    target.g.resize(r, count);
    for (Eigen::Index j = 0; j < count; ++j) {
        const Eigen::VectorXd u_m = phi_m * coeffs.a.col(j).head(m);
        const Eigen::VectorXd u_r = phi_r * coeffs.a.col(j).head(r);
        const Eigen::VectorXd diff =
            fe::nonlinear_form(u_m, basis.mesh) - fe::nonlinear_form(u_r, basis.mesh);
        target.g.col(j) = phi_r.transpose() * diff;
    }
    return target;
}

NormalMatrices assemble_normal_matrices(const Eigen::MatrixXd& coeffs_r,
                                        const ClosureTarget& target) {
    const int r = target.r;
    if (coeffs_r.rows() < r || coeffs_r.cols() != target.g.cols()) {
        throw ShapeError("coefficient and target dimensions disagree");
    }
    const auto a = coeffs_r.topRows(r);
    NormalMatrices nm;
    nm.D = a * a.transpose();
    nm.D = 0.5 * (nm.D + nm.D.transpose()).eval();
    nm.E = target.g * a.transpose();
    nm.target_energy = target.g.squaredNorm();
    return nm;
}

ClosureModel solve_calibration(const NormalMatrices& normal, double reg, double cond_limit) {
    const Eigen::MatrixXd& D = normal.D;
    const Eigen::MatrixXd& E = normal.E;
    if (D.rows() != D.cols() || E.cols() != D.rows()) {
        throw ShapeError("normal matrices have inconsistent shapes");
    }
    if (reg < 0.0) throw RangeError("ridge parameter must be non-negative");
    if (D.size() == 0 || D.cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateDataError("normal matrix D is identically zero");
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(D);
    ClosureModel model;
    model.ansatz = Ansatz::Linear;
    model.cond_D = condition_number(eig.eigenvalues());

    // A~ D = E  <=>  D A~^T = E^T, D symmetric.
    const Eigen::Index r = D.rows();
    bool solved = false;
    if (reg > 0.0) {
        const Eigen::MatrixXd Dr = D + reg * Eigen::MatrixXd::Identity(r, r);
        model.A_tilde = Dr.llt().solve(E.transpose()).transpose();
        model.route = SolveRoute::Ridge;
        solved = true;
    } else if (model.cond_D <= cond_limit) {
        const Eigen::LLT<Eigen::MatrixXd> llt(D);
        if (llt.info() == Eigen::Success) {
            model.A_tilde = llt.solve(E.transpose()).transpose();
            model.route = SolveRoute::Cholesky;
            solved = true;
        }
    }
    if (!solved) {
        const Eigen::VectorXd& lam = eig.eigenvalues();
        const double cutoff = kPseudoInverseCutoff * lam.maxCoeff();
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(r);
        for (Eigen::Index k = 0; k < r; ++k) {
            if (lam(k) >= cutoff && lam(k) > 0.0) {
                inv(k) = 1.0 / lam(k);
            } else {
                ++model.dropped_directions;
            }
        }
        const Eigen::MatrixXd& V = eig.eigenvectors();
        model.A_tilde = E * V * inv.asDiagonal() * V.transpose();
        model.route = SolveRoute::PseudoInverse;
    }

    const Eigen::MatrixXd& At = model.A_tilde;
    model.fit_residual = std::max(
        0.0, (At * D * At.transpose()).trace() - 2.0 * (At * E.transpose()).trace() +
                 normal.target_energy);
    return model;
}

ClosureModel solve_calibration_quadratic(const Eigen::MatrixXd& coeffs_r,
                                         const ClosureTarget& target, double reg,
                                         bool fit_quadratic_terms) {
    const int r = target.r;
    if (coeffs_r.rows() < r || coeffs_r.cols() != target.g.cols()) {
        throw ShapeError("coefficient and target dimensions disagree");
    }
    if (reg < 0.0) throw RangeError("ridge parameter must be non-negative");

    const Eigen::Index count = coeffs_r.cols();
    const int n_pairs = fit_quadratic_terms ? r * (r + 1) / 2 : 0;
    const int p = r + n_pairs;
    const Eigen::Index rows = count + (reg > 0.0 ? p : 0);

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(rows, p);
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(rows, r);
    for (Eigen::Index j = 0; j < count; ++j) {
        const auto a = coeffs_r.col(j).head(r);
        X.row(j).head(r) = a.transpose();
        if (fit_quadratic_terms) {
            int c = r;
            for (int m = 0; m < r; ++m) {
                for (int n = m; n < r; ++n) X(j, c++) = a(m) * a(n);
            }
        }
        Y.row(j) = target.g.col(j).transpose();
    }
    if (reg > 0.0) {
        X.bottomRows(p) = std::sqrt(reg) * Eigen::MatrixXd::Identity(p, p);
    }

    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    const Eigen::MatrixXd theta = cod.solve(Y);  // p x r

    ClosureModel model;
    model.ansatz = fit_quadratic_terms ? Ansatz::Quadratic : Ansatz::Linear;
    model.underdetermined = count < p;
    if (reg > 0.0) {
        model.route = SolveRoute::Ridge;
    } else if (cod.rank() < p) {
        model.route = SolveRoute::MinimumNorm;
        model.dropped_directions = p - static_cast<int>(cod.rank());
    } else {
        model.route = SolveRoute::LeastSquares;
    }

    model.A_tilde = theta.topRows(r).transpose();
    if (fit_quadratic_terms) {
        rom::Tensor3 B(r);
        for (int i = 0; i < r; ++i) {
            int c = r;
            for (int m = 0; m < r; ++m) {
                for (int n = m; n < r; ++n, ++c) {
                    if (m == n) {
                        B(i, m, m) = theta(c, i);
                    } else {
                        B(i, m, n) = 0.5 * theta(c, i);
                        B(i, n, m) = 0.5 * theta(c, i);
                    }
                }
            }
        }
        model.B_tilde = std::move(B);
    }

    const auto a = coeffs_r.topRows(r);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a * a.transpose(),
                                                             Eigen::EigenvaluesOnly);
    model.cond_D = condition_number(eig.eigenvalues());
    model.fit_residual = calibration_residual(model, coeffs_r, target);
    return model;
}

Eigen::VectorXd evaluate(const ClosureModel& model, const Eigen::VectorXd& a) {
    Eigen::VectorXd g = model.A_tilde * a;
    if (model.B_tilde) g += model.B_tilde->contract(a);
    return g;
}

double calibration_residual(const ClosureModel& model, const Eigen::MatrixXd& coeffs_r,
                            const ClosureTarget& target) {
    const int r = model.r();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < target.g.cols(); ++j) {
        const Eigen::VectorXd a = coeffs_r.col(j).head(r);
        sum += (evaluate(model, a) - target.g.col(j)).squaredNorm();
    }
    return sum;
}

rom::RomOperators build_cfrom(const rom::RomOperators& ops, const ClosureModel& model) {
    if (model.A_tilde.rows() != ops.r || model.A_tilde.cols() != ops.r) {
        throw ShapeError("closure rank " + std::to_string(model.A_tilde.rows()) +
                         " does not match ROM rank " + std::to_string(ops.r));
    }
    if (model.sign != 1 && model.sign != -1) throw ConfigError("closure sign must be +1 or -1");

    rom::RomOperators out = ops;
    out.A += static_cast<double>(model.sign) * model.A_tilde;
    if (model.B_tilde) {
        if (model.B_tilde->rank() != ops.r) throw ShapeError("closure tensor rank mismatch");
        rom::Tensor3 correction = *model.B_tilde;
        correction *= static_cast<double>(model.sign);
        out.B += correction;
    }
    return out;
}

void write_model(const std::filesystem::path& base, const ClosureModel& model) {
    io::Header h;
    h.set("r", model.r());
    h.set("sign", model.sign);
    h.set("ansatz", to_string(model.ansatz));
    h.set("has_b_tilde", model.B_tilde ? 1 : 0);
    h.set("fit_residual", model.fit_residual);
    h.set("cond_D", model.cond_D);
    h.set("route", to_string(model.route));
    h.set("dropped_directions", model.dropped_directions);
    h.set("underdetermined", model.underdetermined ? 1 : 0);
    io::write_header(io::header_path(base), h);

    std::vector<double> values;
    const int r = model.r();
    for (int i = 0; i < r; ++i) {
        for (int m = 0; m < r; ++m) values.push_back(model.A_tilde(i, m));
    }
    if (model.B_tilde) {
        values.insert(values.end(), model.B_tilde->data().begin(), model.B_tilde->data().end());
    }
    io::write_f64(io::data_path(base), values);
}

ClosureModel read_model(const std::filesystem::path& base) {
    const io::Header h = io::read_header(io::header_path(base));
    ClosureModel model;
    const int r = static_cast<int>(h.get_long("r"));
    if (r < 1) throw IoError("closure rank must be positive");
    model.sign = static_cast<int>(h.get_long("sign"));
    model.ansatz = parse_ansatz(h.get("ansatz"));
    const bool has_b = h.get_long("has_b_tilde") != 0;
    if (h.contains("fit_residual")) model.fit_residual = h.get_double("fit_residual");
    if (h.contains("cond_D")) model.cond_D = h.get_double("cond_D");
    if (h.contains("route")) model.route = parse_route(h.get("route"));
    if (h.contains("dropped_directions")) {
        model.dropped_directions = static_cast<int>(h.get_long("dropped_directions"));
    }
    if (h.contains("underdetermined")) model.underdetermined = h.get_long("underdetermined") != 0;

    const auto rr = static_cast<std::size_t>(r);
    const std::vector<double> values =
        io::read_f64(io::data_path(base), rr * rr + (has_b ? rr * rr * rr : 0));
    model.A_tilde.resize(r, r);
    for (int i = 0; i < r; ++i) {
        for (int m = 0; m < r; ++m) model.A_tilde(i, m) = values[rr * i + m];
    }
    if (has_b) {
        rom::Tensor3 B(r);
        std::copy(values.begin() + static_cast<std::ptrdiff_t>(rr * rr), values.end(),
                  B.data().begin());
        model.B_tilde = std::move(B);
    }
    return model;
}

}  // namespace cfrom::closure
