#include "cfrom/fe_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <lapacke.h>

#include "cfrom/errors.hpp"

namespace cfrom::fe {

Mesh1D::Mesh1D(int n_elements) : n_elements_(n_elements), h_(0.0) {
    if (n_elements < 2) {
        throw InvalidMeshError("mesh needs at least 2 elements, got " +
                               std::to_string(n_elements));
    }
    h_ = 1.0 / static_cast<double>(n_elements);
}

Mesh1D build_mesh(int n_elements) { return Mesh1D(n_elements); }

Eigen::VectorXd TriDiagMatrix::apply(const Eigen::VectorXd& x) const {
    const auto n = size();
    Eigen::VectorXd y = diag.cwiseProduct(x);
    if (n > 1) {
        y.head(n - 1) += upper.cwiseProduct(x.tail(n - 1));
        y.tail(n - 1) += lower.cwiseProduct(x.head(n - 1));
    }
    return y;
}

Eigen::MatrixXd TriDiagMatrix::apply(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd Y(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        Y.col(j) = apply(Eigen::VectorXd(X.col(j)));
    }
    return Y;
}

double TriDiagMatrix::inner(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const {
    return y.dot(apply(x));
}

Eigen::MatrixXd TriDiagMatrix::to_dense() const {
    const auto n = size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = diag(i);
        if (i + 1 < n) {
            A(i, i + 1) = upper(i);
            A(i + 1, i) = lower(i);
        }
    }
    return A;
}

Eigen::VectorXd TriDiagMatrix::solve(const Eigen::VectorXd& rhs) const {
    // dgtsv overwrites its inputs.
    Eigen::VectorXd dl = lower;
    Eigen::VectorXd d = diag;
    Eigen::VectorXd du = upper;
    Eigen::VectorXd b = rhs;
    const auto n = static_cast<lapack_int>(size());
    const lapack_int info =
        LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), d.data(), du.data(), b.data(), n);
    if (info != 0) {
        throw NumericalError("tridiagonal solve failed, dgtsv info = " + std::to_string(info));
    }
    return b;
}

TriDiagMatrix& TriDiagMatrix::operator+=(const TriDiagMatrix& other) {
    if (other.size() != size()) {
        throw ShapeError("tridiagonal sizes differ");
    }
    lower += other.lower;
    diag += other.diag;
    upper += other.upper;
    symmetric = symmetric && other.symmetric;
    return *this;
}

TriDiagMatrix& TriDiagMatrix::operator*=(double s) {
    lower *= s;
    diag *= s;
    upper *= s;
    return *this;
}

TriDiagMatrix operator+(TriDiagMatrix a, const TriDiagMatrix& b) { return a += b; }

TriDiagMatrix operator*(double s, TriDiagMatrix a) { return a *= s; }

namespace {

TriDiagMatrix constant_tridiag(int n, double diag, double off) {
    TriDiagMatrix A;
    A.diag = Eigen::VectorXd::Constant(n, diag);
    A.lower = Eigen::VectorXd::Constant(n - 1, off);
    A.upper = Eigen::VectorXd::Constant(n - 1, off);
    A.symmetric = true;
    return A;
}

// Global node k -> coefficient, with the Dirichlet zero at both ends.
inline double nodal(const Eigen::VectorXd& c, int k, int n_elements) {
    return (k == 0 || k == n_elements) ? 0.0 : c(k - 1);
}

}  // namespace

TriDiagMatrix assemble_mass(const Mesh1D& mesh) {
    const double h = mesh.h();
    return constant_tridiag(mesh.n_dofs(), 2.0 * h / 3.0, h / 6.0);
}

TriDiagMatrix assemble_stiffness(const Mesh1D& mesh) {
    const double h = mesh.h();
    return constant_tridiag(mesh.n_dofs(), 2.0 / h, -1.0 / h);
}

const GaussRule& element_rule() {
    static const GaussRule rule = [] {
        const double s = std::sqrt(0.6);
        GaussRule g{};
        g.points = {0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)};
        g.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
        return g;
    }();
    return rule;
}

Eigen::VectorXd convection_form(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                const Mesh1D& mesh) {
    const int ne = mesh.n_elements();
    const double h = mesh.h();
    const GaussRule& rule = element_rule();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_dofs());

    for (int e = 0; e < ne; ++e) {
        const double v0 = nodal(v, e, ne);
        const double v1 = nodal(v, e + 1, ne);
        const double dw = (nodal(w, e + 1, ne) - nodal(w, e, ne)) / h;
        double left = 0.0;
        double right = 0.0;
        for (std::size_t q = 0; q < GaussRule::size; ++q) {
            const double xi = rule.points[q];
            const double f = rule.weights[q] * h * ((1.0 - xi) * v0 + xi * v1) * dw;
            left += f * (1.0 - xi);
            right += f * xi;
        }
        if (e > 0) out(e - 1) += left;
        if (e + 1 < ne) out(e) += right;
    }
    return out;
}

Eigen::VectorXd nonlinear_form(const Eigen::VectorXd& u, const Mesh1D& mesh) {
    return convection_form(u, u, mesh);
}

TriDiagMatrix nonlinear_jacobian(const Eigen::VectorXd& u, const Mesh1D& mesh) {
    const int ne = mesh.n_elements();
    const int n = mesh.n_dofs();
    const double h = mesh.h();
    const GaussRule& rule = element_rule();

    TriDiagMatrix J;
    J.diag = Eigen::VectorXd::Zero(n);
    J.lower = Eigen::VectorXd::Zero(n - 1);
    J.upper = Eigen::VectorXd::Zero(n - 1);
    J.symmetric = false;

    const std::array<double, 2> dbasis = {-1.0 / h, 1.0 / h};
    for (int e = 0; e < ne; ++e) {
        const double u0 = nodal(u, e, ne);
        const double u1 = nodal(u, e + 1, ne);
        const double ux = (u1 - u0) / h;

        // local[a][b] = integral of (L_b u_x + u L_b') L_a over the element
        double local[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        for (std::size_t q = 0; q < GaussRule::size; ++q) {
            const double xi = rule.points[q];
            const double wq = rule.weights[q] * h;
            const std::array<double, 2> basis = {1.0 - xi, xi};
            const double uq = basis[0] * u0 + basis[1] * u1;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    local[a][b] += wq * (basis[b] * ux + uq * dbasis[b]) * basis[a];
                }
            }
        }

        for (int a = 0; a < 2; ++a) {
            const int row = e + a - 1;
            if (row < 0 || row >= n) continue;
            for (int b = 0; b < 2; ++b) {
                const int col = e + b - 1;
                if (col < 0 || col >= n) continue;
                if (row == col) {
                    J.diag(row) += local[a][b];
                } else if (col == row + 1) {
                    J.upper(row) += local[a][b];
                } else {
                    J.lower(col) += local[a][b];
                }
            }
        }
    }
    return J;
}

double l2_norm(const TriDiagMatrix& mass, const Eigen::VectorXd& x) {
    return std::sqrt(std::max(0.0, mass.quadratic_form(x)));
}

}  // namespace cfrom::fe
