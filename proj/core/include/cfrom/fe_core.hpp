#pragma once

// Piecewise-linear finite elements on a uniform grid of [0, 1] with
// homogeneous Dirichlet conditions. Boundary nodes are eliminated, so every
// vector and matrix here lives on the n_elements - 1 interior nodes.

#include <array>
#include <cstddef>

#include <Eigen/Dense>

namespace cfrom::fe {

class Mesh1D {
public:
    /// Throws InvalidMeshError when n_elements < 2.
    explicit Mesh1D(int n_elements);

    int n_elements() const noexcept { return n_elements_; }
    int n_dofs() const noexcept { return n_elements_ - 1; }
    double h() const noexcept { return h_; }

    /// Coordinate of global node k, 0 <= k <= n_elements.
    double node(int k) const noexcept { return k * h_; }

    friend bool operator==(const Mesh1D&, const Mesh1D&) = default;

private:
    int n_elements_;
    double h_;
};

Mesh1D build_mesh(int n_elements);

/// Tridiagonal matrix over the interior DOFs. `lower[i]` couples row i + 1
/// to column i and `upper[i]` couples row i to column i + 1.
struct TriDiagMatrix {
    Eigen::VectorXd lower;
    Eigen::VectorXd diag;
    Eigen::VectorXd upper;
    bool symmetric = false;

    std::ptrdiff_t size() const noexcept { return diag.size(); }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    /// Applies the matrix to every column of X.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;

    /// y^T A x.
    double inner(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const;
    double quadratic_form(const Eigen::VectorXd& x) const { return inner(x, x); }

    Eigen::MatrixXd to_dense() const;

    /// Gaussian elimination with partial pivoting (LAPACK gtsv scheme).
    /// Throws NumericalError on an exactly singular pivot.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    TriDiagMatrix& operator+=(const TriDiagMatrix& other);
    TriDiagMatrix& operator*=(double s);
};

TriDiagMatrix operator+(TriDiagMatrix a, const TriDiagMatrix& b);
TriDiagMatrix operator*(double s, TriDiagMatrix a);

/// Consistent mass matrix: 2h/3 on the diagonal, h/6 off it.
TriDiagMatrix assemble_mass(const Mesh1D& mesh);

/// Stiffness matrix: 2/h on the diagonal, -1/h off it.
TriDiagMatrix assemble_stiffness(const Mesh1D& mesh);

/// Three-point Gauss-Legendre rule mapped to the reference element [0, 1].
/// Exact for polynomials up to degree five.
struct GaussRule {
    static constexpr std::size_t size = 3;
    std::array<double, size> points;
    std::array<double, size> weights;
};

const GaussRule& element_rule();

/// Entry i is the integral of v * dw/dx * phi_i over [0, 1], where v and w
/// are interior coefficient vectors and phi_i is the hat at interior node i.
Eigen::VectorXd convection_form(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                const Mesh1D& mesh);

/// The Burgers nonlinearity: entry i is the integral of u u_x phi_i.
Eigen::VectorXd nonlinear_form(const Eigen::VectorXd& u, const Mesh1D& mesh);

/// Jacobian of nonlinear_form with respect to the coefficients of u:
/// J_ik = integral of (phi_k u_x + u phi_k') phi_i.
TriDiagMatrix nonlinear_jacobian(const Eigen::VectorXd& u, const Mesh1D& mesh);

/// Mass-weighted L2 norm sqrt(x^T M x).
double l2_norm(const TriDiagMatrix& mass, const Eigen::VectorXd& x);

}  // namespace cfrom::fe
