#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lploc/operator.hpp"

namespace lploc {

/// Full diagonalization of a finite-volume operator.  Eigenvalues ascend;
/// each eigenvector is sign-fixed so its first nonzero component is
/// positive.  Residual and orthonormality are validated at construction of
/// the system, so downstream analysis may rely on them.
struct EigenSystem {
    Box box;
    double epsilon;
    std::vector<double> eigenvalues;
    Eigen::MatrixXd vectors;  // column j pairs with eigenvalues[j]
    double residual_tol;
};

inline constexpr std::size_t kDenseSiteBudget = 4096;

inline EigenSystem eig_sym(const FiniteOperator& h, double tol = 1e-10) {
    const std::size_t n = h.box.site_count();
    if (n > kDenseSiteBudget)
        throw std::invalid_argument("eig_sym: box exceeds the dense solve budget");
    const std::vector<double> dense = dense_matrix(h);
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = dense[i * n + j];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig_sym: eigensolver did not converge");

    EigenSystem sys{h.box, h.epsilon, {}, solver.eigenvectors(), tol};
    sys.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = sys.vectors(i, j);
            if (v != 0.0) {
                if (v < 0.0) sys.vectors.col(j) = -sys.vectors.col(j);
                break;
            }
        }
    }

    // Validate the contract: residuals against the operator norm scale, and
    // the Gram matrix against the identity.
    double norm_scale = 0.0;
    for (const double lam : sys.eigenvalues) norm_scale = std::max(norm_scale, std::abs(lam));
    const Eigen::MatrixXd residual = m * sys.vectors - sys.vectors * solver.eigenvalues().asDiagonal();
    for (std::size_t j = 0; j < n; ++j)
        if (residual.col(j).norm() > tol * (1.0 + norm_scale))
            throw std::runtime_error("eig_sym: residual tolerance not met");
    const Eigen::MatrixXd gram = sys.vectors.transpose() * sys.vectors;
    if ((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > tol)
        throw std::runtime_error("eig_sym: eigenvectors not orthonormal to tolerance");
    return sys;
}

struct MatchReport {
    double max_deviation = 0.0;
    double bound = 0.0;         // 2 d eps, the hopping-norm bound
    double solver_slack = 0.0;  // residual tolerance the solve itself is allowed
    std::size_t worst_index = 0;
    bool pass = false;
};

// Sorted eigenvalue-to-potential matching with the hopping-norm bound
// 2 d eps as the acceptance line.  The solved eigenvalues carry their own
// validated residual tolerance, so pass allows exactly that much on top.
inline MatchReport match_eigenvalues(const EigenSystem& sys, std::vector<double> potential,
                                     double epsilon) {
    if (potential.size() != sys.eigenvalues.size())
        throw std::invalid_argument("match_eigenvalues: length mismatch");
    std::sort(potential.begin(), potential.end());
    MatchReport rep;
    rep.bound = 2.0 * static_cast<double>(sys.box.dim()) * epsilon;
    double scale = 0.0;
    for (const double lam : sys.eigenvalues) scale = std::max(scale, std::abs(lam));
    rep.solver_slack = sys.residual_tol * (1.0 + scale);
    for (std::size_t j = 0; j < potential.size(); ++j) {
        const double dev = std::abs(sys.eigenvalues[j] - potential[j]);
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.worst_index = j;
        }
    }
    rep.pass = rep.max_deviation <= rep.bound + rep.solver_slack;
    return rep;
}

inline std::complex<double> evolution_amplitude(const EigenSystem& sys, const LatticePoint& n,
                                                const LatticePoint& m, double t) {
    const std::size_t ni = sys.box.index_of(n);
    const std::size_t mi = sys.box.index_of(m);
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < sys.eigenvalues.size(); ++j)
        acc += std::exp(std::complex<double>(0.0, -t * sys.eigenvalues[j])) *
               sys.vectors(ni, j) * sys.vectors(mi, j);
    return acc;
}

// Time-uniform majorant of the propagator kernel.
inline double dynamical_kernel(const EigenSystem& sys, const LatticePoint& n,
                               const LatticePoint& m) {
    const std::size_t ni = sys.box.index_of(n);
    const std::size_t mi = sys.box.index_of(m);
    double acc = 0.0;
    for (std::size_t j = 0; j < sys.eigenvalues.size(); ++j)
        acc += std::abs(sys.vectors(ni, j)) * std::abs(sys.vectors(mi, j));
    return acc;
}

struct ScalingReport {
    double max_relative_deviation = 0.0;
    double tolerance = 1e-10;
    bool pass = false;
};

// The unit-hopping operator with potential V/eps has the spectrum of the
// eps-hopping operator with potential V, scaled by 1/eps.
inline ScalingReport scaling_equivalence_check(const std::vector<double>& potential,
                                               const Box& box, double epsilon,
                                               Boundary boundary = Boundary::dirichlet) {
    if (!(epsilon > 0))
        throw std::invalid_argument("scaling_equivalence_check: coupling must be positive");
    std::vector<double> scaled(potential);
    for (auto& v : scaled) v /= epsilon;
    const EigenSystem canonical = eig_sym(assemble(potential, box, epsilon, boundary));
    const EigenSystem unit_hop = eig_sym(assemble(std::move(scaled), box, 1.0, boundary));
    double scale = 0.0;
    for (const double lam : unit_hop.eigenvalues) scale = std::max(scale, std::abs(lam));
    ScalingReport rep;
    for (std::size_t j = 0; j < potential.size(); ++j)
        rep.max_relative_deviation =
            std::max(rep.max_relative_deviation,
                     std::abs(unit_hop.eigenvalues[j] - canonical.eigenvalues[j] / epsilon) /
                         std::max(1.0, scale));
    rep.pass = rep.max_relative_deviation <= rep.tolerance;
    return rep;
}

}  // namespace lploc
