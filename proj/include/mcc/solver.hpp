#pragma once

#include "mcc/divergence.hpp"
#include "mcc/image.hpp"
#include "mcc/spectral.hpp"

#include <optional>
#include <vector>

namespace mcc {

struct SolverConfig {
    /// Max-norm of the moment residual c - m(Phi) accepted as converged.
    double gradTol = 1e-8;
    int maxIter = 500;
    double backtrackRatio = 0.5;
    double armijoC = 1e-4;
    /// Relative residual of the inner conjugate-gradient solve.
    double cgTol = 1e-10;
    /// 0 means the number of stored coefficients.
    int cgMaxIter = 0;

    /// Throws std::invalid_argument on out-of-range settings.
    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    int cgIterations = 0;
    double finalResidual = 0.0;
    double finalDualValue = 0.0;
    bool converged = false;
    std::vector<double> momentResidualHistory;
    std::vector<double> dualValueHistory;
};

struct DualSolution {
    DualPolynomial q;
    GridField field;
    SolveReport report;
};

/// Minimizes J_nu over the dual polynomials (positive on the grid for finite
/// nu) by damped Newton steps. Directions come from matrix-free conjugate
/// gradients on Hessian-vector products; the backtracking line search enforces
/// Armijo decrease and, for finite nu, min Q >= 1e-12 on the grid.
///
/// Starts from the constant polynomial whose stationary field has mean c0
/// under a uniform prior unless `initial` is given (it must be feasible).
/// Running out of iterations is not an error: the report says converged =
/// false and the last iterate is returned.
DualSolution solveDual(const MomentSet& moments, const GridField& psi, Nu nu, const SolverConfig& cfg = {},
                       const std::optional<DualPolynomial>& initial = std::nullopt);

/// Constant starting polynomial used by solveDual.
DualPolynomial initialDualPolynomial(const MomentSet& moments, const GridField& psi, Nu nu);

struct DualityDiagnostics {
    double maxMomentResidual = 0.0;
    double minQ = 0.0;
    double divergence = 0.0;
    double dualValue = 0.0;
};

/// Optimality certificate for a dual point: moment residual of its
/// stationary field, smallest grid value of Q and the primal divergence
/// D_nu(Phi || Psi).
DualityDiagnostics verifyDuality(const DualPolynomial& q, const MomentSet& moments, const GridField& psi, Nu nu);

} // namespace mcc
