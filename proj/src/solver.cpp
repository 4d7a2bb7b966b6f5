#include "mcc/solver.hpp"

#include <cmath>
#include <limits>

namespace mcc {

namespace {

constexpr double kLineSearchMinQ = 1e-12;
constexpr double kMinStep = 1e-16;

// Preconditioned conjugate gradients for H x = b with H given by the state's
// Hessian-vector product. The Jacobi preconditioner uses the leading term of
// the Hessian diagonal, weight_k * mean(W).
Eigen::ArrayXXd conjugateGradient(const DualObjective& state, SpectralGrid& grid, const Eigen::ArrayXXd& b,
                                  double relTol, int maxIter, int& iterations)
{
    const Eigen::ArrayXXd diag = multiplicityWeights(state.q().indexSet()) * state.hessianWeight().mean();
    Eigen::ArrayXXd x = Eigen::ArrayXXd::Zero(b.rows(), b.cols());
    Eigen::ArrayXXd r = b;
    Eigen::ArrayXXd z = r / diag;
    Eigen::ArrayXXd p = z;
    double rz = (r * z).sum();
    const double bnorm = std::sqrt((b * b).sum());
    if (bnorm == 0.0) {
        return x;
    }
    for (int it = 0; it < maxIter; ++it) {
        const Eigen::ArrayXXd hp = state.hessianVectorProduct(p, grid);
        const double php = (p * hp).sum();
        if (!(php > 0.0)) {
            break;
        }
        const double alpha = rz / php;
        x += alpha * p;
        r -= alpha * hp;
        ++iterations;
        if (std::sqrt((r * r).sum()) <= relTol * bnorm) {
            break;
        }
        z = r / diag;
        const double rzNew = (r * z).sum();
        p = z + (rzNew / rz) * p;
        rz = rzNew;
    }
    return x;
}

} // namespace

void SolverConfig::validate() const
{
    if (!(gradTol > 0.0 && gradTol < 1.0)) {
        throw std::invalid_argument("gradTol must be in (0,1)");
    }
    if (maxIter <= 0) {
        throw std::invalid_argument("maxIter must be positive");
    }
    if (!(backtrackRatio > 0.0 && backtrackRatio < 1.0)) {
        throw std::invalid_argument("backtrackRatio must be in (0,1)");
    }
    if (!(armijoC > 0.0 && armijoC < 1.0)) {
        throw std::invalid_argument("armijoC must be in (0,1)");
    }
    if (!(cgTol > 0.0 && cgTol < 1.0)) {
        throw std::invalid_argument("cgTol must be in (0,1)");
    }
    if (cgMaxIter < 0) {
        throw std::invalid_argument("cgMaxIter must be nonnegative");
    }
}

DualPolynomial initialDualPolynomial(const MomentSet& moments, const GridField& psi, Nu nu)
{
    const double ratio = psi.mean() / moments.c0();
    const double q0 = nu.isInfinite() ? std::log(ratio) : std::pow(ratio, 1.0 / nu.value());
    return DualPolynomial::constant(moments.indexSet(), q0);
}

DualSolution solveDual(const MomentSet& moments, const GridField& psi, Nu nu, const SolverConfig& cfg,
                       const std::optional<DualPolynomial>& initial)
{
    cfg.validate();
    const IndexSet& idx = moments.indexSet();
    if (!(psi.dims() == idx.grid)) {
        throw DimensionError("solveDual: prior grid does not match moments");
    }
    if (initial && !(initial->indexSet() == idx)) {
        throw DimensionError("solveDual: initial polynomial uses a different index set");
    }

    SpectralGrid grid(idx.grid);
    DualObjective state(initial ? *initial : initialDualPolynomial(moments, psi, nu), psi, moments, nu, grid);
    const int cgMaxIter = cfg.cgMaxIter > 0 ? cfg.cgMaxIter : static_cast<int>(idx.quadrantSize());

    SolveReport report;
    auto record = [&] {
        report.momentResidualHistory.push_back(state.momentResidual().abs().maxCoeff());
        report.dualValueHistory.push_back(state.value());
    };
    record();

    while (report.momentResidualHistory.back() > cfg.gradTol && report.iterations < cfg.maxIter) {
        const Eigen::ArrayXXd g = state.gradient();
        Eigen::ArrayXXd d = conjugateGradient(state, grid, -g, cfg.cgTol, cgMaxIter, report.cgIterations);
        double slope = (g * d).sum();
        if (!(slope < 0.0)) {
            d = -g / multiplicityWeights(idx);
            slope = (g * d).sum();
        }

        const double j0 = state.value();
        // Below this predicted decrease the Armijo test is dominated by
        // rounding in J; accept any step that does not raise J beyond it.
        const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(j0));
        std::optional<DualObjective> accepted;
        for (double t = 1.0; t >= kMinStep; t *= cfg.backtrackRatio) {
            DualPolynomial trial(idx, state.q().coeffs() + t * d);
            try {
                DualObjective candidate(trial, psi, moments, nu, grid);
                if (!nu.isInfinite() && candidate.qGrid().minCoeff() < kLineSearchMinQ) {
                    continue;
                }
                const double predicted = cfg.armijoC * t * slope;
                if (candidate.value() <= j0 + predicted
                    || (-predicted < roundoff && candidate.value() <= j0 + roundoff)) {
                    accepted.emplace(std::move(candidate));
                    break;
                }
            } catch (const InfeasibleDualError&) {
                continue;
            }
        }
        if (!accepted) {
            break;
        }
        state = std::move(*accepted);
        ++report.iterations;
        record();
    }

    report.finalResidual = report.momentResidualHistory.back();
    report.finalDualValue = state.value();
    report.converged = report.finalResidual <= cfg.gradTol;
    return {state.q(), GridField(state.field()), std::move(report)};
}

DualityDiagnostics verifyDuality(const DualPolynomial& q, const MomentSet& moments, const GridField& psi, Nu nu)
{
    const DualObjective state(q, psi, moments, nu);
    DualityDiagnostics out;
    out.maxMomentResidual = state.momentResidual().abs().maxCoeff();
    out.minQ = state.qGrid().minCoeff();
    out.divergence = alphaDivergence(state.field(), psi.values(), nu);
    out.dualValue = state.value();
    return out;
}

} // namespace mcc
