#include "mcc/divergence.hpp"

#include <charconv>

namespace mcc {

Nu Nu::finite(int value)
{
    if (value < 1) {
        throw std::invalid_argument("divergence order must be >= 1, got " + std::to_string(value));
    }
    return Nu(value);
}

Nu Nu::fromCode(int code)
{
    return code == 0 ? infinity() : finite(code);
}

Nu Nu::parse(std::string_view token)
{
    if (token == "inf" || token == "INF" || token == "infinity") {
        return infinity();
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value < 1) {
        throw std::invalid_argument("bad divergence order '" + std::string(token) + "' (expected integer >= 1 or inf)");
    }
    return Nu(value);
}

bool isFeasible(const Eigen::Ref<const Eigen::ArrayXXd>& qGrid, Nu nu)
{
    if (!qGrid.allFinite()) {
        return false;
    }
    return nu.isInfinite() || qGrid.minCoeff() >= kMinFeasibleQ;
}

Eigen::ArrayXXd stationaryField(const Eigen::Ref<const Eigen::ArrayXXd>& qGrid,
                                const Eigen::Ref<const Eigen::ArrayXXd>& psi, Nu nu)
{
    if (qGrid.rows() != psi.rows() || qGrid.cols() != psi.cols()) {
        throw DimensionError("stationaryField: grid dimensions differ");
    }
    if (!isFeasible(qGrid, nu)) {
        throw InfeasibleDualError("dual polynomial is not strictly positive on the grid");
    }
    if (nu.isInfinite()) {
        return psi * (-qGrid).exp();
    }
    if (nu.value() == 1) {
        return psi / qGrid;
    }
    return psi / qGrid.pow(static_cast<double>(nu.value()));
}

GridField stationaryField(const DualPolynomial& q, const GridField& psi, Nu nu)
{
    if (!(q.indexSet().grid == psi.dims())) {
        throw DimensionError("stationaryField: prior grid does not match polynomial");
    }
    return GridField(stationaryField(evaluateOnGrid(q), psi.values(), nu));
}

DualObjective::DualObjective(const DualPolynomial& q, const GridField& psi, const MomentSet& moments, Nu nu)
    : q_(q), moments_(moments), nu_(nu)
{
    SpectralGrid grid(psi.dims());
    init(psi, grid);
}

DualObjective::DualObjective(const DualPolynomial& q, const GridField& psi, const MomentSet& moments, Nu nu,
                             SpectralGrid& grid)
    : q_(q), moments_(moments), nu_(nu)
{
    init(psi, grid);
}

void DualObjective::init(const GridField& psi, SpectralGrid& grid)
{
    if (!(q_.indexSet() == moments_.indexSet())) {
        throw DimensionError("dual polynomial and moments use different index sets");
    }
    if (!(psi.dims() == moments_.indexSet().grid) || !(grid.dims() == psi.dims())) {
        throw DimensionError("prior grid does not match index set");
    }
    qGrid_ = grid.evaluate(q_.coeffs(), q_.indexSet());
    field_ = stationaryField(qGrid_, psi.values(), nu_);
    if (!field_.allFinite() || !(field_ > 0.0).all()) {
        throw InfeasibleDualError("stationary field overflows for this dual polynomial");
    }

    double integral = 0.0;
    if (nu_.isInfinite()) {
        integral = field_.mean();
    } else if (nu_.value() == 1) {
        integral = (psi.values() * (psi.values() / qGrid_).log()).mean();
    } else {
        // psi / Q^(nu-1) = field * Q
        integral = (field_ * qGrid_).mean() / (nu_.value() - 1.0);
    }
    value_ = integral + fullInnerProduct(q_.indexSet(), q_.coeffs(), moments_.coeffs());
    fieldMoments_ = grid.truncate(field_, q_.indexSet());
}

Eigen::ArrayXXd DualObjective::gradient() const
{
    return multiplicityWeights(q_.indexSet()) * momentResidual();
}

Eigen::ArrayXXd DualObjective::hessianWeight() const
{
    if (nu_.isInfinite()) {
        return field_;
    }
    // nu psi / Q^(nu+1); for nu = 1 this is psi / Q^2
    return static_cast<double>(nu_.value()) * field_ / qGrid_;
}

Eigen::ArrayXXd DualObjective::hessianVectorProduct(const Eigen::Ref<const Eigen::ArrayXXd>& direction,
                                                    SpectralGrid& grid) const
{
    const IndexSet& idx = q_.indexSet();
    const Eigen::ArrayXXd dq = grid.evaluate(direction, idx);
    return multiplicityWeights(idx) * grid.truncate(hessianWeight() * dq, idx);
}

Eigen::ArrayXXd DualObjective::hessianVectorProduct(const Eigen::Ref<const Eigen::ArrayXXd>& direction) const
{
    SpectralGrid grid(q_.indexSet().grid);
    return hessianVectorProduct(direction, grid);
}

} // namespace mcc
