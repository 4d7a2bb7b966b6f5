#pragma once

#include "mcc/image.hpp"
#include "mcc/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mcc {

/// Raised when a dual polynomial is not strictly positive on the grid for a
/// finite divergence order.
class InfeasibleDualError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Divergence order: an integer nu >= 1 or infinity. The Alpha divergence
/// parameter is alpha = 1 - 1/nu.
class Nu {
public:
    static Nu finite(int value);
    static Nu infinity() { return Nu(0); }

    /// Parses "inf" or a positive integer.
    static Nu parse(std::string_view token);

    bool isInfinite() const { return value_ == 0; }
    /// Finite order; only meaningful when !isInfinite().
    int value() const { return value_; }
    /// Container code: 0 for infinity, else nu.
    int code() const { return value_; }
    static Nu fromCode(int code);

    std::string toString() const { return isInfinite() ? "inf" : std::to_string(value_); }

    bool operator==(const Nu&) const = default;

private:
    explicit Nu(int v) : value_(v) {}
    int value_;
};

/// Q below this at any grid point counts as leaving the positive cone for finite nu.
inline constexpr double kMinFeasibleQ = 1e-14;

namespace detail {

// Per-point summand of the grid-averaged divergence D_nu(phi || psi).
inline double divergenceSummand(double phi, double psi, Nu nu)
{
    if (nu.isInfinite()) {
        return divergenceSummand(psi, phi, Nu::finite(1));
    }
    if (nu.value() == 1) {
        return psi * std::log(psi / phi) - psi + phi;
    }
    const double v = nu.value();
    return v * v / (1.0 - v) * std::pow(phi, (v - 1.0) / v) * std::pow(psi, 1.0 / v) + v * phi + v / (v - 1.0) * psi;
}

} // namespace detail

/// Grid-averaged Alpha divergence between two positive grid functions.
template <typename DerivedA, typename DerivedB>
double alphaDivergence(const Eigen::ArrayBase<DerivedA>& phi, const Eigen::ArrayBase<DerivedB>& psi, Nu nu)
{
    if (phi.rows() != psi.rows() || phi.cols() != psi.cols()) {
        throw DimensionError("alphaDivergence: field dimensions differ");
    }
    if (!(phi > 0.0).all() || !(psi > 0.0).all()) {
        throw std::invalid_argument("alphaDivergence: fields must be strictly positive");
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
        for (Eigen::Index i = 0; i < phi.rows(); ++i) {
            sum += detail::divergenceSummand(phi(i, j), psi(i, j), nu);
        }
    }
    return sum / static_cast<double>(phi.size());
}

inline double alphaDivergence(const GridField& phi, const GridField& psi, Nu nu)
{
    return alphaDivergence(phi.values(), psi.values(), nu);
}

/// Primal field at the Lagrangian stationary point: psi / Q^nu for finite nu,
/// psi * exp(-Q) for infinity. Throws InfeasibleDualError when Q is not
/// positive everywhere for finite nu.
Eigen::ArrayXXd stationaryField(const Eigen::Ref<const Eigen::ArrayXXd>& qGrid,
                                const Eigen::Ref<const Eigen::ArrayXXd>& psi, Nu nu);

GridField stationaryField(const DualPolynomial& q, const GridField& psi, Nu nu);

/// Evaluation state of the dual functional J_nu at one point q. Caches the
/// grid values of Q and the stationary field so that value, gradient and
/// Hessian weight share one pair of transforms.
class DualObjective {
public:
    /// Throws InfeasibleDualError when Q leaves the positive cone (finite nu).
    DualObjective(const DualPolynomial& q, const GridField& psi, const MomentSet& moments, Nu nu);
    /// Same, reusing a caller-owned FFT workspace.
    DualObjective(const DualPolynomial& q, const GridField& psi, const MomentSet& moments, Nu nu,
                  SpectralGrid& grid);

    const DualPolynomial& q() const { return q_; }
    const Eigen::ArrayXXd& qGrid() const { return qGrid_; }
    const Eigen::ArrayXXd& field() const { return field_; }
    Nu nu() const { return nu_; }

    /// J_nu(q) without the Lagrangian constant term.
    double value() const { return value_; }

    /// Moments of the stationary field, m_k on the quadrant.
    const Eigen::ArrayXXd& fieldMoments() const { return fieldMoments_; }

    /// c_k - m_k on the quadrant; zero iff the stationary field matches the moments.
    Eigen::ArrayXXd momentResidual() const { return moments_.coeffs() - fieldMoments_; }

    /// Partial derivatives of value() with respect to the stored quadrant
    /// coefficients: multiplicity weight times (c_k - m_k).
    Eigen::ArrayXXd gradient() const;

    /// Grid weight W of the Hessian quadratic form (1/|N|) sum_l W dQ^2.
    Eigen::ArrayXXd hessianWeight() const;

    /// Hessian of value() with respect to the stored quadrant applied to a
    /// coefficient direction.
    Eigen::ArrayXXd hessianVectorProduct(const Eigen::Ref<const Eigen::ArrayXXd>& direction,
                                         SpectralGrid& grid) const;
    Eigen::ArrayXXd hessianVectorProduct(const Eigen::Ref<const Eigen::ArrayXXd>& direction) const;

private:
    void init(const GridField& psi, SpectralGrid& grid);

    DualPolynomial q_;
    MomentSet moments_;
    Nu nu_;
    Eigen::ArrayXXd qGrid_;
    Eigen::ArrayXXd field_;
    Eigen::ArrayXXd fieldMoments_;
    double value_ = 0.0;
};

/// Grid-positivity test for a candidate dual polynomial.
bool isFeasible(const Eigen::Ref<const Eigen::ArrayXXd>& qGrid, Nu nu);

} // namespace mcc
