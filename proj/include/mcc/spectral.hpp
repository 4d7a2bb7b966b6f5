#pragma once

#include "mcc/image.hpp"

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>

namespace mcc {

/// Raised when a grid function that must be double-even is not, detected as
/// an imaginary or asymmetric residue in its transform.
class SymmetryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Separable index set {|k1| <= n1, |k2| <= n2} on an N1 x N2 grid.
///
/// Coefficients over the set are stored on the nonnegative quadrant only,
/// as an (n1+1) x (n2+1) array; the rest of the set follows from the
/// double-even extension c(k1,k2) = c(+-k1,+-k2).
struct IndexSet {
    Eigen::Index n1 = 0;
    Eigen::Index n2 = 0;
    GridDims grid;

    IndexSet() = default;
    /// Requires 2 n_j < N_j so that grid evaluation is injective on the set.
    IndexSet(Eigen::Index n1, Eigen::Index n2, GridDims grid);

    Eigen::Index quadrantRows() const { return n1 + 1; }
    Eigen::Index quadrantCols() const { return n2 + 1; }
    Eigen::Index quadrantSize() const { return quadrantRows() * quadrantCols(); }
    /// Members of the full symmetric set, (2n1+1)(2n2+1).
    Eigen::Index fullSize() const { return (2 * n1 + 1) * (2 * n2 + 1); }

    bool operator==(const IndexSet&) const = default;
};

/// Number of members of the full index set represented by each stored
/// quadrant entry: 1 at the origin, 2 on an axis, 4 in the interior.
Eigen::ArrayXXd multiplicityWeights(const IndexSet& idx);

/// Full-set inner product sum_{k in Lambda} a_k b_k of two quadrant arrays.
double fullInnerProduct(const IndexSet& idx, const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b);

/// Trigonometric moments c_k of a positive field, stored on the quadrant.
class MomentSet {
public:
    MomentSet() = default;
    MomentSet(IndexSet idx, Eigen::ArrayXXd coeffs);

    const IndexSet& indexSet() const { return idx_; }
    const Eigen::ArrayXXd& coeffs() const { return coeffs_; }
    double c0() const { return coeffs_(0, 0); }

private:
    IndexSet idx_;
    Eigen::ArrayXXd coeffs_;
};

/// Dual variable: Q(zeta_l) = sum_{k in Lambda} q_k zeta_l^k, quadrant storage.
class DualPolynomial {
public:
    DualPolynomial() = default;
    DualPolynomial(IndexSet idx, Eigen::ArrayXXd coeffs);

    static DualPolynomial constant(const IndexSet& idx, double q0);
    static DualPolynomial zero(const IndexSet& idx) { return constant(idx, 0.0); }

    const IndexSet& indexSet() const { return idx_; }
    const Eigen::ArrayXXd& coeffs() const { return coeffs_; }
    Eigen::ArrayXXd& coeffs() { return coeffs_; }

private:
    IndexSet idx_;
    Eigen::ArrayXXd coeffs_;
};

/// Real 2-D FFT workspace for one grid size. Owns its plans and buffers, so
/// a single instance must not be used from two threads at once; separate
/// instances are independent.
class SpectralGrid {
public:
    explicit SpectralGrid(GridDims dims);
    ~SpectralGrid();
    SpectralGrid(SpectralGrid&&) noexcept;
    SpectralGrid& operator=(SpectralGrid&&) noexcept;
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    GridDims dims() const;

    /// (1/|N|) sum_l zeta_l^k W(zeta_l) on the stored quadrant of idx. W must be
    /// double-even; the imaginary and asymmetric residues are checked against
    /// 1e-10 times max|W|.
    Eigen::ArrayXXd truncate(const Eigen::Ref<const Eigen::ArrayXXd>& values, const IndexSet& idx);

    /// Evaluates the double-even extension of the quadrant coefficients at every grid point.
    Eigen::ArrayXXd evaluate(const Eigen::Ref<const Eigen::ArrayXXd>& coeffs, const IndexSet& idx);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

MomentSet computeMoments(const GridField& field, const IndexSet& idx);

Eigen::ArrayXXd evaluateOnGrid(const DualPolynomial& poly);

Eigen::ArrayXXd truncateToIndexSet(const Eigen::Ref<const Eigen::ArrayXXd>& values, const IndexSet& idx);

} // namespace mcc
