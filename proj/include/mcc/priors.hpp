#pragma once

#include "mcc/image.hpp"

#include <Eigen/Dense>

namespace mcc {

/// Rank-r factorization M1 * M2 of an image, M1 = U_r D_r^{1/2} (p1 x r) and
/// M2 = D_r^{1/2} V_r^T (r x p2), singular values in descending order.
/// Rank 0 carries no entries and stands for the uniform prior.
struct SvdFactors {
    Eigen::MatrixXd m1;
    Eigen::MatrixXd m2;

    SvdFactors() = default;
    SvdFactors(Eigen::MatrixXd m1_, Eigen::MatrixXd m2_);

    Eigen::Index rank() const { return m1.cols(); }
    Eigen::Index rows() const { return m1.rows(); }
    Eigen::Index cols() const { return m2.cols(); }
    /// Stored numbers, (p1 + p2) r.
    Eigen::Index storageCount() const { return m1.size() + m2.size(); }

    Eigen::MatrixXd product() const { return m1 * m2; }

    /// Empty factors for a p1 x p2 image.
    static SvdFactors empty(Eigen::Index rows, Eigen::Index cols);
};

GridField uniformPrior(GridDims dims);

/// Truncated SVD of the image; 1 <= rank <= min(p1, p2).
SvdFactors svdFactors(const Image& image, Eigen::Index rank);

/// Psi = lift(mirror(M1 M2)), with the product clamped to [0,1] first unless
/// clamp is false. N must equal the mirrored size of the factor product.
GridField priorFromFactors(const SvdFactors& factors, GridDims dims, bool clamp = true);

/// Low-rank prior built from a similar image of the same size.
GridField priorFromSimilarImage(const Image& similar, Eigen::Index rank, GridDims dims, bool clamp = true);

} // namespace mcc
