#include "mcc/priors.hpp"

#include <algorithm>
#include <string>

namespace mcc {

SvdFactors::SvdFactors(Eigen::MatrixXd m1_, Eigen::MatrixXd m2_) : m1(std::move(m1_)), m2(std::move(m2_))
{
    if (m1.cols() != m2.rows()) {
        throw DimensionError("svd factors disagree on rank");
    }
    if (m1.cols() > std::min(m1.rows(), m2.cols())) {
        throw std::invalid_argument("svd rank exceeds min(p1, p2)");
    }
}

SvdFactors SvdFactors::empty(Eigen::Index rows, Eigen::Index cols)
{
    return SvdFactors(Eigen::MatrixXd(rows, 0), Eigen::MatrixXd(0, cols));
}

GridField uniformPrior(GridDims dims)
{
    return GridField::constant(dims, 1.0);
}

SvdFactors svdFactors(const Image& image, Eigen::Index rank)
{
    const Eigen::Index maxRank = std::min(image.rows(), image.cols());
    if (rank < 1 || rank > maxRank) {
        throw std::invalid_argument("svd rank " + std::to_string(rank) + " outside [1, " + std::to_string(maxRank) + "]");
    }
    // BDCSVD returns singular values in decreasing order.
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(image.pixels(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd root = svd.singularValues().head(rank).cwiseSqrt();
    Eigen::MatrixXd m1 = svd.matrixU().leftCols(rank) * root.asDiagonal();
    Eigen::MatrixXd m2 = root.asDiagonal() * svd.matrixV().leftCols(rank).transpose();
    return SvdFactors(std::move(m1), std::move(m2));
}

GridField priorFromFactors(const SvdFactors& factors, GridDims dims, bool clamp)
{
    if (!(mirroredDims(factors.rows(), factors.cols()) == dims)) {
        throw DimensionError("factor product " + std::to_string(factors.rows()) + "x" + std::to_string(factors.cols())
                             + " does not mirror to grid " + std::to_string(dims.n1) + "x" + std::to_string(dims.n2));
    }
    Eigen::MatrixXd x = factors.product();
    if (clamp) {
        x = x.cwiseMax(0.0).cwiseMin(1.0);
    }
    return lift(mirrorMatrix(x));
}

GridField priorFromSimilarImage(const Image& similar, Eigen::Index rank, GridDims dims, bool clamp)
{
    if (!(mirroredDims(similar.rows(), similar.cols()) == dims)) {
        throw DimensionError("similar image size does not match the target grid");
    }
    return priorFromFactors(svdFactors(similar, rank), dims, clamp);
}

} // namespace mcc
