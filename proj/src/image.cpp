#include "mcc/image.hpp"

#include <cmath>
#include <limits>

namespace mcc {

Image::Image(Eigen::MatrixXd pixels) : pixels_(std::move(pixels))
{
    if (pixels_.rows() < 2 || pixels_.cols() < 2) {
        throw DimensionError("image must be at least 2x2, got " + std::to_string(pixels_.rows()) + "x"
                             + std::to_string(pixels_.cols()));
    }
    if (!pixels_.allFinite() || pixels_.minCoeff() < 0.0 || pixels_.maxCoeff() > 1.0) {
        throw std::invalid_argument("image intensities must lie in [0,1]");
    }
}

Image Image::constant(Eigen::Index rows, Eigen::Index cols, double value)
{
    return Image(Eigen::MatrixXd::Constant(rows, cols, value));
}

GridField::GridField(Eigen::ArrayXXd values) : values_(std::move(values))
{
    if (values_.size() == 0) {
        throw DimensionError("grid field is empty");
    }
    if (!values_.allFinite() || !(values_ > 0.0).all()) {
        throw std::invalid_argument("grid field must be finite and strictly positive");
    }
}

GridField GridField::constant(GridDims dims, double value)
{
    return GridField(Eigen::ArrayXXd::Constant(dims.n1, dims.n2, value));
}

Eigen::MatrixXd mirrorMatrix(const Eigen::Ref<const Eigen::MatrixXd>& x)
{
    const Eigen::Index p1 = x.rows();
    const Eigen::Index p2 = x.cols();
    if (p1 < 2 || p2 < 2) {
        throw DimensionError("mirroring needs at least 2x2 input");
    }
    const GridDims dims = mirroredDims(p1, p2);
    Eigen::MatrixXd y(dims.n1, dims.n2);
    for (Eigen::Index j = 0; j < dims.n2; ++j) {
        const Eigen::Index sj = j < p2 ? j : dims.n2 - j;
        for (Eigen::Index i = 0; i < dims.n1; ++i) {
            const Eigen::Index si = i < p1 ? i : dims.n1 - i;
            y(i, j) = x(si, sj);
        }
    }
    return y;
}

Eigen::MatrixXd mirror(const Image& image)
{
    return mirrorMatrix(image.pixels());
}

GridField lift(const Eigen::Ref<const Eigen::MatrixXd>& y)
{
    if (!y.allFinite()) {
        throw std::invalid_argument("lift: non-finite input");
    }
    return GridField(y.array().exp());
}

Eigen::MatrixXd unliftRaw(const GridField& phi, Eigen::Index rows, Eigen::Index cols)
{
    if (!(phi.dims() == mirroredDims(rows, cols))) {
        throw DimensionError("unlift: grid " + std::to_string(phi.dims().n1) + "x" + std::to_string(phi.dims().n2)
                             + " does not match image " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    return phi.values().topLeftCorner(rows, cols).log().matrix();
}

Image unlift(const GridField& phi, Eigen::Index rows, Eigen::Index cols)
{
    return Image(unliftRaw(phi, rows, cols).cwiseMax(0.0).cwiseMin(1.0));
}

double meanSquaredError(const Image& original, const Image& reconstructed)
{
    if (original.rows() != reconstructed.rows() || original.cols() != reconstructed.cols()) {
        throw DimensionError("psnr: image dimensions differ");
    }
    return (original.pixels() - reconstructed.pixels()).squaredNorm()
        / static_cast<double>(original.pixels().size());
}

double psnr(const Image& original, const Image& reconstructed)
{
    const double mse = meanSquaredError(original, reconstructed);
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(1.0 / mse);
}

bool isDoubleEven(const Eigen::Ref<const Eigen::ArrayXXd>& values, double tol)
{
    const Eigen::Index n1 = values.rows();
    const Eigen::Index n2 = values.cols();
    for (Eigen::Index j = 0; j < n2; ++j) {
        const Eigen::Index rj = (n2 - j) % n2;
        for (Eigen::Index i = 0; i < n1; ++i) {
            const Eigen::Index ri = (n1 - i) % n1;
            const double v = values(i, j);
            if (std::abs(v - values(ri, j)) > tol || std::abs(v - values(i, rj)) > tol) {
                return false;
            }
        }
    }
    return true;
}

} // namespace mcc
