#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mcc {

/// Thrown when two operands disagree on shape.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Grayscale image with intensities in [0,1]. At least 2x2 so that the
/// mirrored grid has N_j = 2(p_j - 1) >= 2.
class Image {
public:
    Image() = default;
    explicit Image(Eigen::MatrixXd pixels);

    /// Constant image of the given size.
    static Image constant(Eigen::Index rows, Eigen::Index cols, double value);

    const Eigen::MatrixXd& pixels() const { return pixels_; }
    Eigen::Index rows() const { return pixels_.rows(); }
    Eigen::Index cols() const { return pixels_.cols(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return pixels_(i, j); }

    bool operator==(const Image& other) const
    {
        return pixels_.rows() == other.pixels_.rows() && pixels_.cols() == other.pixels_.cols()
            && pixels_ == other.pixels_;
    }

private:
    Eigen::MatrixXd pixels_;
};

/// Grid dimensions (N1, N2).
struct GridDims {
    Eigen::Index n1 = 0;
    Eigen::Index n2 = 0;

    Eigen::Index size() const { return n1 * n2; }
    bool operator==(const GridDims&) const = default;
};

/// Grid size produced by mirroring a rows x cols image.
inline GridDims mirroredDims(Eigen::Index rows, Eigen::Index cols)
{
    return {2 * (rows - 1), 2 * (cols - 1)};
}

/// Strictly positive real function sampled on the N1 x N2 periodic grid.
class GridField {
public:
    GridField() = default;
    explicit GridField(Eigen::ArrayXXd values);

    static GridField constant(GridDims dims, double value);

    const Eigen::ArrayXXd& values() const { return values_; }
    GridDims dims() const { return {values_.rows(), values_.cols()}; }
    double operator()(Eigen::Index l1, Eigen::Index l2) const { return values_(l1, l2); }
    double mean() const { return values_.mean(); }

private:
    Eigen::ArrayXXd values_;
};

/// Whole-sample symmetric extension of the image to a 2(p1-1) x 2(p2-1)
/// periodic grid. Row i >= p1 takes source row 2(p1-1) - i (0-based), so the
/// result is even under l -> (N - l) mod N in both directions.
Eigen::MatrixXd mirror(const Image& image);

/// Reflection of an arbitrary real p1 x p2 matrix; used for priors built from
/// low-rank products that are not yet clamped.
Eigen::MatrixXd mirrorMatrix(const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Phi = exp(Y) entrywise.
GridField lift(const Eigen::Ref<const Eigen::MatrixXd>& y);

/// Inverse of lift/mirror: log, crop to the leading rows x cols block and clamp to [0,1].
Image unlift(const GridField& phi, Eigen::Index rows, Eigen::Index cols);

/// Same as unlift but without clamping; exposes the raw reconstruction.
Eigen::MatrixXd unliftRaw(const GridField& phi, Eigen::Index rows, Eigen::Index cols);

/// Peak signal-to-noise ratio in dB with peak value 1; +inf for identical images.
double psnr(const Image& original, const Image& reconstructed);

double meanSquaredError(const Image& original, const Image& reconstructed);

/// True when values(l1, l2) equals its reflections in both directions.
bool isDoubleEven(const Eigen::Ref<const Eigen::ArrayXXd>& values, double tol = 0.0);

} // namespace mcc
