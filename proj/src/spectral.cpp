#include "mcc/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <mutex>
#include <string>

namespace mcc {

namespace {

// The FFTW planner is not reentrant.
std::mutex& plannerMutex()
{
    static std::mutex m;
    return m;
}

void configureThreadsLocked()
{
    static bool done = false;
    if (done) {
        return;
    }
    done = true;
    if (const char* env = std::getenv("MCC_FFT_THREADS")) {
        const int threads = std::atoi(env);
        if (threads > 1 && fftw_init_threads() != 0) {
            fftw_plan_with_nthreads(threads);
        }
    }
}

constexpr double kResidueTol = 1e-10;

} // namespace

IndexSet::IndexSet(Eigen::Index n1_, Eigen::Index n2_, GridDims grid_) : n1(n1_), n2(n2_), grid(grid_)
{
    if (n1 < 0 || n2 < 0) {
        throw std::invalid_argument("index set orders must be nonnegative");
    }
    if (2 * n1 >= grid.n1 || 2 * n2 >= grid.n2) {
        throw std::invalid_argument("index set (" + std::to_string(n1) + "," + std::to_string(n2)
                                    + ") too large for grid " + std::to_string(grid.n1) + "x"
                                    + std::to_string(grid.n2) + ": need 2n_j < N_j");
    }
}

Eigen::ArrayXXd multiplicityWeights(const IndexSet& idx)
{
    Eigen::ArrayXXd w(idx.quadrantRows(), idx.quadrantCols());
    for (Eigen::Index k2 = 0; k2 <= idx.n2; ++k2) {
        for (Eigen::Index k1 = 0; k1 <= idx.n1; ++k1) {
            w(k1, k2) = (k1 == 0 ? 1.0 : 2.0) * (k2 == 0 ? 1.0 : 2.0);
        }
    }
    return w;
}

double fullInnerProduct(const IndexSet& idx, const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b)
{
    return (multiplicityWeights(idx) * a * b).sum();
}

MomentSet::MomentSet(IndexSet idx, Eigen::ArrayXXd coeffs) : idx_(idx), coeffs_(std::move(coeffs))
{
    if (coeffs_.rows() != idx_.quadrantRows() || coeffs_.cols() != idx_.quadrantCols()) {
        throw DimensionError("moment array does not match index set");
    }
    if (!coeffs_.allFinite()) {
        throw std::invalid_argument("moments must be finite");
    }
    if (!(coeffs_(0, 0) > 0.0)) {
        throw std::invalid_argument("zeroth moment must be positive");
    }
}

DualPolynomial::DualPolynomial(IndexSet idx, Eigen::ArrayXXd coeffs) : idx_(idx), coeffs_(std::move(coeffs))
{
    if (coeffs_.rows() != idx_.quadrantRows() || coeffs_.cols() != idx_.quadrantCols()) {
        throw DimensionError("polynomial coefficient array does not match index set");
    }
}

DualPolynomial DualPolynomial::constant(const IndexSet& idx, double q0)
{
    Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(idx.quadrantRows(), idx.quadrantCols());
    c(0, 0) = q0;
    return DualPolynomial(idx, std::move(c));
}

// Eigen arrays are column-major, so an N1 x N2 array is a row-major N2 x N1
// array to FFTW. The r2c output therefore has N2 rows of N1/2+1 entries,
// entry (k2, k1) at k2 * (N1/2+1) + k1.
struct SpectralGrid::Impl {
    GridDims dims;
    Eigen::Index half1 = 0;
    double* real = nullptr;
    fftw_complex* spectrum = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Impl(GridDims d) : dims(d), half1(d.n1 / 2 + 1)
    {
        if (dims.n1 < 1 || dims.n2 < 1) {
            throw DimensionError("spectral grid must be non-empty");
        }
        std::lock_guard lock(plannerMutex());
        configureThreadsLocked();
        real = fftw_alloc_real(static_cast<size_t>(dims.size()));
        spectrum = fftw_alloc_complex(static_cast<size_t>(dims.n2 * half1));
        const int n0 = static_cast<int>(dims.n2);
        const int n1 = static_cast<int>(dims.n1);
        forward = fftw_plan_dft_r2c_2d(n0, n1, real, spectrum, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(n0, n1, spectrum, real, FFTW_ESTIMATE);
    }

    ~Impl()
    {
        std::lock_guard lock(plannerMutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spectrum);
    }

    std::complex<double> at(Eigen::Index k1, Eigen::Index k2) const
    {
        const fftw_complex& v = spectrum[k2 * half1 + k1];
        return {v[0], v[1]};
    }
};

SpectralGrid::SpectralGrid(GridDims dims) : impl_(std::make_unique<Impl>(dims)) {}
SpectralGrid::~SpectralGrid() = default;
SpectralGrid::SpectralGrid(SpectralGrid&&) noexcept = default;
SpectralGrid& SpectralGrid::operator=(SpectralGrid&&) noexcept = default;

GridDims SpectralGrid::dims() const
{
    return impl_->dims;
}

Eigen::ArrayXXd SpectralGrid::truncate(const Eigen::Ref<const Eigen::ArrayXXd>& values, const IndexSet& idx)
{
    Impl& im = *impl_;
    if (values.rows() != im.dims.n1 || values.cols() != im.dims.n2 || !(idx.grid == im.dims)) {
        throw DimensionError("truncate: grid function does not match workspace");
    }
    Eigen::Map<Eigen::ArrayXXd>(im.real, im.dims.n1, im.dims.n2) = values;
    fftw_execute(im.forward);

    const double scale = 1.0 / static_cast<double>(im.dims.size());
    const double tol = kResidueTol * std::max(values.abs().maxCoeff(), 1e-300);
    Eigen::ArrayXXd out(idx.quadrantRows(), idx.quadrantCols());
    double residue = 0.0;
    for (Eigen::Index k2 = 0; k2 <= idx.n2; ++k2) {
        const Eigen::Index mirrored = (im.dims.n2 - k2) % im.dims.n2;
        for (Eigen::Index k1 = 0; k1 <= idx.n1; ++k1) {
            const std::complex<double> c = im.at(k1, k2) * scale;
            const std::complex<double> cm = im.at(k1, mirrored) * scale;
            residue = std::max({residue, std::abs(c.imag()), std::abs(c - cm)});
            out(k1, k2) = c.real();
        }
    }
    if (!(residue <= tol)) {
        throw SymmetryError("grid function is not double-even: transform residue " + std::to_string(residue));
    }
    return out;
}

Eigen::ArrayXXd SpectralGrid::evaluate(const Eigen::Ref<const Eigen::ArrayXXd>& coeffs, const IndexSet& idx)
{
    Impl& im = *impl_;
    if (!(idx.grid == im.dims)) {
        throw DimensionError("evaluate: index set grid does not match workspace");
    }
    if (2 * idx.n1 >= im.dims.n1 || 2 * idx.n2 >= im.dims.n2) {
        throw std::invalid_argument("evaluate: index set too large for grid");
    }
    if (coeffs.rows() != idx.quadrantRows() || coeffs.cols() != idx.quadrantCols()) {
        throw DimensionError("evaluate: coefficient array does not match index set");
    }
    std::fill_n(&im.spectrum[0][0], 2 * im.dims.n2 * im.half1, 0.0);
    for (Eigen::Index k2 = 0; k2 <= idx.n2; ++k2) {
        const Eigen::Index mirrored = (im.dims.n2 - k2) % im.dims.n2;
        for (Eigen::Index k1 = 0; k1 <= idx.n1; ++k1) {
            im.spectrum[k2 * im.half1 + k1][0] = coeffs(k1, k2);
            im.spectrum[mirrored * im.half1 + k1][0] = coeffs(k1, k2);
        }
    }
    fftw_execute(im.backward);
    return Eigen::Map<const Eigen::ArrayXXd>(im.real, im.dims.n1, im.dims.n2);
}

MomentSet computeMoments(const GridField& field, const IndexSet& idx)
{
    if (!(field.dims() == idx.grid)) {
        throw DimensionError("computeMoments: field grid does not match index set");
    }
    SpectralGrid grid(idx.grid);
    return MomentSet(idx, grid.truncate(field.values(), idx));
}

Eigen::ArrayXXd evaluateOnGrid(const DualPolynomial& poly)
{
    SpectralGrid grid(poly.indexSet().grid);
    return grid.evaluate(poly.coeffs(), poly.indexSet());
}

Eigen::ArrayXXd truncateToIndexSet(const Eigen::Ref<const Eigen::ArrayXXd>& values, const IndexSet& idx)
{
    if (values.rows() != idx.grid.n1 || values.cols() != idx.grid.n2) {
        throw DimensionError("truncateToIndexSet: grid function does not match index set");
    }
    SpectralGrid grid(idx.grid);
    return grid.truncate(values, idx);
}

} // namespace mcc
