#include "mcc/codec.hpp"

#include "mcc/rate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace mcc {

namespace {

// Runs task(i) for i in [0, count) on up to `jobs` threads. The first
// exception is rethrown after all workers finish.
void parallelFor(std::size_t count, int jobs, const std::function<void(std::size_t)>& task)
{
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex errorMutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(errorMutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

struct Trial {
    CandidateScore score;
    std::optional<MomentSet> moments;
    SvdFactors factors;
    bool usable = false;
};

// Reconstructions this close to the original differ only by floating-point
// rounding (MSE ~ 1e-20); for ranking they count as exact.
constexpr double kExactPsnr = 200.0;

// Highest PSNR among converged trials; earliest wins ties.
std::size_t selectBest(const std::vector<Trial>& trials)
{
    auto rankValue = [](const Trial& t) { return std::min(t.score.psnr, kExactPsnr); };
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        if (trials[i].usable && (!best || rankValue(trials[i]) > rankValue(trials[*best]))) {
            best = i;
        }
    }
    if (!best) {
        throw CodecError("no candidate configuration converged");
    }
    return *best;
}

double secondsSince(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CompressionResult hybridOverRanks(const Image& original, double cr, Nu nu, const std::vector<Eigen::Index>& ranks,
                                  const SweepOptions& options)
{
    const Eigen::Index p1 = original.rows();
    const Eigen::Index p2 = original.cols();
    const GridDims dims = mirroredDims(p1, p2);
    const GridField truth = lift(mirror(original));

    std::vector<Trial> trials(ranks.size());
    parallelFor(ranks.size(), options.jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        Trial& trial = trials[i];
        const Eigen::Index r = ranks[i];
        const Eigen::Index n = sizeFromRate(cr, p1, p2, r);
        const IndexSet idx(n, n, dims);
        trial.factors = r == 0 ? SvdFactors::empty(p1, p2) : quantizeFactors(svdFactors(original, r));
        const GridField prior = priorFromFactors(trial.factors, dims, options.clampPrior);
        trial.moments = computeMoments(truth, idx);
        const Reconstruction rec = reconstructFromMoments(*trial.moments, prior, nu, p1, p2, options.solver);
        trial.score.nu = nu;
        trial.score.rank = r;
        trial.score.n1 = n;
        trial.score.n2 = n;
        trial.score.psnr = psnr(original, rec.image);
        trial.score.rate = hybridRate(p1, p2, n, n, r);
        trial.score.report = rec.solution.report;
        trial.score.seconds = secondsSince(start);
        trial.usable = rec.solution.report.converged;
    });

    CompressionResult result;
    result.selected = selectBest(trials);
    const Trial& best = trials[result.selected];
    for (const Trial& t : trials) {
        result.candidates.push_back(t.score);
    }
    CompressedContainer& c = result.container;
    c.p1 = static_cast<std::uint32_t>(p1);
    c.p2 = static_cast<std::uint32_t>(p2);
    c.n1 = static_cast<std::uint32_t>(best.score.n1);
    c.n2 = static_cast<std::uint32_t>(best.score.n2);
    c.nu = nu;
    c.moments = best.moments->coeffs();
    if (best.score.rank > 0) {
        c.priorMode = PriorMode::InlineSvd;
        c.rank = static_cast<std::uint16_t>(best.score.rank);
        c.m1 = best.factors.m1.cast<float>();
        c.m2 = best.factors.m2.cast<float>();
    }
    c.validate();
    return result;
}

} // namespace

SvdFactors quantizeFactors(const SvdFactors& factors)
{
    return SvdFactors(factors.m1.cast<float>().cast<double>(), factors.m2.cast<float>().cast<double>());
}

Reconstruction reconstructFromMoments(const MomentSet& moments, const GridField& prior, Nu nu, Eigen::Index p1,
                                      Eigen::Index p2, const SolverConfig& cfg)
{
    DualSolution solution = solveDual(moments, prior, nu, cfg);
    Eigen::MatrixXd raw = unliftRaw(solution.field, p1, p2);
    Image image(raw.cwiseMax(0.0).cwiseMin(1.0));
    return {std::move(image), std::move(raw), std::move(solution)};
}

CompressionResult compressSweepNu(const Image& original, const IndexSet& idx, const GridField& prior,
                                  std::span<const Nu> candidates, const SweepOptions& options,
                                  const PriorDescriptor& descriptor)
{
    if (candidates.empty()) {
        throw std::invalid_argument("compressSweepNu: no candidate divergence orders");
    }
    const GridDims dims = mirroredDims(original.rows(), original.cols());
    if (!(idx.grid == dims) || !(prior.dims() == dims)) {
        throw DimensionError("compressSweepNu: index set or prior does not match the image grid");
    }
    const MomentSet moments = computeMoments(lift(mirror(original)), idx);

    std::vector<Trial> trials(candidates.size());
    parallelFor(candidates.size(), options.jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        const Reconstruction rec =
            reconstructFromMoments(moments, prior, candidates[i], original.rows(), original.cols(), options.solver);
        Trial& trial = trials[i];
        trial.score.nu = candidates[i];
        trial.score.n1 = idx.n1;
        trial.score.n2 = idx.n2;
        trial.score.psnr = psnr(original, rec.image);
        trial.score.rate = momentsOnlyRate(original.rows(), original.cols(), idx.n1, idx.n2);
        trial.score.report = rec.solution.report;
        trial.score.seconds = secondsSince(start);
        trial.usable = rec.solution.report.converged;
    });

    CompressionResult result;
    result.selected = selectBest(trials);
    for (const Trial& t : trials) {
        result.candidates.push_back(t.score);
    }
    CompressedContainer& c = result.container;
    c.p1 = static_cast<std::uint32_t>(original.rows());
    c.p2 = static_cast<std::uint32_t>(original.cols());
    c.n1 = static_cast<std::uint32_t>(idx.n1);
    c.n2 = static_cast<std::uint32_t>(idx.n2);
    c.nu = candidates[result.selected];
    c.moments = moments.coeffs();
    c.priorMode = descriptor.mode;
    if (descriptor.mode == PriorMode::ExternalRef) {
        c.priorRef = descriptor.ref;
        c.rank = static_cast<std::uint16_t>(descriptor.rank);
    } else if (descriptor.mode == PriorMode::InlineSvd) {
        c.rank = static_cast<std::uint16_t>(descriptor.factors.rank());
        c.m1 = descriptor.factors.m1.cast<float>();
        c.m2 = descriptor.factors.m2.cast<float>();
    }
    c.validate();
    return result;
}

CompressionResult compressHybrid(const Image& original, double cr, Nu nu, const SweepOptions& options)
{
    const Eigen::Index rMax = maxRankForRate(cr, original.rows(), original.cols());
    // Small ranks may leave more moments than the grid can hold; those are skipped.
    std::vector<Eigen::Index> ranks;
    for (Eigen::Index r = 0; r <= rMax; ++r) {
        try {
            sizeFromRate(cr, original.rows(), original.cols(), r);
            ranks.push_back(r);
        } catch (const RateError&) {
            if (r == rMax) {
                throw;
            }
        }
    }
    return hybridOverRanks(original, cr, nu, ranks, options);
}

CompressionResult compressHybridFixedRank(const Image& original, double cr, Nu nu, Eigen::Index rank,
                                          const SweepOptions& options)
{
    return hybridOverRanks(original, cr, nu, {rank}, options);
}

GridField containerPrior(const CompressedContainer& container, const std::optional<GridField>& externalPrior,
                         bool clamp)
{
    const GridDims dims = container.grid();
    switch (container.priorMode) {
    case PriorMode::Uniform:
        return uniformPrior(dims);
    case PriorMode::InlineSvd:
        return priorFromFactors(SvdFactors(container.m1.cast<double>(), container.m2.cast<double>()), dims, clamp);
    case PriorMode::ExternalRef:
        if (!externalPrior) {
            throw CodecError("container needs external prior '" + container.priorRef + "'");
        }
        if (!(externalPrior->dims() == dims)) {
            throw DimensionError("external prior '" + container.priorRef + "' does not match the container grid");
        }
        return *externalPrior;
    }
    throw CodecError("unknown prior mode");
}

Reconstruction reconstruct(const CompressedContainer& container, const std::optional<GridField>& externalPrior,
                           const SolverConfig& cfg, bool clampPrior)
{
    container.validate();
    const GridField prior = containerPrior(container, externalPrior, clampPrior);
    return reconstructFromMoments(container.momentSet(), prior, container.nu, container.p1, container.p2, cfg);
}

} // namespace mcc
