#pragma once

#include "mcc/container.hpp"
#include "mcc/divergence.hpp"
#include "mcc/image.hpp"
#include "mcc/priors.hpp"
#include "mcc/solver.hpp"
#include "mcc/spectral.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcc {

class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepOptions {
    SolverConfig solver;
    /// Candidate solves run on this many threads; results do not depend on it.
    int jobs = 1;
    /// Clamp low-rank products to [0,1] before building the prior.
    bool clampPrior = true;
};

/// One solve of a sweep, scored against the original.
struct CandidateScore {
    Nu nu = Nu::infinity();
    Eigen::Index rank = 0;
    Eigen::Index n1 = 0;
    Eigen::Index n2 = 0;
    double psnr = 0.0;
    double rate = 0.0;
    double seconds = 0.0;
    SolveReport report;
};

struct CompressionResult {
    CompressedContainer container;
    std::vector<CandidateScore> candidates;
    /// Index into candidates of the stored configuration.
    std::size_t selected = 0;
};

/// How the container refers to the prior used while compressing.
struct PriorDescriptor {
    PriorMode mode = PriorMode::Uniform;
    std::string ref;
    /// Rank the decoder uses to rebuild an external prior.
    Eigen::Index rank = 0;
    /// Only for PriorMode::InlineSvd.
    SvdFactors factors;
};

/// Reconstruction from moments and a prior at one divergence order.
struct Reconstruction {
    Image image;
    /// log of the reconstructed field on the image block, before clamping.
    Eigen::MatrixXd rawPixels;
    DualSolution solution;
};

Reconstruction reconstructFromMoments(const MomentSet& moments, const GridField& prior, Nu nu, Eigen::Index p1,
                                      Eigen::Index p2, const SolverConfig& cfg = {});

/// Computes the moments once, reconstructs at every candidate order and keeps
/// the one with the highest PSNR (ties go to the earlier candidate). Solves
/// that do not converge are excluded; throws CodecError if none converges.
CompressionResult compressSweepNu(const Image& original, const IndexSet& idx, const GridField& prior,
                                  std::span<const Nu> candidates, const SweepOptions& options = {},
                                  const PriorDescriptor& descriptor = {});

/// Hybrid compression at rate cr: for every rank r in 0..r_max, sizes the
/// moment set from the remaining budget, builds the rank-r prior (uniform for
/// r = 0) and reconstructs; keeps the rank with the highest PSNR.
CompressionResult compressHybrid(const Image& original, double cr, Nu nu, const SweepOptions& options = {});

/// Hybrid compression at one fixed rank.
CompressionResult compressHybridFixedRank(const Image& original, double cr, Nu nu, Eigen::Index rank,
                                          const SweepOptions& options = {});

/// Low-rank factors rounded to the container's f32 precision.
SvdFactors quantizeFactors(const SvdFactors& factors);

/// Prior described by a container; EXTERNAL_REF needs the supplied field.
GridField containerPrior(const CompressedContainer& container, const std::optional<GridField>& externalPrior,
                         bool clamp = true);

Reconstruction reconstruct(const CompressedContainer& container, const std::optional<GridField>& externalPrior = {},
                           const SolverConfig& cfg = {}, bool clampPrior = true);

} // namespace mcc
