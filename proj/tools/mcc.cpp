// mcc: compress grayscale images into trigonometric moments and back.

#include "mcc/codec.hpp"
#include "mcc/pgm.hpp"
#include "mcc/rate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverFlags {
    mcc::SolverConfig cfg;

    void attach(CLI::App* app)
    {
        app->add_option("--grad-tol", cfg.gradTol, "moment residual tolerance (max norm)")->capture_default_str();
        app->add_option("--max-iter", cfg.maxIter, "Newton iteration limit")->capture_default_str();
        app->add_option("--cg-tol", cfg.cgTol, "relative tolerance of the inner CG solve")->capture_default_str();
        app->add_option("--cg-max-iter", cfg.cgMaxIter, "CG iteration limit, 0 = number of coefficients")
            ->capture_default_str();
    }
};

std::vector<mcc::Nu> parseNuList(const std::string& text)
{
    std::vector<mcc::Nu> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) {
            out.push_back(mcc::Nu::parse(token));
        }
    }
    if (out.empty()) {
        throw Failure("empty --nu candidate list");
    }
    return out;
}

// Writes through a sibling temporary so a failed run leaves no output behind.
template <typename WriteFn>
void writeAtomically(const fs::path& target, WriteFn&& write)
{
    fs::path tmp = target;
    tmp += ".partial";
    try {
        write(tmp);
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

json psnrValue(double value)
{
    return std::isinf(value) ? json("inf") : json(value);
}

std::string formatPsnr(double value)
{
    if (std::isinf(value)) {
        return "inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f dB", value);
    return buf;
}

json candidateJson(const mcc::CandidateScore& c)
{
    return {{"nu", c.nu.toString()},
            {"rank", c.rank},
            {"n1", c.n1},
            {"n2", c.n2},
            {"psnr", psnrValue(c.psnr)},
            {"rate", c.rate},
            {"seconds", c.seconds},
            {"converged", c.report.converged},
            {"iterations", c.report.iterations},
            {"cgIterations", c.report.cgIterations},
            {"residual", c.report.finalResidual},
            {"dualValue", c.report.finalDualValue}};
}

void printTable(const mcc::CompressionResult& result)
{
    std::printf("%-5s %5s %5s %5s %12s %8s %6s %9s\n", "nu", "rank", "n1", "n2", "psnr", "rate", "iters", "seconds");
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
        const auto& c = result.candidates[i];
        std::printf("%-5s %5ld %5ld %5ld %12s %8.4f %6d %9.3f%s%s\n", c.nu.toString().c_str(),
                    static_cast<long>(c.rank), static_cast<long>(c.n1), static_cast<long>(c.n2),
                    formatPsnr(c.psnr).c_str(), c.rate, c.report.iterations, c.seconds,
                    c.report.converged ? "" : "  (not converged)", i == result.selected ? "  *" : "");
    }
}

void finish(const mcc::CompressionResult& result, const std::string& command, const std::string& input,
            const std::string& output, const std::string& reportPath)
{
    writeAtomically(output, [&](const fs::path& p) { mcc::writeContainer(p, result.container); });
    printTable(result);
    const auto& sel = result.candidates[result.selected];
    std::printf("selected nu=%s rank=%ld n=%ldx%ld psnr=%s -> %s\n", sel.nu.toString().c_str(),
                static_cast<long>(sel.rank), static_cast<long>(sel.n1), static_cast<long>(sel.n2),
                formatPsnr(sel.psnr).c_str(), output.c_str());
    if (reportPath.empty()) {
        return;
    }
    json report{{"command", command},
                {"input", input},
                {"output", output},
                {"p1", result.container.p1},
                {"p2", result.container.p2},
                {"priorMode", mcc::toString(result.container.priorMode)},
                {"selected", result.selected},
                {"candidates", json::array()}};
    for (const auto& c : result.candidates) {
        report["candidates"].push_back(candidateJson(c));
    }
    writeAtomically(reportPath, [&](const fs::path& p) {
        std::ofstream out(p);
        out << report.dump(2) << '\n';
        if (!out) {
            throw Failure("cannot write report " + p.string());
        }
    });
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Moment-based image codec"};
    app.require_subcommand(1);

    std::string input, output, reportPath, nuText = "1,2,inf";
    std::string priorPath, priorRef;
    int jobs = 1;
    bool noClamp = false;
    SolverFlags solver;

    // compress
    auto* compress = app.add_subcommand("compress", "moments-only compression with a sweep over nu");
    Eigen::Index n = 0;
    double cr = 0.0;
    Eigen::Index priorRank = 0;
    compress->add_option("--input,-i", input, "input PGM/PPM image")->required();
    compress->add_option("--out,-o", output, "output container")->required();
    auto* nOpt = compress->add_option("--n", n, "index set order n1 = n2")->check(CLI::PositiveNumber);
    auto* crOpt = compress->add_option("--cr", cr, "target compression rate in (0,1)")->check(CLI::Range(0.0, 1.0));
    nOpt->excludes(crOpt);
    crOpt->excludes(nOpt);
    compress->add_option("--nu", nuText, "candidate orders, e.g. 1,2,inf")->capture_default_str();
    compress->add_option("--prior", priorPath, "similar image used as the prior (database mode)");
    compress->add_option("--prior-ref", priorRef, "name stored in the container for --prior");
    compress->add_option("--prior-rank", priorRank, "rank of the prior built from --prior")->check(CLI::PositiveNumber);
    compress->add_option("--report", reportPath, "write a JSON run report");
    compress->add_option("--jobs,-j", jobs, "parallel candidate solves")->check(CLI::PositiveNumber);
    compress->add_flag("--no-clamp", noClamp, "do not clamp the low-rank prior product to [0,1]");
    solver.attach(compress);

    // hybrid
    auto* hybrid = app.add_subcommand("hybrid", "moments plus inline low-rank prior, sweeping the rank");
    std::string rankText = "sweep";
    std::string hybridNu = "1";
    hybrid->add_option("--input,-i", input, "input PGM/PPM image")->required();
    hybrid->add_option("--out,-o", output, "output container")->required();
    hybrid->add_option("--cr", cr, "target compression rate in (0,1)")->required()->check(CLI::Range(0.0, 1.0));
    hybrid->add_option("--nu", hybridNu, "divergence order (integer >= 1 or inf)")->capture_default_str();
    hybrid->add_option("--r", rankText, "prior rank, or 'sweep' for 0..r_max")->capture_default_str();
    hybrid->add_option("--report", reportPath, "write a JSON run report");
    hybrid->add_option("--jobs,-j", jobs, "parallel rank solves")->check(CLI::PositiveNumber);
    hybrid->add_flag("--no-clamp", noClamp, "do not clamp the low-rank prior product to [0,1]");
    solver.attach(hybrid);

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "decode a container to a PGM image");
    bool verify = false;
    rec->add_option("--input,-i", input, "input container")->required();
    rec->add_option("--out,-o", output, "output PGM")->required();
    rec->add_option("--prior", priorPath, "prior image for containers with an external reference");
    rec->add_flag("--verify", verify, "print the optimality certificate");
    rec->add_flag("--no-clamp", noClamp, "do not clamp the low-rank prior product to [0,1]");
    solver.attach(rec);

    // eval
    auto* eval = app.add_subcommand("eval", "PSNR between two images");
    std::vector<std::string> evalPaths;
    eval->add_option("images", evalPaths, "reference and test image")->required()->expected(2);

    CLI11_PARSE(app, argc, argv);

    try {
        solver.cfg.validate();
        mcc::SweepOptions options;
        options.solver = solver.cfg;
        options.jobs = jobs;
        options.clampPrior = !noClamp;

        if (*compress) {
            if (!*nOpt && !*crOpt) {
                throw Failure("compress needs --n or --cr");
            }
            if (!priorPath.empty() && priorRef.empty()) {
                throw Failure("--prior needs --prior-ref naming it in the container");
            }
            if (priorPath.empty() && (!priorRef.empty() || priorRank != 0)) {
                throw Failure("--prior-ref and --prior-rank need --prior");
            }
            const auto candidates = parseNuList(nuText);
            const mcc::Image image = mcc::readPnm(fs::path(input));
            const mcc::GridDims dims = mcc::mirroredDims(image.rows(), image.cols());
            const Eigen::Index order = *nOpt ? n : mcc::sizeFromRate(cr, image.rows(), image.cols(), 0);
            const mcc::IndexSet idx(order, order, dims);

            mcc::PriorDescriptor descriptor;
            mcc::GridField prior = mcc::uniformPrior(dims);
            if (!priorPath.empty()) {
                const mcc::Image similar = mcc::readPnm(fs::path(priorPath));
                const Eigen::Index rank = priorRank != 0 ? priorRank : std::min(similar.rows(), similar.cols());
                prior = mcc::priorFromSimilarImage(similar, rank, dims, options.clampPrior);
                descriptor.mode = mcc::PriorMode::ExternalRef;
                descriptor.ref = priorRef;
                descriptor.rank = rank;
            }
            const auto result = mcc::compressSweepNu(image, idx, prior, candidates, options, descriptor);
            finish(result, "compress", input, output, reportPath);
        } else if (*hybrid) {
            const mcc::Nu nu = mcc::Nu::parse(hybridNu);
            const mcc::Image image = mcc::readPnm(fs::path(input));
            mcc::CompressionResult result;
            if (rankText == "sweep") {
                result = mcc::compressHybrid(image, cr, nu, options);
            } else {
                std::size_t used = 0;
                const long rank = std::stol(rankText, &used);
                if (used != rankText.size() || rank < 0) {
                    throw Failure("--r expects a nonnegative integer or 'sweep'");
                }
                result = mcc::compressHybridFixedRank(image, cr, nu, rank, options);
            }
            finish(result, "hybrid", input, output, reportPath);
        } else if (*rec) {
            const mcc::CompressedContainer container = mcc::readContainer(fs::path(input));
            std::optional<mcc::GridField> external;
            if (container.priorMode == mcc::PriorMode::ExternalRef) {
                if (priorPath.empty()) {
                    throw Failure("container references prior '" + container.priorRef + "'; pass it with --prior");
                }
                const mcc::Image similar = mcc::readPnm(fs::path(priorPath));
                external = mcc::priorFromSimilarImage(similar, container.rank, container.grid(), !noClamp);
            }
            const mcc::Reconstruction r = mcc::reconstruct(container, external, solver.cfg, !noClamp);
            if (verify) {
                const auto d = mcc::verifyDuality(r.solution.q, container.momentSet(),
                                                  mcc::containerPrior(container, external, !noClamp), container.nu);
                std::printf("moment residual %.3e\nmin Q %.6e\ndivergence %.12g\ndual value %.12g\n",
                            d.maxMomentResidual, d.minQ, d.divergence, d.dualValue);
            }
            if (!r.solution.report.converged) {
                throw Failure("solver did not converge (residual " + std::to_string(r.solution.report.finalResidual)
                              + ")");
            }
            writeAtomically(output, [&](const fs::path& p) { mcc::writePgm(p, r.image); });
        } else if (*eval) {
            const mcc::Image a = mcc::readPnm(fs::path(evalPaths[0]));
            const mcc::Image b = mcc::readPnm(fs::path(evalPaths[1]));
            std::printf("%s\n", formatPsnr(mcc::psnr(a, b)).c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "mcc: %s\n", e.what());
        return 1;
    }
    return 0;
}
