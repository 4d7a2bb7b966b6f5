#include "mcc/rate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mcc {

namespace {

double radicand(double cr, Eigen::Index p1, Eigen::Index p2, Eigen::Index rank)
{
    return (1.0 - cr) * static_cast<double>(p1 * p2) - static_cast<double>((p1 + p2) * rank);
}

void checkRate(double cr, Eigen::Index p1, Eigen::Index p2)
{
    if (!(cr > 0.0 && cr < 1.0)) {
        throw RateError("compression rate must lie in (0,1)");
    }
    if (p1 < 2 || p2 < 2) {
        throw RateError("image must be at least 2x2");
    }
}

} // namespace

double momentsOnlyRate(Eigen::Index p1, Eigen::Index p2, Eigen::Index n1, Eigen::Index n2)
{
    return 1.0 - static_cast<double>((n1 + 1) * (n2 + 1) + 1) / static_cast<double>(p1 * p2);
}

double hybridRate(Eigen::Index p1, Eigen::Index p2, Eigen::Index n1, Eigen::Index n2, Eigen::Index rank)
{
    return 1.0 - static_cast<double>((p1 + p2) * rank + (n1 + 1) * (n2 + 1)) / static_cast<double>(p1 * p2);
}

Eigen::Index sizeFromRate(double cr, Eigen::Index p1, Eigen::Index p2, Eigen::Index rank)
{
    checkRate(cr, p1, p2);
    const double rad = radicand(cr, p1, p2, rank);
    if (rad < 0.0) {
        throw RateError("rate " + std::to_string(cr) + " leaves no room for moments at rank " + std::to_string(rank));
    }
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(rad)));
    if (2 * n >= 2 * (p1 - 1) || 2 * n >= 2 * (p2 - 1)) {
        throw RateError("rate " + std::to_string(cr) + " gives n = " + std::to_string(n)
                        + ", too many moments for the grid");
    }
    return n;
}

Eigen::Index maxRankForRate(double cr, Eigen::Index p1, Eigen::Index p2)
{
    checkRate(cr, p1, p2);
    if (radicand(cr, p1, p2, 0) < 0.0) {
        throw RateError("rate leaves no room for moments");
    }
    Eigen::Index r = 0;
    const Eigen::Index cap = std::min(p1, p2);
    while (r < cap && radicand(cr, p1, p2, r + 1) >= 0.0) {
        ++r;
    }
    return r;
}

} // namespace mcc
