#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace mcc {

class RateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fraction of pixel storage saved by a moments-only container; the extra
/// parameter accounts for storing nu.
double momentsOnlyRate(Eigen::Index p1, Eigen::Index p2, Eigen::Index n1, Eigen::Index n2);

/// Compression rate of a hybrid container with (n1+1)(n2+1) moments and
/// (p1+p2) r factor entries.
double hybridRate(Eigen::Index p1, Eigen::Index p2, Eigen::Index n1, Eigen::Index n2, Eigen::Index rank);

/// Square index-set order n1 = n2 = round(sqrt((1-cr) p1 p2 - (p1+p2) r)).
/// Throws RateError when the radicand is negative or 2n >= N_j.
Eigen::Index sizeFromRate(double cr, Eigen::Index p1, Eigen::Index p2, Eigen::Index rank);

/// Largest rank with a nonnegative radicand, capped at min(p1, p2). Throws
/// RateError when even rank 0 is infeasible.
Eigen::Index maxRankForRate(double cr, Eigen::Index p1, Eigen::Index p2);

} // namespace mcc
