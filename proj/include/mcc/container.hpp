#pragma once

#include "mcc/divergence.hpp"
#include "mcc/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcc {

enum class PriorMode : std::uint8_t {
    Uniform = 0,
    InlineSvd = 1,
    ExternalRef = 2,
};

const char* toString(PriorMode mode);

/// Compressed image: header, f64 moments and, for the inline-SVD mode, f32
/// low-rank factors.
///
/// On disk ("MCC1", little-endian, no padding):
///   'M' 'C' 'C' '1' | u16 version = 1 | u32 p1, p2, n1, n2 | u16 nu (0 = inf)
///   | u8 prior mode | u16 r | [u16 ref length, ref bytes]  (external ref only)
///   | (n1+1)(n2+1) f64 moments, row-major over (k1, k2)
///   | [p1 r f32 M1 column-major, r p2 f32 M2 row-major]  (inline SVD only)
///   | u32 CRC-32 of the moment and factor bytes
struct CompressedContainer {
    std::uint32_t p1 = 0;
    std::uint32_t p2 = 0;
    std::uint32_t n1 = 0;
    std::uint32_t n2 = 0;
    Nu nu = Nu::infinity();
    PriorMode priorMode = PriorMode::Uniform;
    std::uint16_t rank = 0;
    std::string priorRef;
    /// (n1+1) x (n2+1), entry (k1, k2).
    Eigen::ArrayXXd moments;
    Eigen::MatrixXf m1;
    Eigen::MatrixXf m2;

    GridDims grid() const { return mirroredDims(p1, p2); }
    IndexSet indexSet() const { return IndexSet(n1, n2, grid()); }
    MomentSet momentSet() const { return MomentSet(indexSet(), moments); }

    /// Throws ContainerError(Invalid) on broken invariants.
    void validate() const;

    bool operator==(const CompressedContainer& other) const;
};

class ContainerError : public std::runtime_error {
public:
    enum class Kind {
        BadMagic,
        VersionMismatch,
        LengthMismatch,
        NanPayload,
        ChecksumMismatch,
        Invalid,
    };

    ContainerError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline constexpr std::uint16_t kContainerVersion = 1;
/// Fixed header bytes before the optional prior reference.
inline constexpr std::size_t kContainerHeaderBytes = 27;

std::vector<std::uint8_t> serialize(const CompressedContainer& container);
CompressedContainer deserialize(const std::vector<std::uint8_t>& bytes);

void writeContainer(const std::filesystem::path& path, const CompressedContainer& container);
CompressedContainer readContainer(const std::filesystem::path& path);

} // namespace mcc
