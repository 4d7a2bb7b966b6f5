#include "mcc/container.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace mcc {

namespace {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

class Writer {
public:
    template <typename T>
    void put(T value)
    {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
        bytes.insert(bytes.end(), p, p + sizeof(T));
    }
    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : bytes(b) {}

    template <typename T>
    T get()
    {
        need(sizeof(T));
        T value;
        std::memcpy(&value, bytes.data() + pos, sizeof(T));
        pos += sizeof(T);
        return value;
    }

    void need(std::size_t n) const
    {
        if (bytes.size() - pos < n) {
            throw ContainerError(ContainerError::Kind::LengthMismatch, "container truncated");
        }
    }

    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;
};

std::uint32_t crc(const std::uint8_t* data, std::size_t size)
{
    return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), data, static_cast<uInt>(size)));
}

} // namespace

const char* toString(PriorMode mode)
{
    switch (mode) {
    case PriorMode::Uniform:
        return "uniform";
    case PriorMode::InlineSvd:
        return "inline-svd";
    case PriorMode::ExternalRef:
        return "external-ref";
    }
    return "unknown";
}

void CompressedContainer::validate() const
{
    auto fail = [](const std::string& what) { throw ContainerError(ContainerError::Kind::Invalid, what); };
    if (p1 < 2 || p2 < 2) {
        fail("image dimensions must be at least 2x2");
    }
    const GridDims g = grid();
    if (2 * static_cast<Eigen::Index>(n1) >= g.n1 || 2 * static_cast<Eigen::Index>(n2) >= g.n2) {
        fail("index set too large for the grid");
    }
    if (moments.rows() != static_cast<Eigen::Index>(n1) + 1 || moments.cols() != static_cast<Eigen::Index>(n2) + 1) {
        fail("moment array does not match n1, n2");
    }
    if (!moments.allFinite()) {
        throw ContainerError(ContainerError::Kind::NanPayload, "non-finite moment");
    }
    if (!(moments(0, 0) > 0.0)) {
        fail("zeroth moment must be positive");
    }
    switch (priorMode) {
    case PriorMode::Uniform:
        if (rank != 0 || m1.size() != 0 || m2.size() != 0 || !priorRef.empty()) {
            fail("uniform mode carries no prior data");
        }
        break;
    case PriorMode::InlineSvd:
        if (rank == 0 || rank > std::min(p1, p2)) {
            fail("inline SVD rank out of range");
        }
        if (m1.rows() != p1 || m1.cols() != rank || m2.rows() != rank || m2.cols() != p2) {
            fail("factor dimensions do not match header");
        }
        if (!m1.allFinite() || !m2.allFinite()) {
            throw ContainerError(ContainerError::Kind::NanPayload, "non-finite factor entry");
        }
        if (!priorRef.empty()) {
            fail("inline SVD mode carries no prior reference");
        }
        break;
    case PriorMode::ExternalRef:
        if (priorRef.empty() || priorRef.size() > std::numeric_limits<std::uint16_t>::max()) {
            fail("external prior reference must be 1..65535 bytes");
        }
        if (m1.size() != 0 || m2.size() != 0) {
            fail("external reference mode carries no factors");
        }
        break;
    default:
        fail("unknown prior mode");
    }
}

bool CompressedContainer::operator==(const CompressedContainer& o) const
{
    auto same = [](const auto& a, const auto& b) {
        return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || (a == b).all());
    };
    return p1 == o.p1 && p2 == o.p2 && n1 == o.n1 && n2 == o.n2 && nu == o.nu && priorMode == o.priorMode
        && rank == o.rank && priorRef == o.priorRef && same(moments, o.moments) && same(m1.array(), o.m1.array())
        && same(m2.array(), o.m2.array());
}

std::vector<std::uint8_t> serialize(const CompressedContainer& c)
{
    c.validate();
    Writer w;
    w.bytes.insert(w.bytes.end(), {'M', 'C', 'C', '1'});
    w.put<std::uint16_t>(kContainerVersion);
    w.put<std::uint32_t>(c.p1);
    w.put<std::uint32_t>(c.p2);
    w.put<std::uint32_t>(c.n1);
    w.put<std::uint32_t>(c.n2);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(c.nu.code()));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(c.priorMode));
    w.put<std::uint16_t>(c.rank);
    if (c.priorMode == PriorMode::ExternalRef) {
        w.put<std::uint16_t>(static_cast<std::uint16_t>(c.priorRef.size()));
        w.bytes.insert(w.bytes.end(), c.priorRef.begin(), c.priorRef.end());
    }

    const std::size_t payloadStart = w.bytes.size();
    for (Eigen::Index k1 = 0; k1 < c.moments.rows(); ++k1) {
        for (Eigen::Index k2 = 0; k2 < c.moments.cols(); ++k2) {
            w.put<double>(c.moments(k1, k2));
        }
    }
    if (c.priorMode == PriorMode::InlineSvd) {
        for (Eigen::Index j = 0; j < c.m1.cols(); ++j) {
            for (Eigen::Index i = 0; i < c.m1.rows(); ++i) {
                w.put<float>(c.m1(i, j));
            }
        }
        for (Eigen::Index i = 0; i < c.m2.rows(); ++i) {
            for (Eigen::Index j = 0; j < c.m2.cols(); ++j) {
                w.put<float>(c.m2(i, j));
            }
        }
    }
    w.put<std::uint32_t>(crc(w.bytes.data() + payloadStart, w.bytes.size() - payloadStart));
    return std::move(w.bytes);
}

CompressedContainer deserialize(const std::vector<std::uint8_t>& bytes)
{
    Reader r(bytes);
    r.need(4);
    if (std::memcmp(bytes.data(), "MCC1", 4) != 0) {
        throw ContainerError(ContainerError::Kind::BadMagic, "not an MCC1 container");
    }
    r.pos = 4;
    const auto version = r.get<std::uint16_t>();
    if (version != kContainerVersion) {
        throw ContainerError(ContainerError::Kind::VersionMismatch,
                             "unsupported container version " + std::to_string(version));
    }
    CompressedContainer c;
    c.p1 = r.get<std::uint32_t>();
    c.p2 = r.get<std::uint32_t>();
    c.n1 = r.get<std::uint32_t>();
    c.n2 = r.get<std::uint32_t>();
    c.nu = Nu::fromCode(r.get<std::uint16_t>());
    const auto mode = r.get<std::uint8_t>();
    if (mode > 2) {
        throw ContainerError(ContainerError::Kind::Invalid, "unknown prior mode " + std::to_string(mode));
    }
    c.priorMode = static_cast<PriorMode>(mode);
    c.rank = r.get<std::uint16_t>();
    if (c.priorMode == PriorMode::ExternalRef) {
        const auto len = r.get<std::uint16_t>();
        r.need(len);
        c.priorRef.assign(bytes.begin() + static_cast<std::ptrdiff_t>(r.pos),
                          bytes.begin() + static_cast<std::ptrdiff_t>(r.pos + len));
        r.pos += len;
    }

    // Declared sizes must account for every remaining byte before any allocation.
    if (std::uint64_t{c.n1} + 1 > bytes.size() || std::uint64_t{c.n2} + 1 > bytes.size()) {
        throw ContainerError(ContainerError::Kind::LengthMismatch, "declared moment count exceeds stream");
    }
    const std::uint64_t momentCount = (std::uint64_t{c.n1} + 1) * (std::uint64_t{c.n2} + 1);
    const std::uint64_t factorCount =
        c.priorMode == PriorMode::InlineSvd ? (std::uint64_t{c.p1} + c.p2) * c.rank : 0;
    const std::uint64_t payloadBytes = 8 * momentCount + 4 * factorCount;
    if (bytes.size() - r.pos != payloadBytes + 4) {
        throw ContainerError(ContainerError::Kind::LengthMismatch,
                             "payload length " + std::to_string(bytes.size() - r.pos) + " does not match header ("
                                 + std::to_string(payloadBytes + 4) + " expected)");
    }
    const std::size_t payloadStart = r.pos;

    c.moments.resize(c.n1 + 1, c.n2 + 1);
    for (Eigen::Index k1 = 0; k1 < c.moments.rows(); ++k1) {
        for (Eigen::Index k2 = 0; k2 < c.moments.cols(); ++k2) {
            c.moments(k1, k2) = r.get<double>();
        }
    }
    if (c.priorMode == PriorMode::InlineSvd) {
        c.m1.resize(c.p1, c.rank);
        for (Eigen::Index j = 0; j < c.m1.cols(); ++j) {
            for (Eigen::Index i = 0; i < c.m1.rows(); ++i) {
                c.m1(i, j) = r.get<float>();
            }
        }
        c.m2.resize(c.rank, c.p2);
        for (Eigen::Index i = 0; i < c.m2.rows(); ++i) {
            for (Eigen::Index j = 0; j < c.m2.cols(); ++j) {
                c.m2(i, j) = r.get<float>();
            }
        }
    }
    const std::uint32_t expected = crc(bytes.data() + payloadStart, r.pos - payloadStart);
    if (r.get<std::uint32_t>() != expected) {
        throw ContainerError(ContainerError::Kind::ChecksumMismatch, "payload checksum mismatch");
    }
    c.validate();
    return c;
}

void writeContainer(const std::filesystem::path& path, const CompressedContainer& container)
{
    const auto bytes = serialize(container);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

CompressedContainer readContainer(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

} // namespace mcc
