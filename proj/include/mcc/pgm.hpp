#pragma once

#include "mcc/image.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

namespace mcc {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary netpbm I/O. P5 (grayscale) is read and written; P6 (color) is read
// and converted to gray by the equal-weight channel average. Samples map to
// intensities as v / maxval on read and round(255 x) on write.

Image readPnm(std::istream& in);
Image readPnm(const std::filesystem::path& path);

void writePgm(std::ostream& out, const Image& image);
void writePgm(const std::filesystem::path& path, const Image& image);

} // namespace mcc
