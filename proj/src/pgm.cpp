#include "mcc/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace mcc {

namespace {

void skipWhitespaceAndComments(std::istream& in)
{
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            in.get();
        } else {
            return;
        }
    }
}

long readHeaderInt(std::istream& in, const char* what)
{
    skipWhitespaceAndComments(in);
    long value = -1;
    if (!(in >> value) || value <= 0) {
        throw ImageIoError(std::string("pnm: bad ") + what);
    }
    return value;
}

} // namespace

Image readPnm(std::istream& in)
{
    char magic[2] = {0, 0};
    if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        throw ImageIoError("pnm: expected binary P5 or P6 header");
    }
    const int channels = magic[1] == '5' ? 1 : 3;
    const long width = readHeaderInt(in, "width");
    const long height = readHeaderInt(in, "height");
    const long maxval = readHeaderInt(in, "maxval");
    if (maxval > 255) {
        throw ImageIoError("pnm: only 8-bit samples are supported");
    }
    // exactly one whitespace byte separates the header from the raster
    in.get();

    std::vector<unsigned char> raster(static_cast<size_t>(width * height * channels));
    if (!in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()))) {
        throw ImageIoError("pnm: truncated raster");
    }

    Eigen::MatrixXd pixels(height, width);
    const double scale = 1.0 / static_cast<double>(maxval);
    for (long i = 0; i < height; ++i) {
        for (long j = 0; j < width; ++j) {
            const size_t base = static_cast<size_t>((i * width + j) * channels);
            double sum = 0.0;
            for (int c = 0; c < channels; ++c) {
                sum += std::min<double>(raster[base + c], static_cast<double>(maxval));
            }
            pixels(i, j) = sum / channels * scale;
        }
    }
    return Image(std::move(pixels));
}

Image readPnm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ImageIoError("cannot open " + path.string());
    }
    return readPnm(in);
}

void writePgm(std::ostream& out, const Image& image)
{
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    std::vector<unsigned char> raster(static_cast<size_t>(image.rows() * image.cols()));
    for (Eigen::Index i = 0; i < image.rows(); ++i) {
        for (Eigen::Index j = 0; j < image.cols(); ++j) {
            raster[static_cast<size_t>(i * image.cols() + j)] =
                static_cast<unsigned char>(std::lround(255.0 * image(i, j)));
        }
    }
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) {
        throw ImageIoError("pgm: write failed");
    }
}

void writePgm(const std::filesystem::path& path, const Image& image)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ImageIoError("cannot open " + path.string() + " for writing");
    }
    writePgm(out, image);
}

} // namespace mcc
