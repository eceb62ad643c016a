#include "eitfuse/netpbm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

#include "eitfuse/error.hpp"

namespace eitfuse {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    return out;
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

struct Header {
    std::string magic;
    int cols = 0;
    int rows = 0;
    int maxval = 0;
};

Header read_header(std::istream& in, const std::string& path) {
    Header h;
    h.magic = next_token(in);
    try {
        h.cols = std::stoi(next_token(in));
        h.rows = std::stoi(next_token(in));
        h.maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw FormatError(path + ": malformed netpbm header");
    }
    if (h.cols <= 0 || h.rows <= 0 || h.maxval <= 0 || h.maxval > 65535) {
        throw FormatError(path + ": invalid netpbm dimensions");
    }
    return h;
}

}  // namespace

void write_ppm(const std::string& path, const RgbImage& img) {
    auto out = open_out(path);
    out << "P6\n" << img.cols << ' ' << img.rows << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (!out) throw Error("failed writing " + path);
}

RgbImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    const Header h = read_header(in, path);
    if (h.magic != "P6") throw FormatError(path + ": expected binary PPM (P6)");
    if (h.maxval != 255) throw FormatError(path + ": only 8-bit PPM supported");
    RgbImage img(h.rows, h.cols);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) throw FormatError(path + ": truncated pixel data");
    return img;
}

void write_pgm8(const std::string& path, int rows, int cols, const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() != static_cast<std::size_t>(rows) * cols) throw InputError("PGM size mismatch");
    auto out = open_out(path);
    out << "P5\n" << cols << ' ' << rows << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + path);
}

void write_mask_pgm(const std::string& path, const BinaryImage& img) {
    std::vector<std::uint8_t> bytes(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) bytes[i] = img.data[i] ? 255 : 0;
    write_pgm8(path, img.rows, img.cols, bytes);
}

BinaryImage read_mask_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    const Header h = read_header(in, path);
    if (h.magic != "P5" || h.maxval > 255) throw FormatError(path + ": expected 8-bit binary PGM (P5)");
    BinaryImage img(h.rows, h.cols, 0);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.size())) throw FormatError(path + ": truncated pixel data");
    for (auto& v : img.data) v = v ? 1 : 0;
    return img;
}

void write_gray_pgm16(const std::string& path, const GrayImage& img) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : img.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    auto out = open_out(path);
    out << "P5\n" << img.cols << ' ' << img.rows << "\n65535\n";
    for (double v : img.data) {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
        const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
        const char be[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
        out.write(be, 2);
    }
    if (!out) throw Error("failed writing " + path);
}

}  // namespace eitfuse
