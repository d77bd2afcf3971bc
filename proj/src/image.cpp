#include "atroscreen/image.hpp"
#include "atroscreen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace atroscreen {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

int clamp_index(int i, int n) { return std::min(n - 1, std::max(0, i)); }

// Cubic convolution kernel, a = -0.5.
double cubic_weight(double t) {
    constexpr double a = -0.5;
    t = std::fabs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return a * (((t - 5.0) * t + 8.0) * t - 4.0);
    return 0.0;
}

// --- PGM parsing -----------------------------------------------------------

struct ByteCursor {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    int peek() const { return eof() ? -1 : bytes[pos]; }
    int get() { return eof() ? -1 : bytes[pos++]; }

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "PGM parse error at byte " << pos << ": " << what;
        throw ParseError(os.str());
    }

    static bool is_space(int c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
    }

    // Whitespace and '#' comment lines both separate header tokens.
    void skip_separators() {
        for (;;) {
            while (!eof() && is_space(peek())) ++pos;
            if (!eof() && peek() == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                return;
            }
        }
    }

    long read_uint(const char* what) {
        skip_separators();
        if (eof() || peek() < '0' || peek() > '9') {
            fail(std::string("expected ") + what);
        }
        long value = 0;
        while (!eof() && peek() >= '0' && peek() <= '9') {
            value = value * 10 + (get() - '0');
            if (value > 1'000'000'000L) fail(std::string(what) + " out of range");
        }
        return value;
    }
};

} // namespace

InterpKind interp_kind_from_string(const std::string& name) {
    if (name == "nearest") return InterpKind::Nearest;
    if (name == "bilinear") return InterpKind::Bilinear;
    if (name == "bicubic") return InterpKind::Bicubic;
    throw ArgumentError("unknown interpolation kind: " + name);
}

std::string to_string(InterpKind kind) {
    switch (kind) {
        case InterpKind::Nearest: return "nearest";
        case InterpKind::Bilinear: return "bilinear";
        case InterpKind::Bicubic: return "bicubic";
    }
    return "bilinear";
}

Image load_pgm(const std::vector<std::uint8_t>& bytes) {
    ByteCursor cur{bytes};
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        cur.fail("expected magic P2 or P5");
    }
    const bool binary = bytes[1] == '5';
    cur.pos = 2;

    long width = cur.read_uint("width");
    long height = cur.read_uint("height");
    long maxval = cur.read_uint("maxval");
    if (width < 1 || height < 1) cur.fail("dimensions must be at least 1x1");
    if (maxval != 255 && maxval != 65535) {
        cur.fail("maxval must be 255 or 65535, got " + std::to_string(maxval));
    }

    Image img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    img.source_bit_depth = maxval == 255 ? 8 : 16;
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    img.intensities.resize(n);

    if (binary) {
        // exactly one whitespace byte after maxval, then the payload
        if (cur.eof() || !ByteCursor::is_space(cur.peek())) {
            cur.fail("expected single whitespace before pixel data");
        }
        ++cur.pos;
        const std::size_t bytes_per_sample = maxval == 255 ? 1 : 2;
        const std::size_t available = bytes.size() - cur.pos;
        if (available < n * bytes_per_sample) {
            cur.pos = bytes.size();
            cur.fail("pixel payload truncated: need " + std::to_string(n * bytes_per_sample) +
                     " bytes, have " + std::to_string(available));
        }
        if (maxval == 255) {
            for (std::size_t i = 0; i < n; ++i) {
                img.intensities[i] = bytes[cur.pos + i] / 255.0;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const unsigned hi = bytes[cur.pos + 2 * i];
                const unsigned lo = bytes[cur.pos + 2 * i + 1];
                img.intensities[i] = ((hi << 8) | lo) / 65535.0;
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            long v = cur.read_uint("pixel value");
            if (v > maxval) cur.fail("pixel value " + std::to_string(v) + " exceeds maxval");
            img.intensities[i] = static_cast<double>(v) / static_cast<double>(maxval);
        }
    }
    return img;
}

std::vector<std::uint8_t> save_pgm(const Image& img, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw ArgumentError("bit depth must be 8 or 16");
    }
    if (img.width < 1 || img.height < 1 ||
        img.intensities.size() != static_cast<std::size_t>(img.width) * img.height) {
        throw ArgumentError("invalid image");
    }
    const long maxval = bit_depth == 8 ? 255 : 65535;
    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n" + std::to_string(maxval) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.intensities.size() * (bit_depth / 8));
    for (double v : img.intensities) {
        const long q = std::lround(clamp01(v) * static_cast<double>(maxval));
        if (bit_depth == 8) {
            out.push_back(static_cast<std::uint8_t>(q));
        } else {
            out.push_back(static_cast<std::uint8_t>((q >> 8) & 0xFF));
            out.push_back(static_cast<std::uint8_t>(q & 0xFF));
        }
    }
    return out;
}

Image load_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open image file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return load_pgm(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_pgm_file(const Image& img, int bit_depth, const std::string& path) {
    const std::vector<std::uint8_t> bytes = save_pgm(img, bit_depth);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write image file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + path);
}

double sample(const Image& img, double x, double y, InterpKind kind) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw ArgumentError("sample coordinate must be finite");
    }
    const int w = img.width;
    const int h = img.height;

    // background fill past the pixel rectangle expanded by 2 px
    if (x < -2.0 || x > w - 1 + 2.0 || y < -2.0 || y > h - 1 + 2.0) return 0.0;

    switch (kind) {
        case InterpKind::Nearest: {
            if (x < -0.5 || x > w - 0.5 || y < -0.5 || y > h - 0.5) return 0.0;
            const int ix = clamp_index(static_cast<int>(std::floor(x + 0.5)), w);
            const int iy = clamp_index(static_cast<int>(std::floor(y + 0.5)), h);
            return img.at(ix, iy);
        }
        case InterpKind::Bilinear: {
            const int x0 = static_cast<int>(std::floor(x));
            const int y0 = static_cast<int>(std::floor(y));
            const double fx = x - x0;
            const double fy = y - y0;
            const double v00 = img.at(clamp_index(x0, w), clamp_index(y0, h));
            const double v10 = img.at(clamp_index(x0 + 1, w), clamp_index(y0, h));
            const double v01 = img.at(clamp_index(x0, w), clamp_index(y0 + 1, h));
            const double v11 = img.at(clamp_index(x0 + 1, w), clamp_index(y0 + 1, h));
            return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
                   (1 - fx) * fy * v01 + fx * fy * v11;
        }
        case InterpKind::Bicubic: {
            const int x0 = static_cast<int>(std::floor(x));
            const int y0 = static_cast<int>(std::floor(y));
            const double fx = x - x0;
            const double fy = y - y0;
            double acc = 0.0;
            for (int j = -1; j <= 2; ++j) {
                const double wy = cubic_weight(j - fy);
                if (wy == 0.0) continue;
                const int sy = clamp_index(y0 + j, h);
                for (int i = -1; i <= 2; ++i) {
                    const double wx = cubic_weight(i - fx);
                    if (wx == 0.0) continue;
                    acc += wx * wy * img.at(clamp_index(x0 + i, w), sy);
                }
            }
            return clamp01(acc);
        }
    }
    return 0.0;
}

Image resize(const Image& img, int new_width, int new_height, InterpKind kind) {
    if (new_width < 1 || new_height < 1) {
        throw ArgumentError("resize dimensions must be at least 1x1");
    }
    Image out(new_width, new_height);
    out.source_bit_depth = img.source_bit_depth;
    const double sx = static_cast<double>(img.width) / new_width;
    const double sy = static_cast<double>(img.height) / new_height;
    for (int j = 0; j < new_height; ++j) {
        const double src_y = (j + 0.5) * sy - 0.5;
        for (int i = 0; i < new_width; ++i) {
            const double src_x = (i + 0.5) * sx - 0.5;
            out.set(i, j, clamp01(sample(img, src_x, src_y, kind)));
        }
    }
    return out;
}

double sorted_quantile(const std::vector<double>& sorted_values, double q) {
    if (sorted_values.empty()) throw ArgumentError("quantile of empty sequence");
    if (sorted_values.size() == 1) return sorted_values[0];
    q = std::min(1.0, std::max(0.0, q));
    const double pos = q * static_cast<double>(sorted_values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted_values.size()) return sorted_values.back();
    return sorted_values[lo] * (1.0 - frac) + sorted_values[lo + 1] * frac;
}

Image normalize_intensity(const Image& img) {
    std::vector<double> sorted = img.intensities;
    std::sort(sorted.begin(), sorted.end());
    const double p1 = sorted_quantile(sorted, 0.01);
    const double p99 = sorted_quantile(sorted, 0.99);

    Image out = img;
    if (p99 - p1 < 1e-12) {
        std::fill(out.intensities.begin(), out.intensities.end(), 0.0);
        return out;
    }
    const double scale = 1.0 / (p99 - p1);
    for (double& v : out.intensities) {
        v = clamp01((v - p1) * scale);
    }
    return out;
}

} // namespace atroscreen
