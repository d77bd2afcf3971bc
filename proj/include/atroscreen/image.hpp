#ifndef ATROSCREEN_IMAGE_HPP
#define ATROSCREEN_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace atroscreen {

/**
 * @brief 2D grayscale slice with normalized intensities.
 *
 * Pixel data is stored row-major: index = y * width + x. Intensities live
 * in [0,1] regardless of the bit depth of the file they came from;
 * source_bit_depth (8 or 16) is kept for provenance only.
 */
struct Image {
    int width = 0;
    int height = 0;
    int source_bit_depth = 8;
    std::vector<double> intensities;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h),
          intensities(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    double at(int x, int y) const {
        return intensities[static_cast<std::size_t>(y) * width + x];
    }
    void set(int x, int y, double v) {
        intensities[static_cast<std::size_t>(y) * width + x] = v;
    }
    std::size_t pixel_count() const { return intensities.size(); }
};

enum class InterpKind { Nearest, Bilinear, Bicubic };

InterpKind interp_kind_from_string(const std::string& name);
std::string to_string(InterpKind kind);

/// Parse a P2 (ASCII) or P5 (binary) PGM with maxval 255 or 65535.
/// Intensities are raw/maxval. Malformed input raises ParseError naming
/// the byte offset.
Image load_pgm(const std::vector<std::uint8_t>& bytes);

/// Encode as binary P5, header "P5\n<w> <h>\n<maxval>\n", samples
/// big-endian for 16-bit. Intensity v encodes as round(v * maxval).
std::vector<std::uint8_t> save_pgm(const Image& img, int bit_depth);

Image load_pgm_file(const std::string& path);
void save_pgm_file(const Image& img, int bit_depth, const std::string& path);

/**
 * @brief Sample the image at a real-valued coordinate.
 *
 * Nearest returns the intensity of the round-to-nearest pixel; Bilinear
 * blends the 4 surrounding pixels; Bicubic is the 16-pixel cubic kernel
 * (a = -0.5), clamped to [0,1]. Neighborhoods reaching past the border use
 * edge replication. Background fill (0) applies when the sample is farther
 * than 0.5 px from any pixel (Nearest) or past the image rectangle expanded
 * by 2 px (all kinds).
 */
double sample(const Image& img, double x, double y, InterpKind kind);

/// Resample to new dimensions with pixel-center alignment:
/// output (i,j) samples the source at ((i+0.5)*w/W - 0.5, (j+0.5)*h/H - 0.5).
Image resize(const Image& img, int new_width, int new_height, InterpKind kind);

/// Linear rescale mapping the 1st intensity percentile to 0 and the 99th
/// to 1, clamped to [0,1]. Constant images map to all-zero.
Image normalize_intensity(const Image& img);

/// Interpolated quantile of a sorted sequence, q in [0,1]
/// (linear interpolation between order statistics).
double sorted_quantile(const std::vector<double>& sorted_values, double q);

} // namespace atroscreen

#endif
