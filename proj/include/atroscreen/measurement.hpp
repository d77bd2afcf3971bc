#ifndef ATROSCREEN_MEASUREMENT_HPP
#define ATROSCREEN_MEASUREMENT_HPP

#include "atroscreen/image.hpp"
#include "atroscreen/segmentation.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace atroscreen {

/// Geometric definition of the target area, in reference-space pixels.
struct RoiSpec {
    enum class Kind { Rect, Ellipse, Full };

    Kind kind = Kind::Full;
    // rect: inclusive bounds
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    // ellipse
    double cx = 0, cy = 0, rx = 0, ry = 0;

    static RoiSpec rect(double x0, double y0, double x1, double y1);
    static RoiSpec ellipse(double cx, double cy, double rx, double ry);
    static RoiSpec full();

    std::string describe() const;
};

struct RoiMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> inside;
    RoiSpec spec;
    std::int64_t area = 0;

    bool contains(int x, int y) const {
        return inside[static_cast<std::size_t>(y) * width + x] != 0;
    }
};

struct PixelCounts {
    std::int64_t black_count = 0;
    std::int64_t white_count = 0;
    std::int64_t roi_area = 0;
    bool coords_emitted = false;
    std::vector<std::pair<int, int>> black_coords;
    std::vector<std::pair<int, int>> white_coords;
};

struct BoundingBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct SizeComparison {
    BoundingBox target_extent;
    BoundingBox reference_extent;
    std::int64_t target_area = 0;
    std::int64_t reference_area = 0;
    double area_ratio = 0.0;
};

/// Rasterize an ROI spec onto a width x height grid. A pixel (x,y) is
/// inside a rect iff x0<=x<=x1 and y0<=y<=y1, inside an ellipse iff
/// ((x-cx)/rx)^2 + ((y-cy)/ry)^2 <= 1. An empty intersection is an error.
RoiMask make_roi(const RoiSpec& spec, int width, int height);

/// Tally black/white pixels inside the ROI. Coordinate arrays (row-major
/// order) are emitted only on request since the counts drive all statistics.
PixelCounts count_pixels(const BinaryMap& bm, const RoiMask& roi, bool emit_coords);

/// Foreground = pixels with intensity >= foreground_threshold. Extents are
/// tight bounding boxes, areas are foreground pixel counts,
/// area_ratio = target_area / reference_area.
SizeComparison compare_sizes(const Image& target, const Image& reference,
                             double foreground_threshold);

/// ROI file: JSON object {"shape": "rect"|"ellipse"|"full", ...params}.
RoiSpec parse_roi_json(const std::string& text);
RoiSpec load_roi_file(const std::string& path);

} // namespace atroscreen

#endif
