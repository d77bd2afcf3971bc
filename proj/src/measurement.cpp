#include "atroscreen/measurement.hpp"
#include "atroscreen/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace atroscreen {

RoiSpec RoiSpec::rect(double x0, double y0, double x1, double y1) {
    RoiSpec s;
    s.kind = Kind::Rect;
    s.x0 = x0;
    s.y0 = y0;
    s.x1 = x1;
    s.y1 = y1;
    return s;
}

RoiSpec RoiSpec::ellipse(double cx, double cy, double rx, double ry) {
    RoiSpec s;
    s.kind = Kind::Ellipse;
    s.cx = cx;
    s.cy = cy;
    s.rx = rx;
    s.ry = ry;
    return s;
}

RoiSpec RoiSpec::full() {
    RoiSpec s;
    s.kind = Kind::Full;
    return s;
}

std::string RoiSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Rect:
            os << "rect x0=" << x0 << " y0=" << y0 << " x1=" << x1 << " y1=" << y1;
            break;
        case Kind::Ellipse:
            os << "ellipse cx=" << cx << " cy=" << cy << " rx=" << rx << " ry=" << ry;
            break;
        case Kind::Full:
            os << "full-frame";
            break;
    }
    return os.str();
}

RoiMask make_roi(const RoiSpec& spec, int width, int height) {
    if (width < 1 || height < 1) throw ArgumentError("ROI grid must be at least 1x1");
    if (spec.kind == RoiSpec::Kind::Ellipse && (!(spec.rx > 0.0) || !(spec.ry > 0.0))) {
        throw ArgumentError("ellipse ROI radii must be positive");
    }

    RoiMask mask;
    mask.width = width;
    mask.height = height;
    mask.spec = spec;
    mask.inside.assign(static_cast<std::size_t>(width) * height, 0);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            bool inside = false;
            switch (spec.kind) {
                case RoiSpec::Kind::Full:
                    inside = true;
                    break;
                case RoiSpec::Kind::Rect:
                    inside = x >= spec.x0 && x <= spec.x1 && y >= spec.y0 && y <= spec.y1;
                    break;
                case RoiSpec::Kind::Ellipse: {
                    const double nx = (x - spec.cx) / spec.rx;
                    const double ny = (y - spec.cy) / spec.ry;
                    inside = nx * nx + ny * ny <= 1.0;
                    break;
                }
            }
            if (inside) {
                mask.inside[static_cast<std::size_t>(y) * width + x] = 1;
                ++mask.area;
            }
        }
    }
    if (mask.area == 0) {
        throw DataError("ROI does not intersect the image: " + spec.describe());
    }
    return mask;
}

PixelCounts count_pixels(const BinaryMap& bm, const RoiMask& roi, bool emit_coords) {
    if (bm.width != roi.width || bm.height != roi.height) {
        throw ArgumentError("binary map and ROI dimensions differ");
    }
    PixelCounts out;
    out.roi_area = roi.area;
    out.coords_emitted = emit_coords;
    for (int y = 0; y < bm.height; ++y) {
        for (int x = 0; x < bm.width; ++x) {
            if (!roi.contains(x, y)) continue;
            if (bm.is_black(x, y)) {
                ++out.black_count;
                if (emit_coords) out.black_coords.emplace_back(x, y);
            } else {
                ++out.white_count;
                if (emit_coords) out.white_coords.emplace_back(x, y);
            }
        }
    }
    return out;
}

SizeComparison compare_sizes(const Image& target, const Image& reference,
                             double foreground_threshold) {
    if (!(foreground_threshold > 0.0 && foreground_threshold < 1.0)) {
        throw ArgumentError("foreground threshold must lie strictly in (0,1)");
    }

    const auto scan = [foreground_threshold](const Image& img, const char* name) {
        BoundingBox box{img.width, img.height, -1, -1};
        std::int64_t area = 0;
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                if (img.at(x, y) >= foreground_threshold) {
                    ++area;
                    box.x0 = std::min(box.x0, x);
                    box.y0 = std::min(box.y0, y);
                    box.x1 = std::max(box.x1, x);
                    box.y1 = std::max(box.y1, y);
                }
            }
        }
        if (area == 0) {
            throw DataError(std::string("no foreground pixels in ") + name +
                            " image at threshold " + std::to_string(foreground_threshold));
        }
        return std::make_pair(box, area);
    };

    const auto [tbox, tarea] = scan(target, "target");
    const auto [rbox, rarea] = scan(reference, "reference");

    SizeComparison cmp;
    cmp.target_extent = tbox;
    cmp.reference_extent = rbox;
    cmp.target_area = tarea;
    cmp.reference_area = rarea;
    cmp.area_ratio = static_cast<double>(tarea) / static_cast<double>(rarea);
    return cmp;
}

RoiSpec parse_roi_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("ROI file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("shape")) {
        throw ParseError("ROI file: expected an object with a \"shape\" key");
    }
    const std::string shape = doc["shape"].get<std::string>();
    const auto num = [&doc](const char* key) {
        if (!doc.contains(key) || !doc[key].is_number()) {
            throw ParseError(std::string("ROI file: missing numeric field \"") + key + "\"");
        }
        return doc[key].get<double>();
    };
    if (shape == "rect") return RoiSpec::rect(num("x0"), num("y0"), num("x1"), num("y1"));
    if (shape == "ellipse") return RoiSpec::ellipse(num("cx"), num("cy"), num("rx"), num("ry"));
    if (shape == "full") return RoiSpec::full();
    throw ParseError("ROI file: unknown shape \"" + shape + "\"");
}

RoiSpec load_roi_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open ROI file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_roi_json(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace atroscreen
