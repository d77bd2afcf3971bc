#include "atroscreen/registration.hpp"
#include "atroscreen/errors.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>

namespace atroscreen {

namespace {

constexpr double kSingularTol = 1e-9;
constexpr double kCollinearAreaTol = 1e-6; // px^2

// Gaussian elimination with partial pivoting for a 3x3 system.
std::array<double, 3> solve3(std::array<std::array<double, 4>, 3> m) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
        }
        if (std::fabs(m[pivot][col]) < 1e-12) {
            throw DataError("registration normal equations are rank deficient");
        }
        std::swap(m[col], m[pivot]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double factor = m[r][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[r][k] -= factor * m[col][k];
        }
    }
    return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

double largest_triangle_area(const std::vector<ControlPointPair>& pairs) {
    double best = 0.0;
    const std::size_t n = pairs.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const Point2& p = pairs[i].ref;
                const Point2& q = pairs[j].ref;
                const Point2& r = pairs[k].ref;
                const double area = 0.5 * std::fabs((q.x - p.x) * (r.y - p.y) -
                                                    (r.x - p.x) * (q.y - p.y));
                best = std::max(best, area);
            }
        }
    }
    return best;
}

void require_finite(const ControlPointPair& p) {
    if (!std::isfinite(p.ref.x) || !std::isfinite(p.ref.y) ||
        !std::isfinite(p.subj.x) || !std::isfinite(p.subj.y)) {
        throw ArgumentError("control point coordinates must be finite");
    }
}

} // namespace

RegistrationResult estimate_affine(const std::vector<ControlPointPair>& pairs) {
    if (pairs.size() < 3) {
        throw DataError("insufficient landmarks: need at least 3 pairs, got " +
                        std::to_string(pairs.size()));
    }
    for (const auto& p : pairs) require_finite(p);
    if (largest_triangle_area(pairs) <= kCollinearAreaTol) {
        throw DataError("reference landmarks are collinear or nearly so");
    }

    // Center coordinates before forming the normal equations; the minimizer
    // is unchanged and the 3x3 systems stay well conditioned.
    const double n = static_cast<double>(pairs.size());
    double mrx = 0, mry = 0, msx = 0, msy = 0;
    for (const auto& p : pairs) {
        mrx += p.ref.x;
        mry += p.ref.y;
        msx += p.subj.x;
        msy += p.subj.y;
    }
    mrx /= n;
    mry /= n;
    msx /= n;
    msy /= n;

    double sxx = 0, sxy = 0, syy = 0;
    double bx0 = 0, bx1 = 0, by0 = 0, by1 = 0;
    for (const auto& p : pairs) {
        const double rx = p.ref.x - mrx;
        const double ry = p.ref.y - mry;
        const double ux = p.subj.x - msx;
        const double uy = p.subj.y - msy;
        sxx += rx * rx;
        sxy += rx * ry;
        syy += ry * ry;
        bx0 += rx * ux;
        bx1 += ry * ux;
        by0 += rx * uy;
        by1 += ry * uy;
    }

    const auto row_x = solve3({{{sxx, sxy, 0.0, bx0},
                                {sxy, syy, 0.0, bx1},
                                {0.0, 0.0, n, 0.0}}});
    const auto row_y = solve3({{{sxx, sxy, 0.0, by0},
                                {sxy, syy, 0.0, by1},
                                {0.0, 0.0, n, 0.0}}});

    AffineTransform2D t;
    t.a = row_x[0];
    t.b = row_x[1];
    t.d = row_y[0];
    t.e = row_y[1];
    t.c = msx - t.a * mrx - t.b * mry;
    t.f = msy - t.d * mrx - t.e * mry;

    if (std::fabs(t.det()) <= kSingularTol) {
        throw DataError("fitted transform is singular (|det| <= 1e-9)");
    }

    RegistrationResult result;
    result.transform = t;
    result.pair_count = static_cast<int>(pairs.size());
    result.rmse = registration_residual(t, pairs);
    return result;
}

Point2 apply_affine(const AffineTransform2D& t, Point2 p) {
    return {t.a * p.x + t.b * p.y + t.c, t.d * p.x + t.e * p.y + t.f};
}

double registration_residual(const AffineTransform2D& t,
                             const std::vector<ControlPointPair>& pairs) {
    if (pairs.empty()) throw ArgumentError("registration residual needs at least one pair");
    double sum_sq = 0.0;
    for (const auto& p : pairs) {
        const Point2 mapped = apply_affine(t, p.ref);
        const double dx = mapped.x - p.subj.x;
        const double dy = mapped.y - p.subj.y;
        sum_sq += dx * dx + dy * dy;
    }
    return std::sqrt(sum_sq / static_cast<double>(pairs.size()));
}

Image warp_to_reference(const Image& subject, const AffineTransform2D& t,
                        int ref_width, int ref_height, InterpKind kind) {
    if (std::fabs(t.det()) <= kSingularTol) {
        throw DataError("cannot warp with a singular transform");
    }
    if (ref_width < 1 || ref_height < 1) {
        throw ArgumentError("reference dimensions must be at least 1x1");
    }
    Image out(ref_width, ref_height);
    out.source_bit_depth = subject.source_bit_depth;
    for (int y = 0; y < ref_height; ++y) {
        for (int x = 0; x < ref_width; ++x) {
            const Point2 src = apply_affine(t, {static_cast<double>(x), static_cast<double>(y)});
            out.set(x, y, sample(subject, src.x, src.y, kind));
        }
    }
    return out;
}

std::vector<ControlPointPair> parse_landmarks_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("landmark file: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("landmark file: expected a JSON array");

    std::vector<ControlPointPair> pairs;
    pairs.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        const std::string where = "landmark file: entry " + std::to_string(i);
        if (!item.is_object() || !item.contains("ref") || !item.contains("subj")) {
            throw ParseError(where + ": expected {\"ref\": [x,y], \"subj\": [x,y]}");
        }
        const auto& ref = item["ref"];
        const auto& subj = item["subj"];
        if (!ref.is_array() || ref.size() != 2 || !subj.is_array() || subj.size() != 2) {
            throw ParseError(where + ": ref/subj must be [x,y] pairs");
        }
        ControlPointPair p;
        p.ref = {ref[0].get<double>(), ref[1].get<double>()};
        p.subj = {subj[0].get<double>(), subj[1].get<double>()};
        if (item.contains("label")) p.label = item["label"].get<std::string>();
        if (!std::isfinite(p.ref.x) || !std::isfinite(p.ref.y) ||
            !std::isfinite(p.subj.x) || !std::isfinite(p.subj.y)) {
            throw ParseError(where + ": coordinates must be finite");
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::vector<ControlPointPair> load_landmarks_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open landmark file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_landmarks_json(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace atroscreen
