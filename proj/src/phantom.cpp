#include "atroscreen/phantom.hpp"
#include "atroscreen/errors.hpp"
#include "atroscreen/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace atroscreen {

namespace {

void validate(const PhantomSpec& s) {
    if (s.width < 1 || s.height < 1) throw ArgumentError("phantom dimensions must be >= 1");
    if (!(s.head_radius > 0.0) || !(s.ventricle_radius > 0.0)) {
        throw ArgumentError("phantom radii must be positive");
    }
    const double offset = std::hypot(s.ventricle_dx, s.ventricle_dy);
    if (offset + s.ventricle_radius >= s.head_radius) {
        throw ArgumentError("ventricle disk must lie strictly inside the head disk");
    }
    if (!(s.cavity_intensity < s.tissue_intensity)) {
        throw ArgumentError("cavity intensity must be below tissue intensity");
    }
    for (double v : {s.tissue_intensity, s.cavity_intensity, s.background_intensity}) {
        if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("phantom intensities must lie in [0,1]");
    }
    if (s.noise_sd < 0.0) throw ArgumentError("noise sd must be >= 0");
}

} // namespace

PhantomOutput generate_phantom(const PhantomSpec& spec) {
    validate(spec);

    const double cx = (spec.width - 1) / 2.0;
    const double cy = (spec.height - 1) / 2.0;
    const double vx = cx + spec.ventricle_dx;
    const double vy = cy + spec.ventricle_dy;

    PhantomOutput out;
    out.image = Image(spec.width, spec.height);
    out.ground_truth.width = spec.width;
    out.ground_truth.height = spec.height;
    out.ground_truth.method = SegMethod::FixedThreshold;
    out.ground_truth.black.assign(out.image.pixel_count(), 0);

    GaussianSampler noise(spec.seed);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const double head_d = std::hypot(x - cx, y - cy);
            const double vent_d = std::hypot(x - vx, y - vy);
            double v = spec.background_intensity;
            if (head_d <= spec.head_radius) {
                v = vent_d <= spec.ventricle_radius ? spec.cavity_intensity
                                                    : spec.tissue_intensity;
            }
            if (vent_d <= spec.ventricle_radius) {
                out.ground_truth.black[static_cast<std::size_t>(y) * spec.width + x] = 1;
            }
            if (spec.noise_sd > 0.0) {
                v += spec.noise_sd * noise.next();
            }
            out.image.set(x, y, std::min(1.0, std::max(0.0, v)));
        }
    }

    // head-disk extrema, self-paired: exact under any shared resize
    const auto self_pair = [](double x, double y, const char* label) {
        ControlPointPair p;
        p.ref = {x, y};
        p.subj = {x, y};
        p.label = label;
        return p;
    };
    out.landmarks = {
        self_pair(cx, cy - spec.head_radius, "head_top"),
        self_pair(cx, cy + spec.head_radius, "head_bottom"),
        self_pair(cx - spec.head_radius, cy, "head_left"),
        self_pair(cx + spec.head_radius, cy, "head_right"),
    };
    return out;
}

std::string landmarks_to_json(const std::vector<ControlPointPair>& pairs) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : pairs) {
        nlohmann::ordered_json item;
        if (!p.label.empty()) item["label"] = p.label;
        item["ref"] = nlohmann::ordered_json::array({p.ref.x, p.ref.y});
        item["subj"] = nlohmann::ordered_json::array({p.subj.x, p.subj.y});
        arr.push_back(item);
    }
    return arr.dump(2) + "\n";
}

} // namespace atroscreen
