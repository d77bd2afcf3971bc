#include "atroscreen/report.hpp"
#include "atroscreen/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace atroscreen {

namespace {

const char* kDisclaimer =
    "Research screening output only. This is not a medical device and the "
    "severity band is not a diagnosis; interpretation requires a qualified "
    "clinician.";

std::string utc_now_iso8601() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string upper_severity(SeverityBand band) {
    switch (band) {
        case SeverityBand::WithinRange: return "WITHIN RANGE";
        case SeverityBand::Borderline: return "BORDERLINE";
        case SeverityBand::Elevated: return "ELEVATED";
        case SeverityBand::Severe: return "SEVERE";
    }
    return "WITHIN RANGE";
}

nlohmann::ordered_json box_json(const BoundingBox& b) {
    return nlohmann::ordered_json::array({b.x0, b.y0, b.x1, b.y1});
}

nlohmann::ordered_json roi_json(const RoiSpec& spec, std::int64_t area) {
    nlohmann::ordered_json j;
    switch (spec.kind) {
        case RoiSpec::Kind::Rect:
            j["shape"] = "rect";
            j["x0"] = quantize6(spec.x0);
            j["y0"] = quantize6(spec.y0);
            j["x1"] = quantize6(spec.x1);
            j["y1"] = quantize6(spec.y1);
            break;
        case RoiSpec::Kind::Ellipse:
            j["shape"] = "ellipse";
            j["cx"] = quantize6(spec.cx);
            j["cy"] = quantize6(spec.cy);
            j["rx"] = quantize6(spec.rx);
            j["ry"] = quantize6(spec.ry);
            break;
        case RoiSpec::Kind::Full:
            j["shape"] = "full";
            break;
    }
    j["area_px"] = area;
    return j;
}

} // namespace

double quantize6(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(format_g6(v).c_str(), nullptr);
}

ScreeningReport build_report(const ReportInputs& in) {
    if (!in.registration) throw ArgumentError("report assembly: registration result missing");
    if (!in.segmentation) throw ArgumentError("report assembly: segmentation summary missing");
    if (!in.roi) throw ArgumentError("report assembly: ROI missing");
    if (!in.size_comparison) throw ArgumentError("report assembly: size comparison missing");
    if (!in.counts) throw ArgumentError("report assembly: pixel counts missing");
    if (!in.baseline) throw ArgumentError("report assembly: normative baseline missing");
    if (in.subject_id.empty()) throw ArgumentError("report assembly: subject id missing");

    ScreeningReport r;
    r.subject_id = in.subject_id;
    r.subject_age = in.subject_age;
    r.timestamp_utc = in.fixed_timestamp ? "1970-01-01T00:00:00Z" : utc_now_iso8601();
    r.interp = in.interp;
    r.foreground_threshold = in.foreground_threshold;
    r.canonical_width = in.canonical_width;
    r.canonical_height = in.canonical_height;
    r.registration = *in.registration;
    r.registration.high_rmse = in.registration->rmse > in.registration->rmse_warn_threshold;
    r.segmentation = *in.segmentation;
    r.roi = *in.roi;
    r.roi_area = in.roi_area;
    r.size_comparison = *in.size_comparison;
    r.metrics = compute_metrics(*in.counts, *in.size_comparison);
    r.baseline_rows_used = {*in.baseline};

    const double z = z_score(r.metrics.cavity_ratio, *in.baseline);
    r.z_scores["cavity_ratio"] = z;
    r.severity = classify_severity(z); // always recomputed here

    if (r.registration.high_rmse) {
        std::ostringstream os;
        os << "registration rmse " << format_g6(r.registration.rmse)
           << " px exceeds the warning threshold "
           << format_g6(r.registration.rmse_warn_threshold)
           << " px; landmarks may be misidentified";
        r.warnings.push_back(os.str());
    }
    if (z <= -2.0) {
        // abnormally low is a data-quality signal, not a severity escalation
        std::ostringstream os;
        os << "cavity_ratio is unusually low against the baseline (z = " << format_g6(z)
           << "); check acquisition and segmentation quality";
        r.warnings.push_back(os.str());
    }

    r.disclaimer = kDisclaimer;
    return r;
}

std::string render_json(const ScreeningReport& r) {
    nlohmann::ordered_json j;
    j["subject_id"] = r.subject_id;
    j["subject_age"] = quantize6(r.subject_age);
    j["timestamp"] = r.timestamp_utc;

    nlohmann::ordered_json params;
    params["interpolation"] = to_string(r.interp);
    params["segmentation_method"] = to_string(r.segmentation.method);
    params["histogram_bins"] = r.segmentation.histogram_bins;
    if (r.segmentation.method == SegMethod::FixedThreshold && r.segmentation.threshold_used) {
        params["fixed_threshold"] = quantize6(*r.segmentation.threshold_used);
    } else {
        params["fixed_threshold"] = nullptr;
    }
    if (r.segmentation.fcm) {
        nlohmann::ordered_json f;
        f["clusters"] = r.segmentation.fcm->clusters;
        f["fuzzifier"] = quantize6(r.segmentation.fcm->fuzzifier);
        f["tol"] = quantize6(r.segmentation.fcm->tol);
        f["max_iter"] = r.segmentation.fcm->max_iter;
        f["spatial_window"] = r.segmentation.fcm->spatial_window;
        f["seed"] = r.segmentation.fcm->seed;
        params["fcm"] = f;
    } else {
        params["fcm"] = nullptr;
    }
    params["foreground_threshold"] = quantize6(r.foreground_threshold);
    params["rmse_warn_px"] = quantize6(r.registration.rmse_warn_threshold);
    params["canonical_width"] = r.canonical_width;
    params["canonical_height"] = r.canonical_height;
    j["parameters"] = params;

    nlohmann::ordered_json reg;
    reg["pair_count"] = r.registration.pair_count;
    reg["rmse_px"] = quantize6(r.registration.rmse);
    reg["high_rmse"] = r.registration.high_rmse;
    reg["transform"] = nlohmann::ordered_json::array(
        {quantize6(r.registration.transform.a), quantize6(r.registration.transform.b),
         quantize6(r.registration.transform.c), quantize6(r.registration.transform.d),
         quantize6(r.registration.transform.e), quantize6(r.registration.transform.f)});
    j["registration"] = reg;

    nlohmann::ordered_json sizes;
    sizes["target_area"] = r.size_comparison.target_area;
    sizes["reference_area"] = r.size_comparison.reference_area;
    sizes["area_ratio"] = quantize6(r.size_comparison.area_ratio);
    sizes["target_extent"] = box_json(r.size_comparison.target_extent);
    sizes["reference_extent"] = box_json(r.size_comparison.reference_extent);
    j["size_comparison"] = sizes;

    j["roi"] = roi_json(r.roi, r.roi_area);

    nlohmann::ordered_json seg;
    seg["method"] = to_string(r.segmentation.method);
    if (r.segmentation.threshold_used) {
        seg["threshold_used"] = quantize6(*r.segmentation.threshold_used);
    } else {
        seg["threshold_used"] = nullptr;
    }
    if (r.segmentation.fcm) {
        seg["fcm_iterations"] = r.segmentation.fcm_iterations ? nlohmann::ordered_json(*r.segmentation.fcm_iterations)
                                                              : nlohmann::ordered_json(nullptr);
        seg["fcm_objective"] = r.segmentation.fcm_objective
                                   ? nlohmann::ordered_json(quantize6(*r.segmentation.fcm_objective))
                                   : nlohmann::ordered_json(nullptr);
        nlohmann::ordered_json centers = nlohmann::ordered_json::array();
        for (double c : r.segmentation.fcm_centers) centers.push_back(quantize6(c));
        seg["fcm_centers"] = centers;
    }
    j["segmentation"] = seg;

    nlohmann::ordered_json metrics;
    metrics["cavity_ratio"] = quantize6(r.metrics.cavity_ratio);
    metrics["black_count"] = r.metrics.black_count;
    metrics["white_count"] = r.metrics.white_count;
    metrics["roi_area"] = r.metrics.roi_area;
    metrics["area_ratio"] = quantize6(r.metrics.area_ratio);
    j["metrics"] = metrics;

    nlohmann::ordered_json baselines = nlohmann::ordered_json::array();
    for (const auto& b : r.baseline_rows_used) {
        nlohmann::ordered_json row;
        row["age_min"] = quantize6(b.age_min);
        row["age_max"] = quantize6(b.age_max);
        row["metric"] = b.metric;
        row["mean"] = quantize6(b.mean);
        row["sd"] = quantize6(b.sd);
        row["n"] = b.n;
        baselines.push_back(row);
    }
    j["baseline_rows_used"] = baselines;

    nlohmann::ordered_json zs;
    for (const auto& [name, value] : r.z_scores) zs[name] = quantize6(value);
    j["z_scores"] = zs;

    j["severity"] = to_string(r.severity);
    j["warnings"] = r.warnings; // always present, [] when empty
    j["disclaimer"] = r.disclaimer;

    return j.dump(2) + "\n";
}

std::string render_text(const ScreeningReport& r) {
    std::ostringstream os;
    os << "ATROPHY SCREENING REPORT\n";
    os << "subject: " << r.subject_id << "  age: " << format_g6(r.subject_age)
       << "  generated: " << r.timestamp_utc << "\n";
    os << "\n";
    os << "metric             value\n";
    os << "cavity_ratio       " << format_g6(r.metrics.cavity_ratio) << "\n";
    os << "black_count        " << r.metrics.black_count << "\n";
    os << "white_count        " << r.metrics.white_count << "\n";
    os << "roi_area           " << r.metrics.roi_area << "\n";
    os << "area_ratio         " << format_g6(r.metrics.area_ratio) << "\n";
    for (const auto& [name, value] : r.z_scores) {
        os << "z(" << name << ")    " << format_g6(value) << "\n";
    }
    os << "\n";
    os << "severity: " << upper_severity(r.severity) << "\n";
    os << "registration: " << r.registration.pair_count << " landmark pairs, rmse "
       << format_g6(r.registration.rmse) << " px\n";
    os << "segmentation: " << to_string(r.segmentation.method);
    if (r.segmentation.threshold_used) {
        os << ", threshold " << format_g6(*r.segmentation.threshold_used);
    }
    os << "\n";
    os << "roi: " << r.roi.describe() << " (" << r.roi_area << " px)\n";
    for (const auto& b : r.baseline_rows_used) {
        os << "baseline: " << b.metric << " ages " << format_g6(b.age_min) << "-"
           << format_g6(b.age_max) << " mean " << format_g6(b.mean) << " sd "
           << format_g6(b.sd) << " n " << b.n << "\n";
    }
    if (r.warnings.empty()) {
        os << "warnings: none\n";
    } else {
        os << "warnings:\n";
        for (const auto& w : r.warnings) os << "  - " << w << "\n";
    }
    os << "\n";
    os << r.disclaimer << "\n";
    return os.str();
}

} // namespace atroscreen
