#include "atroscreen/pipeline.hpp"
#include "atroscreen/analysis.hpp"
#include "atroscreen/errors.hpp"
#include "atroscreen/measurement.hpp"
#include "atroscreen/registration.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace atroscreen {
namespace stage {

namespace {

using nlohmann::ordered_json;

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

ordered_json parse_json_file(const std::string& path) {
    try {
        return ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

ordered_json roi_spec_json(const RoiSpec& spec) {
    ordered_json j;
    switch (spec.kind) {
        case RoiSpec::Kind::Rect:
            j["shape"] = "rect";
            j["x0"] = spec.x0;
            j["y0"] = spec.y0;
            j["x1"] = spec.x1;
            j["y1"] = spec.y1;
            break;
        case RoiSpec::Kind::Ellipse:
            j["shape"] = "ellipse";
            j["cx"] = spec.cx;
            j["cy"] = spec.cy;
            j["rx"] = spec.rx;
            j["ry"] = spec.ry;
            break;
        case RoiSpec::Kind::Full:
            j["shape"] = "full";
            break;
    }
    return j;
}

RoiSpec roi_spec_from_json(const ordered_json& j) {
    const std::string shape = j.at("shape").get<std::string>();
    if (shape == "rect") {
        return RoiSpec::rect(j.at("x0").get<double>(), j.at("y0").get<double>(),
                             j.at("x1").get<double>(), j.at("y1").get<double>());
    }
    if (shape == "ellipse") {
        return RoiSpec::ellipse(j.at("cx").get<double>(), j.at("cy").get<double>(),
                                j.at("rx").get<double>(), j.at("ry").get<double>());
    }
    return RoiSpec::full();
}

} // namespace

void run_resize(const std::string& input_path, const std::string& output_path,
                int new_width, int new_height, InterpKind kind) {
    const Image img = load_pgm_file(input_path);
    const Image out = resize(img, new_width, new_height, kind);
    save_pgm_file(out, 16, output_path);
}

RegistrationFileData run_register(const std::string& subject_path,
                                  const std::string& reference_path,
                                  const std::string& landmarks_path,
                                  InterpKind kind,
                                  const std::string& warped_out,
                                  const std::string& summary_out) {
    const Image subject = load_pgm_file(subject_path);
    const Image reference = load_pgm_file(reference_path);
    const auto pairs = load_landmarks_file(landmarks_path);

    const RegistrationResult fit = estimate_affine(pairs);
    const Image warped =
        warp_to_reference(subject, fit.transform, reference.width, reference.height, kind);
    save_pgm_file(warped, 16, warped_out);

    RegistrationFileData data;
    data.transform = fit.transform;
    data.rmse = fit.rmse;
    data.pair_count = fit.pair_count;
    data.interp = kind;
    data.reference_width = reference.width;
    data.reference_height = reference.height;

    ordered_json j;
    j["transform"] = {fit.transform.a, fit.transform.b, fit.transform.c,
                      fit.transform.d, fit.transform.e, fit.transform.f};
    j["rmse_px"] = fit.rmse;
    j["pair_count"] = fit.pair_count;
    j["interpolation"] = to_string(kind);
    j["reference_width"] = reference.width;
    j["reference_height"] = reference.height;
    write_text_file(summary_out, j.dump(2) + "\n");
    return data;
}

RegistrationFileData read_registration_json(const std::string& path) {
    const ordered_json j = parse_json_file(path);
    RegistrationFileData d;
    try {
        const auto& t = j.at("transform");
        d.transform = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>(),
                       t.at(3).get<double>(), t.at(4).get<double>(), t.at(5).get<double>()};
        d.rmse = j.at("rmse_px").get<double>();
        d.pair_count = j.at("pair_count").get<int>();
        d.interp = interp_kind_from_string(j.at("interpolation").get<std::string>());
        d.reference_width = j.at("reference_width").get<int>();
        d.reference_height = j.at("reference_height").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return d;
}

SegmentationFileData run_segment(const std::string& input_path,
                                 SegMethod method,
                                 std::optional<double> fixed_threshold,
                                 const FcmParams& fcm,
                                 const std::string& mask_out,
                                 const std::string& summary_out) {
    const Image img = load_pgm_file(input_path);

    SegmentationFileData data;
    BinaryMap mask;
    if (method == SegMethod::Fcm) {
        const MembershipMap mm = fcm_segment(img, fcm);
        mask = memberships_to_binary(mm);
        data.method = SegMethod::Fcm;
        data.fcm = fcm;
        data.fcm_iterations = mm.iterations_run;
        data.fcm_objective = mm.final_objective;
        data.fcm_centers = mm.centers;
    } else if (fixed_threshold.has_value()) {
        mask = binarize(img, *fixed_threshold, SegMethod::FixedThreshold);
        data.method = SegMethod::FixedThreshold;
        data.threshold_used = *fixed_threshold;
    } else {
        const Histogram h = compute_histogram(img, data.histogram_bins);
        const double t = otsu_threshold(h);
        mask = binarize(img, t, SegMethod::Otsu);
        data.method = SegMethod::Otsu;
        data.threshold_used = t;
    }

    // cavity pixels stored as 255 so the mask reads as a foreground map
    Image mask_img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.black.size(); ++i) {
        mask_img.intensities[i] = mask.black[i] ? 1.0 : 0.0;
    }
    save_pgm_file(mask_img, 8, mask_out);

    ordered_json j;
    j["method"] = to_string(data.method);
    if (data.threshold_used) {
        j["threshold_used"] = *data.threshold_used;
    } else {
        j["threshold_used"] = nullptr;
    }
    j["histogram_bins"] = data.histogram_bins;
    if (data.fcm) {
        ordered_json f;
        f["clusters"] = data.fcm->clusters;
        f["fuzzifier"] = data.fcm->fuzzifier;
        f["tol"] = data.fcm->tol;
        f["max_iter"] = data.fcm->max_iter;
        f["spatial_window"] = data.fcm->spatial_window;
        f["seed"] = data.fcm->seed;
        f["iterations_run"] = *data.fcm_iterations;
        f["final_objective"] = *data.fcm_objective;
        f["centers"] = data.fcm_centers;
        j["fcm"] = f;
    } else {
        j["fcm"] = nullptr;
    }
    write_text_file(summary_out, j.dump(2) + "\n");
    return data;
}

SegmentationFileData read_segmentation_json(const std::string& path) {
    const ordered_json j = parse_json_file(path);
    SegmentationFileData d;
    try {
        d.method = seg_method_from_string(j.at("method").get<std::string>());
        if (!j.at("threshold_used").is_null()) {
            d.threshold_used = j.at("threshold_used").get<double>();
        }
        d.histogram_bins = j.at("histogram_bins").get<int>();
        if (!j.at("fcm").is_null()) {
            const auto& f = j.at("fcm");
            FcmParams p;
            p.clusters = f.at("clusters").get<int>();
            p.fuzzifier = f.at("fuzzifier").get<double>();
            p.tol = f.at("tol").get<double>();
            p.max_iter = f.at("max_iter").get<int>();
            p.spatial_window = f.at("spatial_window").get<int>();
            p.seed = f.at("seed").get<std::uint64_t>();
            d.fcm = p;
            d.fcm_iterations = f.at("iterations_run").get<int>();
            d.fcm_objective = f.at("final_objective").get<double>();
            d.fcm_centers = f.at("centers").get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return d;
}

MeasureFileData run_measure(const std::string& warped_path,
                            const std::string& reference_path,
                            const std::string& mask_path,
                            const std::string& roi_path,
                            double foreground_threshold,
                            bool emit_coords,
                            const std::string& out_path) {
    const Image warped = load_pgm_file(warped_path);
    const Image reference = load_pgm_file(reference_path);

    MeasureFileData data;
    data.foreground_threshold = foreground_threshold;
    data.image_width = warped.width;
    data.image_height = warped.height;

    // paper order inside the stage: size comparison, then ROI, then counting
    data.size_comparison = compare_sizes(warped, reference, foreground_threshold);

    data.roi = load_roi_file(roi_path);
    const RoiMask roi = make_roi(data.roi, warped.width, warped.height);
    data.roi_area = roi.area;

    const Image mask_img = load_pgm_file(mask_path);
    if (mask_img.width != warped.width || mask_img.height != warped.height) {
        throw ArgumentError("mask dimensions do not match the warped image");
    }
    BinaryMap mask;
    mask.width = mask_img.width;
    mask.height = mask_img.height;
    mask.black.resize(mask_img.pixel_count());
    for (std::size_t i = 0; i < mask_img.pixel_count(); ++i) {
        mask.black[i] = mask_img.intensities[i] > 0.5 ? 1 : 0;
    }

    data.counts = count_pixels(mask, roi, emit_coords);

    ordered_json j;
    j["foreground_threshold"] = foreground_threshold;
    j["image_width"] = data.image_width;
    j["image_height"] = data.image_height;
    {
        ordered_json s;
        s["target_area"] = data.size_comparison.target_area;
        s["reference_area"] = data.size_comparison.reference_area;
        s["area_ratio"] = data.size_comparison.area_ratio;
        const auto& tb = data.size_comparison.target_extent;
        const auto& rb = data.size_comparison.reference_extent;
        s["target_extent"] = {tb.x0, tb.y0, tb.x1, tb.y1};
        s["reference_extent"] = {rb.x0, rb.y0, rb.x1, rb.y1};
        j["size_comparison"] = s;
    }
    {
        ordered_json roi_j = roi_spec_json(data.roi);
        roi_j["area_px"] = data.roi_area;
        j["roi"] = roi_j;
    }
    {
        ordered_json c;
        c["black_count"] = data.counts.black_count;
        c["white_count"] = data.counts.white_count;
        c["roi_area"] = data.counts.roi_area;
        if (emit_coords) {
            ordered_json blacks = ordered_json::array();
            for (const auto& [x, y] : data.counts.black_coords) {
                blacks.push_back(ordered_json::array({x, y}));
            }
            ordered_json whites = ordered_json::array();
            for (const auto& [x, y] : data.counts.white_coords) {
                whites.push_back(ordered_json::array({x, y}));
            }
            c["black_coords"] = blacks;
            c["white_coords"] = whites;
        }
        j["counts"] = c;
    }
    write_text_file(out_path, j.dump(2) + "\n");
    return data;
}

MeasureFileData read_measure_json(const std::string& path) {
    const ordered_json j = parse_json_file(path);
    MeasureFileData d;
    try {
        d.foreground_threshold = j.at("foreground_threshold").get<double>();
        d.image_width = j.at("image_width").get<int>();
        d.image_height = j.at("image_height").get<int>();
        const auto& s = j.at("size_comparison");
        d.size_comparison.target_area = s.at("target_area").get<std::int64_t>();
        d.size_comparison.reference_area = s.at("reference_area").get<std::int64_t>();
        d.size_comparison.area_ratio = s.at("area_ratio").get<double>();
        const auto box = [](const ordered_json& a) {
            return BoundingBox{a.at(0).get<int>(), a.at(1).get<int>(),
                               a.at(2).get<int>(), a.at(3).get<int>()};
        };
        d.size_comparison.target_extent = box(s.at("target_extent"));
        d.size_comparison.reference_extent = box(s.at("reference_extent"));
        d.roi = roi_spec_from_json(j.at("roi"));
        d.roi_area = j.at("roi").at("area_px").get<std::int64_t>();
        const auto& c = j.at("counts");
        d.counts.black_count = c.at("black_count").get<std::int64_t>();
        d.counts.white_count = c.at("white_count").get<std::int64_t>();
        d.counts.roi_area = c.at("roi_area").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return d;
}

ScreeningReport run_analyze(const std::string& measures_path,
                            const std::string& registration_path,
                            const std::string& segmentation_path,
                            const std::string& baseline_path,
                            const std::string& subject_id,
                            double subject_age,
                            double rmse_warn,
                            bool fixed_timestamp,
                            const std::string& out_dir) {
    const MeasureFileData measures = read_measure_json(measures_path);
    const RegistrationFileData reg = read_registration_json(registration_path);
    const SegmentationFileData seg = read_segmentation_json(segmentation_path);
    const auto baseline_rows = load_baseline_file(baseline_path);
    const NormativeBaseline baseline =
        select_baseline(baseline_rows, subject_age, "cavity_ratio");

    ReportInputs in;
    in.subject_id = subject_id;
    in.subject_age = subject_age;
    in.interp = reg.interp;
    in.foreground_threshold = measures.foreground_threshold;
    in.canonical_width = measures.image_width;
    in.canonical_height = measures.image_height;

    RegistrationSummary reg_summary;
    reg_summary.transform = reg.transform;
    reg_summary.rmse = reg.rmse;
    reg_summary.pair_count = reg.pair_count;
    reg_summary.rmse_warn_threshold = rmse_warn;
    in.registration = reg_summary;

    SegmentationSummary seg_summary;
    seg_summary.method = seg.method;
    seg_summary.threshold_used = seg.threshold_used;
    seg_summary.histogram_bins = seg.histogram_bins;
    seg_summary.fcm = seg.fcm;
    seg_summary.fcm_iterations = seg.fcm_iterations;
    seg_summary.fcm_objective = seg.fcm_objective;
    seg_summary.fcm_centers = seg.fcm_centers;
    in.segmentation = seg_summary;

    in.roi = measures.roi;
    in.roi_area = measures.roi_area;
    in.size_comparison = measures.size_comparison;
    in.counts = measures.counts;
    in.baseline = baseline;
    in.fixed_timestamp = fixed_timestamp;

    const ScreeningReport report = build_report(in);
    std::filesystem::create_directories(out_dir);
    write_text_file((std::filesystem::path(out_dir) / "report.json").string(),
                    render_json(report));
    write_text_file((std::filesystem::path(out_dir) / "report.txt").string(),
                    render_text(report));
    return report;
}

} // namespace stage

namespace {

// Attach the failing stage's name so the CLI can report it.
template <typename F>
auto at_stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(std::string("stage ") + name + ": " + e.what());
    }
}

} // namespace

ScreeningReport run_pipeline(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    const std::pair<const char*, const std::string*> required[] = {
        {"target", &cfg.target_path},       {"reference", &cfg.reference_path},
        {"landmarks", &cfg.landmarks_path}, {"roi", &cfg.roi_path},
        {"baseline", &cfg.baseline_path},   {"output", &cfg.output_path}};
    for (const auto& [name, value] : required) {
        if (value->empty()) {
            throw ArgumentError(std::string("pipeline config: ") + name + " path is empty");
        }
    }
    fs::create_directories(cfg.output_path);
    const fs::path out(cfg.output_path);

    // canonical frame defaults to the reference dimensions
    int canon_w = 0, canon_h = 0;
    at_stage("resize", [&] {
        if (cfg.canonical_size) {
            canon_w = cfg.canonical_size->first;
            canon_h = cfg.canonical_size->second;
            if (canon_w < 1 || canon_h < 1) {
                throw ArgumentError("canonical size must be at least 1x1");
            }
        } else {
            const Image reference = load_pgm_file(cfg.reference_path);
            canon_w = reference.width;
            canon_h = reference.height;
        }
        return 0;
    });

    const std::string ref_resized = (out / "reference_resized.pgm").string();
    const std::string target_resized = (out / "target_resized.pgm").string();
    const std::string warped = (out / "target_warped.pgm").string();
    const std::string reg_json = (out / "registration.json").string();
    const std::string mask = (out / "mask.pgm").string();
    const std::string seg_json = (out / "segmentation.json").string();
    const std::string measures_json = (out / "measures.json").string();

    // Stages communicate through files so a run is exactly the composition
    // of the stage subcommands and every intermediate stays inspectable.
    at_stage("resize", [&] {
        stage::run_resize(cfg.reference_path, ref_resized, canon_w, canon_h, cfg.interp);
        stage::run_resize(cfg.target_path, target_resized, canon_w, canon_h, cfg.interp);
        return 0;
    });
    at_stage("register", [&] {
        return stage::run_register(target_resized, ref_resized, cfg.landmarks_path,
                                   cfg.interp, warped, reg_json);
    });
    at_stage("segment", [&] {
        return stage::run_segment(warped, cfg.seg_method, cfg.fixed_threshold, cfg.fcm,
                                  mask, seg_json);
    });
    at_stage("measure", [&] {
        return stage::run_measure(warped, ref_resized, mask, cfg.roi_path,
                                  cfg.foreground_threshold, false, measures_json);
    });
    return at_stage("analyze", [&] {
        return stage::run_analyze(measures_json, reg_json, seg_json, cfg.baseline_path,
                                  cfg.subject_id, cfg.subject_age, cfg.rmse_warn,
                                  cfg.fixed_timestamp, cfg.output_path);
    });
}

} // namespace atroscreen
