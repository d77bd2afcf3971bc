// atroscreen: batch screening of 2D brain-MRI slices for atrophy indicators.
// Subcommands expose the pipeline stages individually; `run` chains them.

#include "atroscreen/analysis.hpp"
#include "atroscreen/errors.hpp"
#include "atroscreen/phantom.hpp"
#include "atroscreen/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using atroscreen::ArgumentError;
using atroscreen::Error;
using atroscreen::InterpKind;
using atroscreen::ParseError;
using atroscreen::PipelineConfig;
using atroscreen::SegMethod;

constexpr int kExitOk = 0;
constexpr int kExitStageError = 1;
constexpr int kExitUsage = 2;

InterpKind parse_interp(const std::string& s) { return atroscreen::interp_kind_from_string(s); }

void apply_config_file(const std::string& path, PipelineConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    const auto str = [&](const char* key, std::string& out) {
        if (j.contains(key)) out = j[key].get<std::string>();
    };
    str("target", cfg.target_path);
    str("reference", cfg.reference_path);
    str("landmarks", cfg.landmarks_path);
    str("roi", cfg.roi_path);
    str("baseline", cfg.baseline_path);
    str("output", cfg.output_path);
    str("subject_id", cfg.subject_id);
    if (j.contains("subject_age")) cfg.subject_age = j["subject_age"].get<double>();
    if (j.contains("interp")) cfg.interp = parse_interp(j["interp"].get<std::string>());
    if (j.contains("seg_method")) {
        cfg.seg_method = atroscreen::seg_method_from_string(j["seg_method"].get<std::string>());
    }
    if (j.contains("fcm_clusters")) cfg.fcm.clusters = j["fcm_clusters"].get<int>();
    if (j.contains("fcm_fuzzifier")) cfg.fcm.fuzzifier = j["fcm_fuzzifier"].get<double>();
    if (j.contains("fcm_tol")) cfg.fcm.tol = j["fcm_tol"].get<double>();
    if (j.contains("fcm_max_iter")) cfg.fcm.max_iter = j["fcm_max_iter"].get<int>();
    if (j.contains("fcm_spatial_window")) {
        cfg.fcm.spatial_window = j["fcm_spatial_window"].get<int>();
    }
    if (j.contains("fcm_seed")) cfg.fcm.seed = j["fcm_seed"].get<std::uint64_t>();
    if (j.contains("fixed_threshold")) cfg.fixed_threshold = j["fixed_threshold"].get<double>();
    if (j.contains("foreground_threshold")) {
        cfg.foreground_threshold = j["foreground_threshold"].get<double>();
    }
    if (j.contains("rmse_warn")) cfg.rmse_warn = j["rmse_warn"].get<double>();
    if (j.contains("canonical_size")) {
        const auto& cs = j["canonical_size"];
        cfg.canonical_size = std::make_pair(cs.at(0).get<int>(), cs.at(1).get<int>());
    }
    if (j.contains("fixed_timestamp")) cfg.fixed_timestamp = j["fixed_timestamp"].get<bool>();
}

int cmd_run(const PipelineConfig& cfg) {
    const auto report = atroscreen::run_pipeline(cfg);
    namespace fs = std::filesystem;
    std::cout << (fs::path(cfg.output_path) / "report.json").string() << "\n";
    std::cout << (fs::path(cfg.output_path) / "report.txt").string() << "\n";
    std::cerr << "severity: " << atroscreen::to_string(report.severity) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"atroscreen: screen 2D brain-MRI slices for atrophy indicators"};
    app.require_subcommand(1);

    // ---- run ----------------------------------------------------------
    PipelineConfig cfg;
    std::string config_path;
    std::vector<int> canonical;
    std::string interp_name;
    std::string seg_method_name;
    double fixed_threshold_flag = -1.0;

    // A config file provides defaults; explicit flags override it. The file
    // is applied before CLI11 writes parsed values into cfg.
    for (int i = 1; i < argc - 1; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    if (!config_path.empty()) {
        try {
            apply_config_file(config_path, cfg);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
    }

    auto* run = app.add_subcommand("run", "execute the full screening pipeline");
    run->add_option("--config", config_path, "JSON config mirroring the flags");
    run->add_option("--target", cfg.target_path, "target (subject) PGM slice");
    run->add_option("--reference", cfg.reference_path, "age-matched reference PGM slice");
    run->add_option("--landmarks", cfg.landmarks_path, "landmark pair JSON file");
    run->add_option("--roi", cfg.roi_path, "ROI spec JSON file");
    run->add_option("--baseline", cfg.baseline_path, "normative baseline CSV");
    run->add_option("--output", cfg.output_path, "output directory");
    run->add_option("--subject-id", cfg.subject_id, "subject identifier");
    run->add_option("--subject-age", cfg.subject_age, "subject age in years");
    run->add_option("--interp", interp_name, "nearest|bilinear|bicubic");
    run->add_option("--seg-method", seg_method_name, "otsu|fcm");
    run->add_option("--fcm-clusters", cfg.fcm.clusters, "FCM cluster count");
    run->add_option("--fcm-fuzzifier", cfg.fcm.fuzzifier, "FCM fuzzifier m > 1");
    run->add_option("--fcm-tol", cfg.fcm.tol, "FCM convergence tolerance");
    run->add_option("--fcm-max-iter", cfg.fcm.max_iter, "FCM iteration cap");
    run->add_option("--fcm-spatial-window", cfg.fcm.spatial_window,
                    "spatial pass half-width (0 disables)");
    run->add_option("--fcm-seed", cfg.fcm.seed, "FCM seed (reserved)");
    run->add_option("--fixed-threshold", fixed_threshold_flag,
                    "bypass Otsu with a fixed threshold in [0,1]");
    run->add_option("--foreground-threshold", cfg.foreground_threshold,
                    "head/background intensity split");
    run->add_option("--rmse-warn", cfg.rmse_warn, "registration rmse warning level, px");
    run->add_option("--canonical-size", canonical, "canonical width height")
        ->expected(2);
    run->add_flag("--fixed-timestamp", cfg.fixed_timestamp,
                  "write the epoch timestamp for reproducible reports");

    // ---- resize -------------------------------------------------------
    std::string in_path, out_path, out2_path;
    int width = 0, height = 0;
    auto* resize_cmd = app.add_subcommand("resize", "resample a PGM slice");
    resize_cmd->add_option("--input", in_path)->required();
    resize_cmd->add_option("--output", out_path)->required();
    resize_cmd->add_option("--width", width)->required();
    resize_cmd->add_option("--height", height)->required();
    resize_cmd->add_option("--interp", interp_name, "nearest|bilinear|bicubic");

    // ---- register -----------------------------------------------------
    std::string ref_path, landmarks_path, summary_path;
    auto* register_cmd =
        app.add_subcommand("register", "fit landmarks and warp the subject");
    register_cmd->add_option("--subject", in_path)->required();
    register_cmd->add_option("--reference", ref_path)->required();
    register_cmd->add_option("--landmarks", landmarks_path)->required();
    register_cmd->add_option("--warped-out", out_path)->required();
    register_cmd->add_option("--summary-out", summary_path)->required();
    register_cmd->add_option("--interp", interp_name, "nearest|bilinear|bicubic");

    // ---- segment ------------------------------------------------------
    auto* segment_cmd = app.add_subcommand("segment", "classify cavity vs tissue");
    segment_cmd->add_option("--input", in_path)->required();
    segment_cmd->add_option("--mask-out", out_path)->required();
    segment_cmd->add_option("--summary-out", summary_path)->required();
    segment_cmd->add_option("--method", seg_method_name, "otsu|fcm");
    segment_cmd->add_option("--fixed-threshold", fixed_threshold_flag,
                            "bypass Otsu with a fixed threshold");
    segment_cmd->add_option("--fcm-clusters", cfg.fcm.clusters);
    segment_cmd->add_option("--fcm-fuzzifier", cfg.fcm.fuzzifier);
    segment_cmd->add_option("--fcm-tol", cfg.fcm.tol);
    segment_cmd->add_option("--fcm-max-iter", cfg.fcm.max_iter);
    segment_cmd->add_option("--fcm-spatial-window", cfg.fcm.spatial_window);
    segment_cmd->add_option("--fcm-seed", cfg.fcm.seed);

    // ---- measure ------------------------------------------------------
    std::string mask_path, roi_path;
    bool emit_coords = false;
    auto* measure_cmd =
        app.add_subcommand("measure", "size comparison, ROI and pixel counts");
    measure_cmd->add_option("--image", in_path, "warped target image")->required();
    measure_cmd->add_option("--reference", ref_path)->required();
    measure_cmd->add_option("--mask", mask_path)->required();
    measure_cmd->add_option("--roi", roi_path)->required();
    measure_cmd->add_option("--out", out_path)->required();
    measure_cmd->add_option("--foreground-threshold", cfg.foreground_threshold);
    measure_cmd->add_flag("--emit-coords", emit_coords, "include coordinate arrays");

    // ---- analyze ------------------------------------------------------
    std::string measures_path, reg_json_path, seg_json_path, baseline_path;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "z-scores, severity and report rendering");
    analyze_cmd->add_option("--measures", measures_path)->required();
    analyze_cmd->add_option("--registration", reg_json_path)->required();
    analyze_cmd->add_option("--segmentation", seg_json_path)->required();
    analyze_cmd->add_option("--baseline", baseline_path)->required();
    analyze_cmd->add_option("--subject-id", cfg.subject_id);
    analyze_cmd->add_option("--subject-age", cfg.subject_age);
    analyze_cmd->add_option("--rmse-warn", cfg.rmse_warn);
    analyze_cmd->add_option("--out-dir", out2_path)->required();
    analyze_cmd->add_flag("--fixed-timestamp", cfg.fixed_timestamp);

    // ---- phantom ------------------------------------------------------
    atroscreen::PhantomSpec phantom_spec;
    std::string phantom_dir;
    auto* phantom_cmd =
        app.add_subcommand("phantom", "generate a synthetic test slice");
    phantom_cmd->add_option("--out-dir", phantom_dir)->required();
    phantom_cmd->add_option("--width", phantom_spec.width);
    phantom_cmd->add_option("--height", phantom_spec.height);
    phantom_cmd->add_option("--head-radius", phantom_spec.head_radius);
    phantom_cmd->add_option("--ventricle-radius", phantom_spec.ventricle_radius);
    phantom_cmd->add_option("--ventricle-dx", phantom_spec.ventricle_dx);
    phantom_cmd->add_option("--ventricle-dy", phantom_spec.ventricle_dy);
    phantom_cmd->add_option("--tissue", phantom_spec.tissue_intensity);
    phantom_cmd->add_option("--cavity", phantom_spec.cavity_intensity);
    phantom_cmd->add_option("--background", phantom_spec.background_intensity);
    phantom_cmd->add_option("--noise-sd", phantom_spec.noise_sd);
    phantom_cmd->add_option("--seed", phantom_spec.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (!interp_name.empty()) cfg.interp = parse_interp(interp_name);
        if (!seg_method_name.empty()) {
            cfg.seg_method = atroscreen::seg_method_from_string(seg_method_name);
        }
        if (fixed_threshold_flag >= 0.0) cfg.fixed_threshold = fixed_threshold_flag;
        if (canonical.size() == 2) {
            cfg.canonical_size = std::make_pair(canonical[0], canonical[1]);
        }

        if (run->parsed()) return cmd_run(cfg);

        if (resize_cmd->parsed()) {
            atroscreen::stage::run_resize(in_path, out_path, width, height, cfg.interp);
            std::cout << out_path << "\n";
            return kExitOk;
        }
        if (register_cmd->parsed()) {
            const auto data = atroscreen::stage::run_register(
                in_path, ref_path, landmarks_path, cfg.interp, out_path, summary_path);
            std::cerr << "registration rmse: " << data.rmse << " px over "
                      << data.pair_count << " pairs\n";
            std::cout << out_path << "\n" << summary_path << "\n";
            return kExitOk;
        }
        if (segment_cmd->parsed()) {
            const auto data = atroscreen::stage::run_segment(
                in_path, cfg.seg_method, cfg.fixed_threshold, cfg.fcm, out_path,
                summary_path);
            if (data.threshold_used) {
                std::cout << "threshold: " << *data.threshold_used << "\n";
            }
            std::cout << out_path << "\n" << summary_path << "\n";
            return kExitOk;
        }
        if (measure_cmd->parsed()) {
            const auto data = atroscreen::stage::run_measure(
                in_path, ref_path, mask_path, roi_path, cfg.foreground_threshold,
                emit_coords, out_path);
            std::cerr << "black " << data.counts.black_count << ", white "
                      << data.counts.white_count << " of " << data.counts.roi_area
                      << " ROI px\n";
            std::cout << out_path << "\n";
            return kExitOk;
        }
        if (analyze_cmd->parsed()) {
            const auto report = atroscreen::stage::run_analyze(
                measures_path, reg_json_path, seg_json_path, baseline_path,
                cfg.subject_id, cfg.subject_age, cfg.rmse_warn, cfg.fixed_timestamp,
                out2_path);
            namespace fs = std::filesystem;
            std::cout << (fs::path(out2_path) / "report.json").string() << "\n";
            std::cout << (fs::path(out2_path) / "report.txt").string() << "\n";
            std::cerr << "severity: " << atroscreen::to_string(report.severity) << "\n";
            return kExitOk;
        }
        if (phantom_cmd->parsed()) {
            namespace fs = std::filesystem;
            fs::create_directories(phantom_dir);
            const auto out = atroscreen::generate_phantom(phantom_spec);
            save_pgm_file(out.image, 16, (fs::path(phantom_dir) / "phantom.pgm").string());
            atroscreen::Image truth(out.ground_truth.width, out.ground_truth.height);
            for (std::size_t i = 0; i < out.ground_truth.black.size(); ++i) {
                truth.intensities[i] = out.ground_truth.black[i] ? 1.0 : 0.0;
            }
            save_pgm_file(truth, 8, (fs::path(phantom_dir) / "ground_truth.pgm").string());
            std::ofstream lm((fs::path(phantom_dir) / "landmarks.json").string(),
                             std::ios::binary | std::ios::trunc);
            lm << atroscreen::landmarks_to_json(out.landmarks);
            std::cout << phantom_dir << "\n";
            return kExitOk;
        }
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageError;
    }
    return kExitUsage;
}
