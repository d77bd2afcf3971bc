#ifndef ATROSCREEN_PIPELINE_HPP
#define ATROSCREEN_PIPELINE_HPP

#include "atroscreen/image.hpp"
#include "atroscreen/report.hpp"
#include "atroscreen/segmentation.hpp"

#include <optional>
#include <string>
#include <utility>

namespace atroscreen {

/**
 * @brief Full configuration of a screening run.
 *
 * The `run` subcommand executes the stages in order: resize both images to
 * the canonical size, estimate the affine from landmarks, warp the target
 * into reference space, compare foreground sizes, build the ROI, segment,
 * count, analyze against the baseline, and render the reports. Every stage
 * reads and writes files in the output directory, so `run` is exactly the
 * composition of the stage subcommands.
 */
struct PipelineConfig {
    std::string target_path;
    std::string reference_path;
    std::string landmarks_path;
    std::string roi_path;
    std::string baseline_path;
    std::string output_path; // directory; reports and intermediates land here

    std::string subject_id = "anonymous";
    double subject_age = 0.0;

    InterpKind interp = InterpKind::Bilinear;
    SegMethod seg_method = SegMethod::Otsu;
    FcmParams fcm;
    std::optional<double> fixed_threshold;
    double foreground_threshold = 0.05;
    double rmse_warn = 3.0;
    std::optional<std::pair<int, int>> canonical_size;
    bool fixed_timestamp = false;
};

/// Per-stage artifacts, shared between `run` and the stage subcommands so
/// the two routes are byte-identical. Images cross stage boundaries as
/// 16-bit PGM files; scalar results cross as full-precision JSON.
namespace stage {

struct RegistrationFileData {
    AffineTransform2D transform;
    double rmse = 0.0;
    int pair_count = 0;
    InterpKind interp = InterpKind::Bilinear;
    int reference_width = 0;
    int reference_height = 0;
};

struct SegmentationFileData {
    SegMethod method = SegMethod::Otsu;
    std::optional<double> threshold_used;
    int histogram_bins = 256;
    std::optional<FcmParams> fcm;
    std::optional<int> fcm_iterations;
    std::optional<double> fcm_objective;
    std::vector<double> fcm_centers;
};

struct MeasureFileData {
    double foreground_threshold = 0.05;
    int image_width = 0;
    int image_height = 0;
    SizeComparison size_comparison;
    RoiSpec roi;
    std::int64_t roi_area = 0;
    PixelCounts counts;
};

// resize: load, resample, store as 16-bit PGM
void run_resize(const std::string& input_path, const std::string& output_path,
                int new_width, int new_height, InterpKind kind);

// register: fit landmarks, warp subject into reference space
RegistrationFileData run_register(const std::string& subject_path,
                                  const std::string& reference_path,
                                  const std::string& landmarks_path,
                                  InterpKind kind,
                                  const std::string& warped_out,
                                  const std::string& summary_out);

// segment: threshold or FCM-classify, mask written as 0/255 PGM
// (cavity = 255)
SegmentationFileData run_segment(const std::string& input_path,
                                 SegMethod method,
                                 std::optional<double> fixed_threshold,
                                 const FcmParams& fcm,
                                 const std::string& mask_out,
                                 const std::string& summary_out);

// measure: size comparison, ROI rasterization, black/white counting
MeasureFileData run_measure(const std::string& warped_path,
                            const std::string& reference_path,
                            const std::string& mask_path,
                            const std::string& roi_path,
                            double foreground_threshold,
                            bool emit_coords,
                            const std::string& out_path);

// analyze: metrics, z-scores, severity, report rendering
ScreeningReport run_analyze(const std::string& measures_path,
                            const std::string& registration_path,
                            const std::string& segmentation_path,
                            const std::string& baseline_path,
                            const std::string& subject_id,
                            double subject_age,
                            double rmse_warn,
                            bool fixed_timestamp,
                            const std::string& out_dir);

RegistrationFileData read_registration_json(const std::string& path);
SegmentationFileData read_segmentation_json(const std::string& path);
MeasureFileData read_measure_json(const std::string& path);

} // namespace stage

/// Execute the whole pipeline. Throws on stage errors; the CLI maps those
/// to exit status 1 with the stage name on the diagnostic stream.
ScreeningReport run_pipeline(const PipelineConfig& cfg);

} // namespace atroscreen

#endif
