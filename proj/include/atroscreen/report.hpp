#ifndef ATROSCREEN_REPORT_HPP
#define ATROSCREEN_REPORT_HPP

#include "atroscreen/analysis.hpp"
#include "atroscreen/measurement.hpp"
#include "atroscreen/registration.hpp"
#include "atroscreen/segmentation.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace atroscreen {

struct RegistrationSummary {
    AffineTransform2D transform;
    double rmse = 0.0;
    int pair_count = 0;
    double rmse_warn_threshold = 3.0;
    bool high_rmse = false;
};

struct SegmentationSummary {
    SegMethod method = SegMethod::Otsu;
    std::optional<double> threshold_used;
    int histogram_bins = 256;
    std::optional<FcmParams> fcm;        // present when method == Fcm
    std::optional<int> fcm_iterations;
    std::optional<double> fcm_objective;
    std::vector<double> fcm_centers;
};

/// Everything the report assembler needs. Each artifact is optional so the
/// assembler can reject incomplete pipelines explicitly.
struct ReportInputs {
    std::string subject_id;
    double subject_age = 0.0;
    InterpKind interp = InterpKind::Bilinear;
    double foreground_threshold = 0.05;
    int canonical_width = 0;
    int canonical_height = 0;
    std::optional<RegistrationSummary> registration;
    std::optional<SegmentationSummary> segmentation;
    std::optional<RoiSpec> roi;
    std::int64_t roi_area = 0;
    std::optional<SizeComparison> size_comparison;
    std::optional<PixelCounts> counts;
    std::optional<NormativeBaseline> baseline;
    bool fixed_timestamp = false;
};

struct ScreeningReport {
    std::string subject_id;
    double subject_age = 0.0;
    std::string timestamp_utc;
    InterpKind interp = InterpKind::Bilinear;
    double foreground_threshold = 0.05;
    int canonical_width = 0;
    int canonical_height = 0;
    RegistrationSummary registration;
    SegmentationSummary segmentation;
    RoiSpec roi;
    std::int64_t roi_area = 0;
    SizeComparison size_comparison;
    MetricSet metrics;
    std::map<std::string, double> z_scores;
    SeverityBand severity = SeverityBand::WithinRange;
    std::vector<NormativeBaseline> baseline_rows_used;
    std::vector<std::string> warnings;
    std::string disclaimer;
};

/// Assemble the report from the pipeline artifacts. Severity is recomputed
/// here from the cavity-ratio z-score, never passed in. Missing mandatory
/// artifacts raise an assembly error.
ScreeningReport build_report(const ReportInputs& in);

/// UTF-8 JSON with a fixed key order (see report.schema). Reals carry
/// 6 significant digits.
std::string render_json(const ScreeningReport& r);

/// Human-readable summary: header line, metric table, severity line,
/// warnings, disclaimer. Line layout is frozen by golden-file tests.
std::string render_text(const ScreeningReport& r);

/// Quantize to 6 significant digits (the report serialization rule).
double quantize6(double v);

} // namespace atroscreen

#endif
