#ifndef ATROSCREEN_ANALYSIS_HPP
#define ATROSCREEN_ANALYSIS_HPP

#include "atroscreen/measurement.hpp"

#include <string>
#include <vector>

namespace atroscreen {

/// Normative cohort statistics for one metric over one age band.
struct NormativeBaseline {
    double age_min = 0.0;
    double age_max = 0.0;
    std::string metric;
    double mean = 0.0;
    double sd = 1.0; // > 0
    int n = 0;       // >= 2
};

struct MetricSet {
    double cavity_ratio = 0.0;
    std::int64_t black_count = 0;
    std::int64_t white_count = 0;
    std::int64_t roi_area = 0;
    double area_ratio = 0.0;
};

/// Ordered reporting vocabulary. Deliberately not mapped to any clinical
/// staging scale; thresholds are z in {1, 2, 3}, one-sided.
enum class SeverityBand { WithinRange, Borderline, Elevated, Severe };

std::string to_string(SeverityBand band);

MetricSet compute_metrics(const PixelCounts& counts, const SizeComparison& size_cmp);

double z_score(double value, const NormativeBaseline& baseline);

/// Arithmetic mean and sample standard deviation (n-1 denominator).
/// Fewer than 2 samples or zero variance is a degenerate baseline.
NormativeBaseline fit_baseline(const std::vector<double>& samples,
                               double age_min, double age_max,
                               const std::string& metric);

/// One-sided banding: only high cavity ratios escalate.
/// z < 1 WithinRange, 1 <= z < 2 Borderline, 2 <= z < 3 Elevated, z >= 3 Severe.
SeverityBand classify_severity(double z);

/// Baseline CSV: header "age_min,age_max,metric,mean,sd,n", one row per
/// (age band, metric).
std::vector<NormativeBaseline> parse_baseline_csv(const std::string& text);
std::vector<NormativeBaseline> load_baseline_file(const std::string& path);

/// Select the first row whose band contains the age and whose metric
/// matches. No matching row is an error.
NormativeBaseline select_baseline(const std::vector<NormativeBaseline>& rows,
                                  double age, const std::string& metric);

} // namespace atroscreen

#endif
