#ifndef ATROSCREEN_SEGMENTATION_HPP
#define ATROSCREEN_SEGMENTATION_HPP

#include "atroscreen/image.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace atroscreen {

/// Intensity histogram. Bin i covers [i/bin_count, (i+1)/bin_count);
/// the last bin is closed above so 1.0 lands in it.
struct Histogram {
    int bin_count = 0;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
};

enum class SegMethod { Otsu, FixedThreshold, Fcm };

std::string to_string(SegMethod m);
SegMethod seg_method_from_string(const std::string& name);

/// Per-pixel cavity/tissue classification. black = true means cavity.
/// For Otsu/FixedThreshold, black(p) <=> intensity(p) < threshold_used.
struct BinaryMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> black;
    std::optional<double> threshold_used;
    SegMethod method = SegMethod::FixedThreshold;

    bool is_black(int x, int y) const {
        return black[static_cast<std::size_t>(y) * width + x] != 0;
    }
    std::int64_t black_total() const;
};

/// Fuzzy C-means result on the 1D intensity feature. memberships is
/// pixel-major: row k holds the cluster_count memberships of pixel k and
/// sums to 1. centers are sorted ascending.
struct MembershipMap {
    int width = 0;
    int height = 0;
    int cluster_count = 0;
    std::vector<double> centers;
    std::vector<double> memberships;
    double fuzzifier = 2.0;
    int iterations_run = 0;
    double final_objective = 0.0;
    // diagnostics for property checks
    std::vector<double> objective_history;
    double max_row_sum_deviation = 0.0;

    double membership(std::size_t pixel, int cluster) const {
        return memberships[pixel * cluster_count + cluster];
    }
};

struct FcmParams {
    int clusters = 3;
    double fuzzifier = 2.0;
    double tol = 1e-5;
    int max_iter = 300;
    int spatial_window = 0;
    std::uint64_t seed = 0; // reserved for optional random restarts
};

Histogram compute_histogram(const Image& img, int bin_count);

/**
 * @brief Otsu threshold of a histogram.
 *
 * Returns the bin-boundary threshold k/bin_count maximizing the
 * between-class variance w0*w1*(mu0-mu1)^2, ties broken toward the lowest
 * threshold. A histogram with all mass in one bin is degenerate.
 */
double otsu_threshold(const Histogram& h);

BinaryMap binarize(const Image& img, double threshold,
                   SegMethod method = SegMethod::FixedThreshold);

/**
 * @brief Standard fuzzy C-means on pixel intensities.
 *
 * u_ik = 1 / sum_j (d_ik/d_jk)^(2/(m-1)), v_i = sum_k u_ik^m x_k / sum_k u_ik^m,
 * J = sum_ik u_ik^m d_ik^2. Iterates until the max center shift drops below
 * tol or max_iter is reached. Centers start at evenly spaced quantiles of
 * the intensity distribution. A pixel exactly at a center gets hard
 * membership 1 there. With spatial_window w > 0, one spatial pass after
 * convergence reweights u'_ik by the summed memberships of the
 * (2w+1)x(2w+1) neighborhood, then renormalizes per pixel.
 */
MembershipMap fcm_segment(const Image& img, const FcmParams& params);

/// Pixel is black iff its maximal-membership cluster is the lowest-center
/// (darkest) cluster; ties break toward black.
BinaryMap memberships_to_binary(const MembershipMap& mm);

} // namespace atroscreen

#endif
