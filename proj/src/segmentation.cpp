#include "atroscreen/segmentation.hpp"
#include "atroscreen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace atroscreen {

std::string to_string(SegMethod m) {
    switch (m) {
        case SegMethod::Otsu: return "otsu";
        case SegMethod::FixedThreshold: return "fixed";
        case SegMethod::Fcm: return "fcm";
    }
    return "otsu";
}

SegMethod seg_method_from_string(const std::string& name) {
    if (name == "otsu") return SegMethod::Otsu;
    if (name == "fixed") return SegMethod::FixedThreshold;
    if (name == "fcm") return SegMethod::Fcm;
    throw ArgumentError("unknown segmentation method: " + name);
}

std::int64_t BinaryMap::black_total() const {
    return std::count_if(black.begin(), black.end(),
                         [](std::uint8_t b) { return b != 0; });
}

Histogram compute_histogram(const Image& img, int bin_count) {
    if (bin_count < 2) throw ArgumentError("histogram needs at least 2 bins");
    Histogram h;
    h.bin_count = bin_count;
    h.counts.assign(static_cast<std::size_t>(bin_count), 0);
    for (double v : img.intensities) {
        int bin = static_cast<int>(std::floor(v * bin_count));
        if (bin >= bin_count) bin = bin_count - 1; // last bin closed above
        if (bin < 0) bin = 0;
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    h.total = static_cast<std::int64_t>(img.intensities.size());
    return h;
}

double otsu_threshold(const Histogram& h) {
    if (h.total < 1) throw ArgumentError("histogram is empty");
    const int bins = h.bin_count;
    std::int64_t total_count = 0;
    std::int64_t total_moment = 0; // sum of count * bin index
    int nonempty = 0;
    for (int i = 0; i < bins; ++i) {
        total_count += h.counts[i];
        total_moment += h.counts[i] * i;
        if (h.counts[i] > 0) ++nonempty;
    }
    if (nonempty < 2) {
        throw DataError("degenerate histogram: all mass in one bin");
    }

    // Walk the split point k upward, keeping exact integer class sums so
    // tie comparisons are bitwise reproducible against exhaustive search.
    double best_sigma = -1.0;
    int best_k = -1;
    std::int64_t w0 = 0;
    std::int64_t m0 = 0;
    for (int k = 1; k < bins; ++k) {
        w0 += h.counts[k - 1];
        m0 += h.counts[k - 1] * static_cast<std::int64_t>(k - 1);
        const std::int64_t w1 = total_count - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double mu0 = static_cast<double>(m0) / static_cast<double>(w0);
        const double mu1 = static_cast<double>(total_moment - m0) / static_cast<double>(w1);
        const double diff = mu0 - mu1;
        const double sigma = static_cast<double>(w0) * static_cast<double>(w1) * diff * diff;
        if (sigma > best_sigma) {
            best_sigma = sigma;
            best_k = k;
        }
    }
    return static_cast<double>(best_k) / static_cast<double>(bins);
}

BinaryMap binarize(const Image& img, double threshold, SegMethod method) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ArgumentError("threshold must lie in [0,1]");
    }
    BinaryMap bm;
    bm.width = img.width;
    bm.height = img.height;
    bm.method = method;
    bm.threshold_used = threshold;
    bm.black.resize(img.intensities.size());
    for (std::size_t i = 0; i < img.intensities.size(); ++i) {
        bm.black[i] = img.intensities[i] < threshold ? 1 : 0;
    }
    return bm;
}

namespace {

// Evenly spaced quantile levels (2i+1)/(2c); falls back to spreading over
// the distinct values when the quantiles collide.
std::vector<double> initial_centers(const std::vector<double>& intensities, int c) {
    std::vector<double> sorted = intensities;
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> centers(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i) {
        centers[i] = sorted_quantile(sorted, (2.0 * i + 1.0) / (2.0 * c));
    }
    bool strictly_increasing = true;
    for (int i = 1; i < c; ++i) {
        if (centers[i] <= centers[i - 1]) strictly_increasing = false;
    }
    if (!strictly_increasing) {
        std::vector<double> distinct = sorted;
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        const std::size_t last = distinct.size() - 1;
        for (int i = 0; i < c; ++i) {
            centers[i] = distinct[last * static_cast<std::size_t>(i) /
                                  static_cast<std::size_t>(c - 1)];
        }
    }
    return centers;
}

double fcm_objective(const std::vector<double>& xs, const std::vector<double>& centers,
                     const std::vector<double>& u, double m) {
    const int c = static_cast<int>(centers.size());
    double j = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        for (int i = 0; i < c; ++i) {
            const double d = xs[k] - centers[i];
            j += std::pow(u[k * c + i], m) * d * d;
        }
    }
    return j;
}

} // namespace

MembershipMap fcm_segment(const Image& img, const FcmParams& params) {
    const int c = params.clusters;
    const double m = params.fuzzifier;
    if (c < 2) throw ArgumentError("fcm needs at least 2 clusters");
    if (!(m > 1.0)) throw ArgumentError("fcm fuzzifier must be > 1");
    if (!(params.tol > 0.0)) throw ArgumentError("fcm tolerance must be > 0");
    if (params.max_iter < 1) throw ArgumentError("fcm max_iter must be >= 1");
    if (params.spatial_window < 0) throw ArgumentError("fcm spatial window must be >= 0");

    const std::vector<double>& xs = img.intensities;
    {
        std::vector<double> distinct = xs;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (static_cast<int>(distinct.size()) < c) {
            throw DataError("fcm needs at least " + std::to_string(c) +
                            " distinct intensities, image has " +
                            std::to_string(distinct.size()));
        }
    }

    const std::size_t n = xs.size();
    const double exponent = 2.0 / (m - 1.0);

    MembershipMap mm;
    mm.width = img.width;
    mm.height = img.height;
    mm.cluster_count = c;
    mm.fuzzifier = m;
    mm.centers = initial_centers(xs, c);
    mm.memberships.assign(n * static_cast<std::size_t>(c), 0.0);

    std::vector<double> dist(static_cast<std::size_t>(c));
    const auto update_memberships = [&]() {
        double max_dev = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double* row = &mm.memberships[k * c];
            int exact = -1;
            for (int i = 0; i < c; ++i) {
                dist[i] = std::fabs(xs[k] - mm.centers[i]);
                if (dist[i] == 0.0 && exact < 0) exact = i;
            }
            if (exact >= 0) {
                // hard-assignment convention for a pixel sitting on a center
                for (int i = 0; i < c; ++i) row[i] = i == exact ? 1.0 : 0.0;
                continue;
            }
            double row_sum = 0.0;
            for (int i = 0; i < c; ++i) {
                double denom = 0.0;
                for (int j = 0; j < c; ++j) {
                    denom += std::pow(dist[i] / dist[j], exponent);
                }
                row[i] = 1.0 / denom;
                row_sum += row[i];
            }
            max_dev = std::max(max_dev, std::fabs(row_sum - 1.0));
        }
        mm.max_row_sum_deviation = std::max(mm.max_row_sum_deviation, max_dev);
    };

    for (int iter = 0; iter < params.max_iter; ++iter) {
        update_memberships();

        double max_shift = 0.0;
        for (int i = 0; i < c; ++i) {
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double um = std::pow(mm.memberships[k * c + i], m);
                num += um * xs[k];
                den += um;
            }
            const double updated = den > 0.0 ? num / den : mm.centers[i];
            max_shift = std::max(max_shift, std::fabs(updated - mm.centers[i]));
            mm.centers[i] = updated;
        }

        mm.iterations_run = iter + 1;
        mm.objective_history.push_back(fcm_objective(xs, mm.centers, mm.memberships, m));
        if (max_shift < params.tol) break;
    }
    // memberships must reflect the final centers
    update_memberships();
    mm.final_objective = fcm_objective(xs, mm.centers, mm.memberships, m);

    // sort centers ascending, permuting membership columns to match
    std::vector<int> order(static_cast<std::size_t>(c));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return mm.centers[a] < mm.centers[b]; });
    {
        std::vector<double> centers_sorted(static_cast<std::size_t>(c));
        std::vector<double> perm_row(static_cast<std::size_t>(c));
        for (int i = 0; i < c; ++i) centers_sorted[i] = mm.centers[order[i]];
        mm.centers = std::move(centers_sorted);
        for (std::size_t k = 0; k < n; ++k) {
            double* row = &mm.memberships[k * c];
            for (int i = 0; i < c; ++i) perm_row[i] = row[order[i]];
            for (int i = 0; i < c; ++i) row[i] = perm_row[i];
        }
    }

    if (params.spatial_window > 0) {
        const int w = params.spatial_window;
        const int width = img.width;
        const int height = img.height;
        std::vector<double> weighted(n * static_cast<std::size_t>(c));
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const std::size_t k = static_cast<std::size_t>(y) * width + x;
                double row_sum = 0.0;
                for (int i = 0; i < c; ++i) {
                    double neighborhood = 0.0;
                    for (int dy = -w; dy <= w; ++dy) {
                        const int ny = y + dy;
                        if (ny < 0 || ny >= height) continue;
                        for (int dx = -w; dx <= w; ++dx) {
                            const int nx = x + dx;
                            if (nx < 0 || nx >= width) continue;
                            neighborhood +=
                                mm.memberships[(static_cast<std::size_t>(ny) * width + nx) * c + i];
                        }
                    }
                    weighted[k * c + i] = mm.memberships[k * c + i] * neighborhood;
                    row_sum += weighted[k * c + i];
                }
                if (row_sum > 0.0) {
                    for (int i = 0; i < c; ++i) weighted[k * c + i] /= row_sum;
                } else {
                    for (int i = 0; i < c; ++i) weighted[k * c + i] = mm.memberships[k * c + i];
                }
            }
        }
        double max_dev = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < c; ++i) s += weighted[k * c + i];
            max_dev = std::max(max_dev, std::fabs(s - 1.0));
        }
        mm.max_row_sum_deviation = std::max(mm.max_row_sum_deviation, max_dev);
        mm.memberships = std::move(weighted);
    }

    return mm;
}

BinaryMap memberships_to_binary(const MembershipMap& mm) {
    BinaryMap bm;
    bm.width = mm.width;
    bm.height = mm.height;
    bm.method = SegMethod::Fcm;
    bm.threshold_used = std::nullopt;
    const std::size_t n = static_cast<std::size_t>(mm.width) * mm.height;
    bm.black.resize(n);
    const int c = mm.cluster_count;
    for (std::size_t k = 0; k < n; ++k) {
        const double dark = mm.memberships[k * c + 0]; // centers sorted: 0 is darkest
        bool is_black = true;
        for (int i = 1; i < c; ++i) {
            if (mm.memberships[k * c + i] > dark) { // ties break toward black
                is_black = false;
                break;
            }
        }
        bm.black[k] = is_black ? 1 : 0;
    }
    return bm;
}

} // namespace atroscreen
