#ifndef ATROSCREEN_PHANTOM_HPP
#define ATROSCREEN_PHANTOM_HPP

#include "atroscreen/image.hpp"
#include "atroscreen/registration.hpp"
#include "atroscreen/segmentation.hpp"

#include <cstdint>
#include <vector>

namespace atroscreen {

/**
 * @brief Synthetic brain-slice phantom: a head disk with a ventricle
 * (cavity) disk inside, plus seeded Gaussian noise.
 *
 * Disk geometry keeps the ground-truth cavity area analytic, so pipeline
 * acceptance thresholds can be computed by hand.
 */
struct PhantomSpec {
    int width = 256;
    int height = 256;
    double head_radius = 100.0;
    double ventricle_radius = 20.0;
    double ventricle_dx = 0.0; // offset from image center, px
    double ventricle_dy = 0.0;
    double tissue_intensity = 0.7;
    double cavity_intensity = 0.1;
    double background_intensity = 0.0;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
};

struct PhantomOutput {
    Image image;
    BinaryMap ground_truth;                 // exactly the ventricle-disk pixels
    std::vector<ControlPointPair> landmarks; // head-disk extrema, paired with themselves
};

/// Deterministic for a given spec+seed. The ventricle disk must lie
/// strictly inside the head disk and cavity_intensity < tissue_intensity.
PhantomOutput generate_phantom(const PhantomSpec& spec);

std::string landmarks_to_json(const std::vector<ControlPointPair>& pairs);

} // namespace atroscreen

#endif
