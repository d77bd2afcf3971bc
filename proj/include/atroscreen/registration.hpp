#ifndef ATROSCREEN_REGISTRATION_HPP
#define ATROSCREEN_REGISTRATION_HPP

#include "atroscreen/image.hpp"

#include <string>
#include <vector>

namespace atroscreen {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// A biomarker landmark: matching coordinates in reference-image and
/// subject-image space, in pixels of the respective (resized) images.
struct ControlPointPair {
    Point2 ref;
    Point2 subj;
    std::string label;
};

/// Planar affine map (x,y) -> (a x + b y + c, d x + e y + f).
struct AffineTransform2D {
    double a = 1.0, b = 0.0, c = 0.0;
    double d = 0.0, e = 1.0, f = 0.0;

    double det() const { return a * e - b * d; }
};

struct RegistrationResult {
    AffineTransform2D transform;
    double rmse = 0.0;
    int pair_count = 0;
};

/**
 * @brief Fit the affine map reference -> subject by least squares.
 *
 * Solves the two independent 3-unknown normal-equation systems (one per
 * output coordinate). Requires at least 3 pairs whose reference points are
 * not collinear (largest triangle area among point triples > 1e-6 px^2).
 */
RegistrationResult estimate_affine(const std::vector<ControlPointPair>& pairs);

Point2 apply_affine(const AffineTransform2D& t, Point2 p);

/// RMS distance between T(ref_i) and subj_i over the given pairs.
double registration_residual(const AffineTransform2D& t,
                             const std::vector<ControlPointPair>& pairs);

/// Resample the subject into reference space: output pixel p takes
/// sample(subject, T(p), kind). T maps reference coords to subject coords,
/// so this is pure inverse mapping with no matrix inversion.
Image warp_to_reference(const Image& subject, const AffineTransform2D& t,
                        int ref_width, int ref_height, InterpKind kind);

/// Landmark file: JSON array of {"label": str?, "ref": [x,y], "subj": [x,y]}.
std::vector<ControlPointPair> parse_landmarks_json(const std::string& text);
std::vector<ControlPointPair> load_landmarks_file(const std::string& path);

} // namespace atroscreen

#endif
