#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "msam/core.hpp"

namespace msam {

/// Map alignment could not be established (too few correspondences or no
/// consensus hypothesis).
class AlignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A minimal sample or refit input was geometrically degenerate.
class DegenerateSampleError : public AlignmentError {
public:
    using AlignmentError::AlignmentError;
};

/// One landmark seen in both maps, keyed by its AprilTag ID.
struct Correspondence {
    int tag_id = 0;
    Eigen::Vector2d p1{0.0, 0.0};  // position in map 1
    Eigen::Vector2d p2{0.0, 0.0};  // position in map 2
};

struct RansacConfig {
    int iterations = 500;
    double inlier_threshold = 0.5;     // meters
    double min_pair_separation = 0.2;  // meters
    std::uint64_t seed = 0;

    void validate() const;
};

/// transform maps map-2 coordinates into the map-1 frame.
struct AlignmentResult {
    Se2Transform transform;
    std::set<int> inlier_ids;
    double mean_inlier_error = 0.0;  // meters
};

/// Landmarks present in both maps, ascending by tag_id. Throws
/// std::invalid_argument if either map repeats a tag.
std::vector<Correspondence> find_correspondences(std::span<const Landmark2> map1,
                                                 std::span<const Landmark2> map2);

/// Relative rotation from one pair of correspondences: the angle of the
/// (a -> b) direction in map 1 minus the same direction in map 2. Throws
/// DegenerateSampleError if either direction is shorter than
/// min_pair_separation.
double estimate_rotation(const Correspondence& a, const Correspondence& b,
                         double min_pair_separation);

/// Translation t = p1 - R(theta) * p2 anchored at one correspondence.
Eigen::Vector2d estimate_translation(double theta, const Correspondence& c);

/// Closed-form least-squares rigid fit mapping the p2 side onto the p1 side
/// (centroids plus cross-covariance angle). Throws DegenerateSampleError when
/// either point set is entirely coincident.
Se2Transform refit_inliers(std::span<const Correspondence> inliers);

/// Seeded RANSAC over 2-correspondence hypotheses, consensus by Euclidean
/// distance after transformation, final transform refit on the winning
/// inlier set. Deterministic for a fixed seed.
AlignmentResult ransac_align(std::span<const Correspondence> corrs, const RansacConfig& cfg);

}  // namespace msam
