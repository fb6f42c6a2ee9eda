#include "msam/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace msam {

void RansacConfig::validate() const {
    if (iterations < 1 || !(inlier_threshold > 0.0) || !(min_pair_separation > 0.0)) {
        throw std::invalid_argument("RansacConfig: invalid configuration");
    }
}

std::vector<Correspondence> find_correspondences(std::span<const Landmark2> map1,
                                                 std::span<const Landmark2> map2) {
    std::map<int, Eigen::Vector2d> by_tag1;
    for (const auto& lm : map1) {
        if (!by_tag1.emplace(lm.tag_id, lm.position()).second) {
            throw std::invalid_argument("find_correspondences: duplicate tag " +
                                        std::to_string(lm.tag_id) + " in map 1");
        }
    }
    std::map<int, Eigen::Vector2d> by_tag2;
    for (const auto& lm : map2) {
        if (!by_tag2.emplace(lm.tag_id, lm.position()).second) {
            throw std::invalid_argument("find_correspondences: duplicate tag " +
                                        std::to_string(lm.tag_id) + " in map 2");
        }
    }
    std::vector<Correspondence> corrs;
    for (const auto& [tag, p1] : by_tag1) {
        auto it = by_tag2.find(tag);
        if (it != by_tag2.end()) {
            corrs.push_back({tag, p1, it->second});
        }
    }
    return corrs;
}

double estimate_rotation(const Correspondence& a, const Correspondence& b,
                         double min_pair_separation) {
    const Eigen::Vector2d d1 = b.p1 - a.p1;
    const Eigen::Vector2d d2 = b.p2 - a.p2;
    if (d1.norm() < min_pair_separation || d2.norm() < min_pair_separation) {
        throw DegenerateSampleError("estimate_rotation: correspondence pair closer than " +
                                    std::to_string(min_pair_separation) + " m");
    }
    return wrap_angle(std::atan2(d1.y(), d1.x()) - std::atan2(d2.y(), d2.x()));
}

Eigen::Vector2d estimate_translation(double theta, const Correspondence& c) {
    return c.p1 - Se2Transform(theta, 0.0, 0.0).rotation() * c.p2;
}

Se2Transform refit_inliers(std::span<const Correspondence> inliers) {
    if (inliers.size() < 2) {
        throw DegenerateSampleError("refit_inliers: need at least 2 correspondences");
    }
    Eigen::Vector2d c1 = Eigen::Vector2d::Zero();
    Eigen::Vector2d c2 = Eigen::Vector2d::Zero();
    for (const auto& c : inliers) {
        c1 += c.p1;
        c2 += c.p2;
    }
    c1 /= static_cast<double>(inliers.size());
    c2 /= static_cast<double>(inliers.size());

    double sc = 0.0;  // sum of dot products
    double ss = 0.0;  // sum of 2d cross products
    double spread = 0.0;
    for (const auto& c : inliers) {
        const Eigen::Vector2d q1 = c.p1 - c1;
        const Eigen::Vector2d q2 = c.p2 - c2;
        sc += q2.dot(q1);
        ss += q2.x() * q1.y() - q2.y() * q1.x();
        spread += q1.squaredNorm() + q2.squaredNorm();
    }
    if (spread < 1e-18) {
        throw DegenerateSampleError("refit_inliers: all correspondences coincident");
    }
    const double theta = std::atan2(ss, sc);
    const Eigen::Vector2d t = c1 - Se2Transform(theta, 0.0, 0.0).rotation() * c2;
    return {theta, t.x(), t.y()};
}

namespace {

// Rejection-sampled bounded draw; keeps the hypothesis stream identical
// across platforms for one seed.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) {
        v = rng();
    }
    return v % n;
}

struct Consensus {
    std::vector<std::size_t> inliers;
    double error_sum = 0.0;
};

Consensus evaluate(std::span<const Correspondence> corrs, const Se2Transform& t,
                   double threshold) {
    Consensus c;
    for (std::size_t i = 0; i < corrs.size(); ++i) {
        const double err = (corrs[i].p1 - apply_transform(t, corrs[i].p2)).norm();
        if (err <= threshold) {
            c.inliers.push_back(i);
            c.error_sum += err;
        }
    }
    return c;
}

}  // namespace

AlignmentResult ransac_align(std::span<const Correspondence> corrs, const RansacConfig& cfg) {
    cfg.validate();
    if (corrs.size() < 2) {
        throw AlignmentError("ransac_align: need at least 2 correspondences, got " +
                             std::to_string(corrs.size()));
    }

    std::mt19937_64 rng(cfg.seed);
    bool have_best = false;
    Se2Transform best_transform;
    Consensus best;

    for (int round = 0; round < cfg.iterations; ++round) {
        const std::size_t i = uniform_index(rng, corrs.size());
        std::size_t j = uniform_index(rng, corrs.size() - 1);
        if (j >= i) {
            ++j;
        }
        double theta = 0.0;
        try {
            theta = estimate_rotation(corrs[i], corrs[j], cfg.min_pair_separation);
        } catch (const DegenerateSampleError&) {
            continue;
        }
        const Eigen::Vector2d t = estimate_translation(theta, corrs[i]);
        const Se2Transform hypothesis(theta, t.x(), t.y());
        Consensus c = evaluate(corrs, hypothesis, cfg.inlier_threshold);
        if (c.inliers.size() < 2) {
            continue;
        }
        const bool better = !have_best || c.inliers.size() > best.inliers.size() ||
                            (c.inliers.size() == best.inliers.size() &&
                             c.error_sum < best.error_sum);
        if (better) {
            have_best = true;
            best = std::move(c);
            best_transform = hypothesis;
        }
    }

    if (!have_best) {
        throw AlignmentError("ransac_align: no hypothesis reached 2 inliers");
    }

    std::vector<Correspondence> inlier_corrs;
    inlier_corrs.reserve(best.inliers.size());
    for (std::size_t i : best.inliers) {
        inlier_corrs.push_back(corrs[i]);
    }
    Se2Transform refined = best_transform;
    try {
        refined = refit_inliers(inlier_corrs);
    } catch (const DegenerateSampleError&) {
        // fall back to the minimal hypothesis
    }

    // Report the consensus set of the final transform.
    const Consensus final_set = evaluate(corrs, refined, cfg.inlier_threshold);
    if (final_set.inliers.size() < 2) {
        throw AlignmentError("ransac_align: refit transform lost its consensus set");
    }
    AlignmentResult result;
    result.transform = refined;
    for (std::size_t i : final_set.inliers) {
        result.inlier_ids.insert(corrs[i].tag_id);
    }
    result.mean_inlier_error = final_set.error_sum / static_cast<double>(final_set.inliers.size());
    return result;
}

}  // namespace msam
