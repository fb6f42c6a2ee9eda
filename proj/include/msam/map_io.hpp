#pragma once

#include <string>
#include <vector>

#include "msam/align.hpp"
#include "msam/io_detail.hpp"
#include "msam/merge.hpp"

namespace msam {

/// Writes {"robots":[{"id":..,"poses":[[x,y,theta],..]}],"landmarks":
/// [{"tag_id":..,"x":..,"y":..}],"origin_distance_m":..} with keys in that
/// order and floats at 9 significant digits. A trailing "converged":false is
/// appended for non-converged solves. Written atomically.
void export_map(const GlobalMap& map, const std::string& path);

/// Inverse of export_map (up to the 9-digit float precision).
GlobalMap load_map(const std::string& path);

/// One labelled map drawn into the shared figure.
struct MapLayer {
    std::string label;
    std::vector<Pose2> trajectory;
    std::vector<Landmark2> landmarks;
};

/// Renders trajectories as polylines and landmarks as circles (first map) or
/// asterisk glyphs (later maps) into one auto-scaled SVG with a legend.
void render_svg(const std::vector<MapLayer>& maps, const std::string& path);

/// {"theta":..,"t_x":..,"t_y":..,"inliers":[..],"mean_inlier_error_m":..}
void save_transform(const AlignmentResult& result, const std::string& path);
Se2Transform load_transform(const std::string& path);

}  // namespace msam
