#include "msam/map_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

namespace msam {

namespace {

std::string fmt9(double v) {
    if (!std::isfinite(v)) {
        throw IoError("export: non-finite value");
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void export_map(const GlobalMap& map, const std::string& path) {
    std::string out = "{\"robots\":[";
    bool first_robot = true;
    for (const auto& [rid, poses] : map.trajectories) {
        if (!first_robot) {
            out += ",";
        }
        first_robot = false;
        out += "{\"id\":" + std::to_string(rid) + ",\"poses\":[";
        for (std::size_t t = 0; t < poses.size(); ++t) {
            if (t > 0) {
                out += ",";
            }
            out += "[" + fmt9(poses[t].x) + "," + fmt9(poses[t].y) + "," + fmt9(poses[t].theta) + "]";
        }
        out += "]}";
    }
    out += "],\"landmarks\":[";
    for (std::size_t i = 0; i < map.landmarks.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += "{\"tag_id\":" + std::to_string(map.landmarks[i].tag_id) + ",\"x\":" +
               fmt9(map.landmarks[i].x) + ",\"y\":" + fmt9(map.landmarks[i].y) + "}";
    }
    out += "],\"origin_distance_m\":" + fmt9(map.origin_distance_m);
    if (!map.converged) {
        out += ",\"converged\":false";
    }
    out += "}\n";
    detail::write_file_atomic(path, out);
}

GlobalMap load_map(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    GlobalMap map;
    try {
        for (const auto& robot : doc.at("robots")) {
            std::vector<Pose2> poses;
            for (const auto& p : robot.at("poses")) {
                poses.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                                   p.at(2).get<double>());
            }
            const int rid = robot.at("id").get<int>();
            if (!map.trajectories.emplace(rid, std::move(poses)).second) {
                throw ParseError(path + ": duplicate robot id " + std::to_string(rid));
            }
        }
        for (const auto& lm : doc.at("landmarks")) {
            map.landmarks.emplace_back(lm.at("tag_id").get<int>(), lm.at("x").get<double>(),
                                       lm.at("y").get<double>());
        }
        map.origin_distance_m = doc.at("origin_distance_m").get<double>();
        map.converged = doc.value("converged", true);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    std::sort(map.landmarks.begin(), map.landmarks.end(),
              [](const Landmark2& a, const Landmark2& b) { return a.tag_id < b.tag_id; });
    for (std::size_t i = 1; i < map.landmarks.size(); ++i) {
        if (map.landmarks[i].tag_id == map.landmarks[i - 1].tag_id) {
            throw ParseError(path + ": duplicate landmark tag " +
                             std::to_string(map.landmarks[i].tag_id));
        }
    }
    return map;
}

void render_svg(const std::vector<MapLayer>& maps, const std::string& path) {
    if (maps.empty()) {
        throw std::invalid_argument("render_svg: at least one map required");
    }

    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x;
    double max_x = -min_x;
    double max_y = -min_x;
    auto grow = [&](double x, double y) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    };
    for (const auto& layer : maps) {
        for (const auto& p : layer.trajectory) {
            grow(p.x, p.y);
        }
        for (const auto& lm : layer.landmarks) {
            grow(lm.x, lm.y);
        }
    }
    if (!(min_x <= max_x)) {
        min_x = min_y = -1.0;
        max_x = max_y = 1.0;
    }
    const double extent = std::max({max_x - min_x, max_y - min_y, 1.0});
    const double margin = 0.08 * extent;
    const double glyph = 0.012 * extent;
    const double stroke = 0.004 * extent;

    // World y up, SVG y down: emit (x, -y).
    const std::string view = fmt9(min_x - margin) + " " + fmt9(-max_y - margin) + " " +
                             fmt9(max_x - min_x + 2 * margin) + " " +
                             fmt9(max_y - min_y + 2 * margin);

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    constexpr std::size_t kNColors = sizeof(kColors) / sizeof(kColors[0]);

    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + view + "\">\n";
    for (std::size_t m = 0; m < maps.size(); ++m) {
        const std::string color = kColors[m % kNColors];
        out += "<g stroke=\"" + color + "\" fill=\"none\" stroke-width=\"" + fmt9(stroke) + "\">\n";
        out += "<polyline points=\"";
        for (std::size_t t = 0; t < maps[m].trajectory.size(); ++t) {
            if (t > 0) {
                out += " ";
            }
            out += fmt9(maps[m].trajectory[t].x) + "," + fmt9(-maps[m].trajectory[t].y);
        }
        out += "\"/>\n";
        for (const auto& lm : maps[m].landmarks) {
            if (m == 0) {
                out += "<circle cx=\"" + fmt9(lm.x) + "\" cy=\"" + fmt9(-lm.y) + "\" r=\"" +
                       fmt9(glyph) + "\"/>\n";
            } else {
                const std::string r = fmt9(glyph);
                const std::string d = fmt9(glyph * 0.7071);
                out += "<g transform=\"translate(" + fmt9(lm.x) + "," + fmt9(-lm.y) + ")\">";
                out += "<path d=\"M -" + r + " 0 L " + r + " 0 M 0 -" + r + " L 0 " + r +
                       " M -" + d + " -" + d + " L " + d + " " + d + " M -" + d + " " + d +
                       " L " + d + " -" + d + "\"/></g>\n";
            }
        }
        out += "</g>\n";
        // legend entry
        const double lx = min_x - margin + 0.1 * margin + glyph;
        const double ly = -max_y - margin + (static_cast<double>(m) + 1.0) * 3.0 * glyph;
        out += "<text x=\"" + fmt9(lx) + "\" y=\"" + fmt9(ly) + "\" fill=\"" + color +
               "\" font-size=\"" + fmt9(2.0 * glyph) + "\" stroke=\"none\">" +
               xml_escape(maps[m].label) + "</text>\n";
    }
    out += "</svg>\n";
    detail::write_file_atomic(path, out);
}

void save_transform(const AlignmentResult& result, const std::string& path) {
    std::string out = "{\"theta\":" + fmt9(result.transform.theta) +
                      ",\"t_x\":" + fmt9(result.transform.t_x) +
                      ",\"t_y\":" + fmt9(result.transform.t_y) + ",\"inliers\":[";
    bool first = true;
    for (int tag : result.inlier_ids) {
        if (!first) {
            out += ",";
        }
        first = false;
        out += std::to_string(tag);
    }
    out += "],\"mean_inlier_error_m\":" + fmt9(result.mean_inlier_error) + "}\n";
    detail::write_file_atomic(path, out);
}

Se2Transform load_transform(const std::string& path) {
    try {
        const nlohmann::json doc = nlohmann::json::parse(detail::read_file(path));
        return {doc.at("theta").get<double>(), doc.at("t_x").get<double>(),
                doc.at("t_y").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace msam
