#include "msam/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "msam/io_detail.hpp"

namespace msam {

std::vector<int> Dataset::observed_tags() const {
    std::vector<int> tags;
    tags.reserve(measurements.size());
    for (const auto& m : measurements) {
        tags.push_back(m.tag_id);
    }
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    return tags;
}

Dataset synchronize(std::vector<WheelOdometry> raw_odometry,
                    std::vector<LandmarkMeasurement> raw_measurements,
                    const RobotParams& params, int robot_id) {
    if (params.odom_subsample < 1) {
        throw std::invalid_argument("synchronize: odom_subsample must be >= 1");
    }
    for (std::size_t i = 1; i < raw_odometry.size(); ++i) {
        if (raw_odometry[i].state_id <= raw_odometry[i - 1].state_id) {
            throw ParseError("odometry state_ids must be strictly increasing near state " +
                             std::to_string(raw_odometry[i].state_id));
        }
    }

    Dataset d;
    d.robot_id = robot_id;
    d.params = params;

    // Collapse groups of `subsample` consecutive rows; each group keeps the
    // original state_id of its first row and sums the wheel displacements.
    const int s = params.odom_subsample;
    std::vector<int> group_start_ids;
    for (std::size_t i = 0; i < raw_odometry.size(); i += static_cast<std::size_t>(s)) {
        WheelOdometry grouped;
        grouped.state_id = static_cast<int>(i / static_cast<std::size_t>(s));
        for (std::size_t j = i; j < std::min(i + static_cast<std::size_t>(s), raw_odometry.size()); ++j) {
            grouped.v_l += raw_odometry[j].v_l;
            grouped.v_r += raw_odometry[j].v_r;
        }
        group_start_ids.push_back(raw_odometry[i].state_id);
        d.odometry.push_back(grouped);
    }

    for (const auto& m : raw_measurements) {
        // Greatest surviving original state_id <= the measurement's state.
        auto it = std::upper_bound(group_start_ids.begin(), group_start_ids.end(), m.state_id);
        if (it == group_start_ids.begin()) {
            throw SyncError("measurement at state " + std::to_string(m.state_id) +
                            " precedes the first odometry state" +
                            (group_start_ids.empty() ? " (no odometry)" : ""));
        }
        LandmarkMeasurement synced = m;
        synced.state_id = static_cast<int>(it - group_start_ids.begin()) - 1;
        d.measurements.push_back(synced);
    }
    return d;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& file, int line) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(file + ":" + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& s, const std::string& file, int line) {
    int v = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(file + ":" + std::to_string(line) + ": bad integer '" + s + "'");
    }
    return v;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path + ": cannot open");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

Dataset load_dataset(const std::string& odometry_file, const std::string& measurements_file,
                     const RobotParams& params, int robot_id) {
    std::vector<WheelOdometry> odo;
    {
        const auto lines = read_lines(odometry_file);
        if (lines.empty() || split_csv_row(lines[0]) != std::vector<std::string>{"state_id", "v_l", "v_r"}) {
            throw ParseError(odometry_file + ":1: expected header 'state_id,v_l,v_r'");
        }
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            const auto f = split_csv_row(lines[i]);
            const int lineno = static_cast<int>(i) + 1;
            if (f.size() != 3) {
                throw ParseError(odometry_file + ":" + std::to_string(lineno) + ": expected 3 fields");
            }
            odo.push_back({parse_int(f[0], odometry_file, lineno),
                           parse_double(f[1], odometry_file, lineno),
                           parse_double(f[2], odometry_file, lineno)});
        }
    }
    std::vector<LandmarkMeasurement> meas;
    {
        const auto lines = read_lines(measurements_file);
        if (lines.empty() ||
            split_csv_row(lines[0]) != std::vector<std::string>{"state_id", "tag_id", "dx", "dy"}) {
            throw ParseError(measurements_file + ":1: expected header 'state_id,tag_id,dx,dy'");
        }
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            const auto f = split_csv_row(lines[i]);
            const int lineno = static_cast<int>(i) + 1;
            if (f.size() != 4) {
                throw ParseError(measurements_file + ":" + std::to_string(lineno) + ": expected 4 fields");
            }
            LandmarkMeasurement m{parse_int(f[0], measurements_file, lineno),
                                  parse_int(f[1], measurements_file, lineno),
                                  parse_double(f[2], measurements_file, lineno),
                                  parse_double(f[3], measurements_file, lineno)};
            if (m.tag_id < 0) {
                throw ParseError(measurements_file + ":" + std::to_string(lineno) + ": negative tag_id");
            }
            meas.push_back(m);
        }
    }
    return synchronize(std::move(odo), std::move(meas), params, robot_id);
}

void write_odometry_csv(const std::vector<WheelOdometry>& rows, const std::string& path) {
    std::string out = "state_id,v_l,v_r\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.state_id, r.v_l, r.v_r);
        out += buf;
    }
    detail::write_file_atomic(path, out);
}

void write_measurements_csv(const std::vector<LandmarkMeasurement>& rows, const std::string& path) {
    std::string out = "state_id,tag_id,dx,dy\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", r.state_id, r.tag_id, r.dx, r.dy);
        out += buf;
    }
    detail::write_file_atomic(path, out);
}

std::vector<Pose2> dead_reckon(const Dataset& d, const Pose2& origin) {
    std::vector<Pose2> poses;
    poses.reserve(d.odometry.size() + 1);
    poses.push_back(origin);
    for (const auto& odom : d.odometry) {
        const Pose2& prev = poses.back();
        const Eigen::Vector3d delta = motion_delta(odom, prev.theta, d.params);
        poses.emplace_back(prev.x + delta.x(), prev.y + delta.y(), prev.theta + delta.z());
    }
    return poses;
}

}  // namespace msam
