#include "antnav/explorer.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "antnav/error.hpp"
#include "antnav/sensors.hpp"

namespace antnav {

std::vector<Waypoint> waypoint_candidates(const Scene& scene, const Pose& pose,
                                          int max_candidates) {
    struct Scored {
        Waypoint wp;
        double free_dist;
        int heading_index;
    };
    std::vector<Scored> scored;

    const Vec3 eye{pose.x, pose.y, pose.z + kCameraHeight};
    for (int i = 0; i < 12; ++i) {
        double heading = pose.yaw - deg2rad(30.0 * i);
        Vec3 dir{std::cos(heading), std::sin(heading), 0.0};
        RayHit hit = raycast(scene, eye, dir, kMaxRayRange);
        double free = hit.hit ? hit.t : kMaxRayRange;
        if (free < 1.0) continue;
        double range = std::min(2.0, free - 0.3);
        Vec3 target{pose.x + range * dir.x, pose.y + range * dir.y, 0.0};
        // the target floor may sit well above or below the agent on ramps;
        // scan down from just under the probe ray
        auto floor = surface_below(scene, target.x, target.y, eye.z - 0.05);
        if (!floor || *floor > eye.z - 0.2 || *floor < pose.z - 1.5) continue;
        target.z = *floor;
        if (!is_traversable(scene, target, kAgentClearance)) continue;
        if (!segment_traversable(scene, pose.position(), target, kAgentClearance)) continue;
        Waypoint wp;
        wp.dx = target.x - pose.x;
        wp.dy = target.y - pose.y;
        wp.z = target.z;
        scored.push_back({wp, free, i});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.free_dist != b.free_dist) return a.free_dist > b.free_dist;
        return a.heading_index < b.heading_index;
    });
    if (static_cast<int>(scored.size()) > max_candidates) scored.resize(max_candidates);
    std::vector<Waypoint> out;
    for (const Scored& s : scored) out.push_back(s.wp);
    return out;
}

namespace {

Pose pose_at(const NavGraph& graph, GridKey key, double yaw) {
    const Vec3& p = graph.node(key).position;
    return Pose{p.x, p.y, p.z, yaw, 0.0};
}

}  // namespace

NavGraph explore(const Scene& scene, const Pose& start, std::vector<ExploreStep>* trace) {
    if (!is_traversable(scene, start.position(), kAgentClearance))
        throw AntError(ErrorKind::Config, "explore: start pose is not traversable");

    NavGraph graph;
    GridKey current = graph.upsert(start.position(), true);
    std::vector<GridKey> stack;  // discovery order, most recent on top

    auto expand = [&](GridKey at, const Pose& pose, const char* action) {
        std::vector<Waypoint> wps = waypoint_candidates(scene, pose);
        ExploreStep step;
        step.pose = pose;
        step.action = action;
        for (const Waypoint& wp : wps) {
            Vec3 target{pose.x + wp.dx, pose.y + wp.dy, wp.z};
            GridKey k = graph.upsert(target, false);
            if (k == at) continue;
            graph.link(at, k);
            if (!graph.node(k).visited) {
                stack.push_back(k);
                step.discovered.push_back(k);
            }
        }
        if (trace) trace->push_back(std::move(step));
    };

    expand(current, start, "start");

    while (!stack.empty()) {
        GridKey next = stack.back();
        stack.pop_back();
        if (graph.node(next).visited) continue;

        std::vector<GridKey> path = graph.shortest_path(current, next);
        if (path.empty()) {
            // candidate landed somewhere the visited graph cannot reach
            if (trace)
                trace->push_back({pose_at(graph, next, 0.0), "drop", {}});
            continue;
        }
        double yaw = start.yaw;
        if (path.size() >= 2) {
            const Vec3& a = graph.node(path[path.size() - 2]).position;
            const Vec3& b = graph.node(next).position;
            yaw = std::atan2(b.y - a.y, b.x - a.x);
        }
        graph.upsert(graph.node(next).position, true);
        current = next;
        expand(current, pose_at(graph, current, yaw), "visit");
    }

    apply_partition(graph, detect_stairs_and_partition(graph));
    return graph;
}

std::string trace_to_json(const std::vector<ExploreStep>& trace) {
    nlohmann::json j = nlohmann::json::array();
    for (const ExploreStep& s : trace) {
        nlohmann::json keys = nlohmann::json::array();
        for (const GridKey& k : s.discovered) keys.push_back({k.ix, k.iy, k.iz});
        j.push_back({{"pose", {s.pose.x, s.pose.y, s.pose.z, s.pose.yaw}},
                     {"action", s.action},
                     {"discovered", keys}});
    }
    return j.dump();
}

}  // namespace antnav
