#pragma once

#include <string>
#include <vector>

#include "antnav/navgraph.hpp"
#include "antnav/scene.hpp"

namespace antnav {

enum class ActionKind { Move, Backtrack, Stop };

struct Waypoint {
    double dx = 0, dy = 0;  // meters relative to the agent
    double z = 0;           // absolute walk height at the target
    ActionKind kind = ActionKind::Move;

    double heading() const { return std::atan2(dy, dx); }
    double range() const { return std::sqrt(dx * dx + dy * dy); }
};

constexpr int kDefaultMaxCandidates = 6;
constexpr double kWaypointMinRange = 0.5;
constexpr double kWaypointMaxRange = 2.5;

// Geometric stand-in for a learned waypoint predictor: probe 12 panorama
// headings with a horizontal free-space ray at eye height, keep targets
// with enough clearance, best free distance first.
std::vector<Waypoint> waypoint_candidates(const Scene& scene, const Pose& pose,
                                          int max_candidates = kDefaultMaxCandidates);

struct ExploreStep {
    Pose pose;
    std::string action;  // "start" | "visit" | "drop"
    std::vector<GridKey> discovered;
};

// Frontier-driven depth-first exploration; the returned graph is
// partitioned into regions with stair edges identified.
NavGraph explore(const Scene& scene, const Pose& start,
                 std::vector<ExploreStep>* trace = nullptr);

std::string trace_to_json(const std::vector<ExploreStep>& trace);

}  // namespace antnav
