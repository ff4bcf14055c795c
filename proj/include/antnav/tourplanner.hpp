#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "antnav/image.hpp"
#include "antnav/navgraph.hpp"
#include "antnav/scene.hpp"

namespace antnav {

constexpr double kVisRadius = 3.0;
constexpr double kCoverageTau = 0.9;
constexpr double kLambdaOverlap = 2.0;
constexpr double kHubGrid = 1.0;
constexpr double kEnRouteSpacing = 0.5;

struct VisSet {
    GridKey hub;
    std::set<GridKey> visible;  // graph cells, always includes the hub
};

struct ScanTour {
    int region = -1;
    std::vector<GridKey> hubs;  // cycle order; walked open-ended
    double start_heading = 0;
    std::vector<Pose> schedule;  // per-hub look-around poses (agent z)
    double cost = 0;
    // Walk polylines between consecutive hubs, expanded from the graph.
    std::vector<std::vector<Vec3>> legs;
};

struct CaptureFrame {
    Image image;
    double rel_heading = 0;  // yaw relative to the first frame
    double pitch = 0;
    Pose pose;  // camera pose (z at eye height)
};

struct CaptureLog {
    std::vector<CaptureFrame> frames;
    Pose origin;  // first frame's pose
};

// One representative per occupied 1 m x 1 m x dz cell: the node nearest
// the cell centroid, ties to the ascending key.
std::vector<GridKey> downsample_hubs(const NavGraph& graph,
                                     const std::vector<GridKey>& region_nodes);

// Cells within radius whose eye-height sightline from the hub is clear.
VisSet visibility_set(const Scene& scene, const NavGraph& graph, GridKey hub,
                      double radius = kVisRadius);

// Greedy marginal-coverage cover until covered/|universe| >= tau.
std::vector<GridKey> greedy_set_cover(const std::vector<VisSet>& hubs,
                                      const std::set<GridKey>& universe, double tau);

using CostFn = std::function<double(GridKey, GridKey)>;

// C(u,v) = L(u,v) + lambda * (1 - IoU(Vis(u), Vis(v))), L the graph
// shortest-path length. Infinite when disconnected.
double edge_cost(GridKey u, GridKey v, const NavGraph& graph,
                 const std::map<GridKey, VisSet>& vis, double lambda = kLambdaOverlap);

// Memoizing cost closure over a fixed graph + visibility map.
CostFn make_edge_cost(const NavGraph& graph, const std::map<GridKey, VisSet>& vis,
                      double lambda = kLambdaOverlap);

// Nearest-neighbor cycle from the first hub, then best-improvement 2-opt.
ScanTour plan_tour(const std::vector<GridKey>& hubs, const NavGraph& graph,
                   const CostFn& cost);

// Displace hubs that fail the clearance audit to the nearest passing graph
// node within 1 m, dropping them otherwise (with a coverage warning).
ScanTour refine_with_safety(const ScanTour& tour, const Scene& scene, const NavGraph& graph,
                            double clearance);

// Fill legs (graph shortest paths between consecutive hubs) and the
// look-around schedule. Must run before execute_tour.
void expand_tour_paths(const NavGraph& graph, ScanTour& tour);

// Walk the tour recording the look-around sweeps (yaw 0/-60/+60 deg x
// pitch 0/-45/+45 deg, center first) and an en-route frame every 0.5 m.
CaptureLog execute_tour(const Scene& scene, const ScanTour& tour,
                        const CameraIntrinsics& cam = {});

struct TourParams {
    double tau = kCoverageTau;
    double lambda_overlap = kLambdaOverlap;
    double vis_radius = kVisRadius;
    double clearance = 0.25;
};

// Per-region pipeline: hubs -> cover -> cycle -> safety -> expansion.
std::vector<ScanTour> plan_all_tours(const Scene& scene, const NavGraph& graph,
                                     const TourParams& params = {});

// Re-audited coverage ratio of a tour's hub set over its region.
double coverage_ratio(const Scene& scene, const NavGraph& graph, const ScanTour& tour,
                      double vis_radius = kVisRadius);

std::string tour_to_json(const ScanTour& tour);
ScanTour tour_from_json(const std::string& text);

void save_capture_log(const CaptureLog& log, const std::string& dir);
CaptureLog load_capture_log(const std::string& dir);

}  // namespace antnav
