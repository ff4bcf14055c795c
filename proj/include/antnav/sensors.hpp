#pragma once

#include <optional>

#include "antnav/geometry.hpp"
#include "antnav/image.hpp"
#include "antnav/scene.hpp"

namespace antnav {

// Ground-truth sensing over the voxel world. All functions are pure;
// renders may run concurrently on a shared Scene.

constexpr double kMaxRayRange = 20.0;
constexpr double kCameraHeight = 1.2;   // eye above the walk surface
constexpr double kAgentClearance = 0.25;
constexpr double kAgentHeight = 1.4;
constexpr double kStepTolerance = 0.35;  // max walkable rise within the footprint
constexpr double kSupportDepth = 0.3;    // max gap between feet and floor

struct RayHit {
    double t = -1;           // Euclidean distance to the entered voxel
    int ix = 0, iy = 0, iz = 0;
    bool hit = false;
};

// DDA march from `origin` along unit `dir`; the distance reported is the
// distance at which the ray crosses into the first occupied voxel.
RayHit raycast(const Scene& scene, const Vec3& origin, const Vec3& dir,
               double max_range = kMaxRayRange);

// Per-pixel Euclidean distance to the first occupied voxel; sentinel when
// nothing is hit within range. Throws AntError when the eye voxel is occupied.
DepthMap raycast_depth(const Scene& scene, const Pose& pose, const CameraIntrinsics& cam);

// Color of the first hit voxel per pixel; misses take background black.
Image render_rgb(const Scene& scene, const Pose& pose, const CameraIntrinsics& cam);

struct DepthNoise {
    double relative_sigma = 0.0;  // [0, 0.2]
    uint64_t seed = 0;
};

// Ground-truth depth perturbed by per-pixel mean-one lognormal factors.
// sigma 0 reproduces raycast_depth bit-exactly; sentinels pass through.
DepthMap metric_depth_oracle(const Scene& scene, const Pose& pose,
                             const CameraIntrinsics& cam, const DepthNoise& noise);

// Top of the supporting surface under (x, y) searching downward from
// z_query; empty when there is none within kSupportDepth.
std::optional<double> support_height(const Scene& scene, double x, double y, double z_query);

// Walk surface reachable by a single step from height z_from: the highest
// occupied-voxel top within +-kStepTolerance of z_from.
std::optional<double> step_support(const Scene& scene, double x, double y, double z_from);

// Top of the first occupied voxel at or below z_from, unconstrained.
std::optional<double> surface_below(const Scene& scene, double x, double y, double z_from);

// True iff an agent cylinder (radius = clearance, height kAgentHeight,
// base on the supporting floor under p) is collision-free and supported.
bool is_traversable(const Scene& scene, const Vec3& p, double clearance);

// Segment walkability: samples every 0.1 m with linearly interpolated z.
bool segment_traversable(const Scene& scene, const Vec3& a, const Vec3& b, double clearance);

// Flood fill over walkable space starting at `start` (agent z). Step size
// 0.1 m in x/y, following supported height changes up to kStepTolerance.
// Returns true when every target is reached within `tol` meters (xy).
bool flood_fill_reaches(const Scene& scene, const Vec3& start,
                        const std::vector<Vec3>& targets, double clearance,
                        double tol = 0.35);

}  // namespace antnav
