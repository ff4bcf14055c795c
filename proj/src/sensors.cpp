#include "antnav/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "antnav/error.hpp"
#include "antnav/rng.hpp"

namespace antnav {

RayHit raycast(const Scene& scene, const Vec3& origin, const Vec3& dir, double max_range) {
    const double h = scene.voxel_size;
    int ix = static_cast<int>(std::floor(origin.x / h));
    int iy = static_cast<int>(std::floor(origin.y / h));
    int iz = static_cast<int>(std::floor(origin.z / h));

    if (scene.occupied(ix, iy, iz)) return {0.0, ix, iy, iz, true};

    const int sx = dir.x > 0 ? 1 : -1;
    const int sy = dir.y > 0 ? 1 : -1;
    const int sz = dir.z > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    const double tdx = dir.x != 0 ? h / std::abs(dir.x) : inf;
    const double tdy = dir.y != 0 ? h / std::abs(dir.y) : inf;
    const double tdz = dir.z != 0 ? h / std::abs(dir.z) : inf;

    auto boundary = [h](double p, int i, int step) {
        return step > 0 ? (i + 1) * h - p : p - i * h;
    };
    double tx = dir.x != 0 ? boundary(origin.x, ix, sx) / std::abs(dir.x) : inf;
    double ty = dir.y != 0 ? boundary(origin.y, iy, sy) / std::abs(dir.y) : inf;
    double tz = dir.z != 0 ? boundary(origin.z, iz, sz) / std::abs(dir.z) : inf;

    double t = 0;
    while (t <= max_range) {
        if (tx <= ty && tx <= tz) {
            t = tx;
            tx += tdx;
            ix += sx;
        } else if (ty <= tz) {
            t = ty;
            ty += tdy;
            iy += sy;
        } else {
            t = tz;
            tz += tdz;
            iz += sz;
        }
        if (t > max_range) break;
        if (scene.occupied(ix, iy, iz)) return {t, ix, iy, iz, true};
        // outside the grid and moving away on every axis: no hit possible
        if ((ix < 0 && sx < 0) || (ix >= scene.nx && sx > 0) || (iy < 0 && sy < 0) ||
            (iy >= scene.ny && sy > 0) || (iz < 0 && sz < 0) || (iz >= scene.nz && sz > 0))
            break;
    }
    return {};
}

namespace {

void check_eye(const Scene& scene, const Pose& pose) {
    if (scene.occupied_at(pose.position()))
        throw AntError(ErrorKind::Config, "embedded pose: camera inside an occupied voxel");
}

}  // namespace

DepthMap raycast_depth(const Scene& scene, const Pose& pose, const CameraIntrinsics& cam) {
    cam.validate();
    check_eye(scene, pose);
    CameraBasis basis(pose);
    Vec3 eye = pose.position();
    DepthMap out(cam.width, cam.height);
    for (int v = 0; v < cam.height; ++v)
        for (int u = 0; u < cam.width; ++u) {
            Vec3 dir = basis.pixel_dir(cam, u + 0.5, v + 0.5).normalized();
            RayHit hit = raycast(scene, eye, dir);
            if (hit.hit) out.set(u, v, static_cast<float>(hit.t));
        }
    return out;
}

Image render_rgb(const Scene& scene, const Pose& pose, const CameraIntrinsics& cam) {
    cam.validate();
    check_eye(scene, pose);
    CameraBasis basis(pose);
    Vec3 eye = pose.position();
    Image out(cam.width, cam.height);
    for (int v = 0; v < cam.height; ++v)
        for (int u = 0; u < cam.width; ++u) {
            Vec3 dir = basis.pixel_dir(cam, u + 0.5, v + 0.5).normalized();
            RayHit hit = raycast(scene, eye, dir);
            if (hit.hit) out.set(u, v, scene.color_at(hit.ix, hit.iy, hit.iz));
        }
    return out;
}

DepthMap metric_depth_oracle(const Scene& scene, const Pose& pose,
                             const CameraIntrinsics& cam, const DepthNoise& noise) {
    if (noise.relative_sigma < 0 || noise.relative_sigma > 0.2)
        throw AntError(ErrorKind::Config, "relative_sigma must be in [0, 0.2]");
    DepthMap d = raycast_depth(scene, pose, cam);
    if (noise.relative_sigma == 0.0) return d;
    Rng rng = Rng::stream(noise.seed, 0xDE9741);
    const double s = noise.relative_sigma;
    for (float& v : d.depth) {
        if (!DepthMap::valid(v)) {
            rng.normal();  // keep the stream aligned regardless of holes
            continue;
        }
        // mean-one lognormal factor
        v = static_cast<float>(v * std::exp(s * rng.normal() - 0.5 * s * s));
    }
    return d;
}

std::optional<double> support_height(const Scene& scene, double x, double y, double z_query) {
    const double h = scene.voxel_size;
    int ix = static_cast<int>(std::floor(x / h));
    int iy = static_cast<int>(std::floor(y / h));
    int iz = static_cast<int>(std::floor((z_query + 0.05) / h));
    iz = std::min(iz, scene.nz - 1);
    for (; iz >= 0; --iz) {
        if (!scene.occupied(ix, iy, iz)) continue;
        double top = (iz + 1) * h;
        if (top > z_query + 0.05 + 1e-9) return std::nullopt;  // buried query
        if (z_query - top > kSupportDepth) return std::nullopt;
        return top;
    }
    return std::nullopt;
}

std::optional<double> surface_below(const Scene& scene, double x, double y, double z_from) {
    const double h = scene.voxel_size;
    int ix = static_cast<int>(std::floor(x / h));
    int iy = static_cast<int>(std::floor(y / h));
    int iz = std::min(static_cast<int>(std::floor(z_from / h)), scene.nz - 1);
    for (; iz >= 0; --iz)
        if (scene.occupied(ix, iy, iz)) return (iz + 1) * h;
    return std::nullopt;
}

std::optional<double> step_support(const Scene& scene, double x, double y, double z_from) {
    const double h = scene.voxel_size;
    int ix = static_cast<int>(std::floor(x / h));
    int iy = static_cast<int>(std::floor(y / h));
    int iz = static_cast<int>(std::floor((z_from + kStepTolerance) / h));
    iz = std::min(iz, scene.nz - 1);
    for (; iz >= 0; --iz) {
        if (!scene.occupied(ix, iy, iz)) continue;
        double top = (iz + 1) * h;
        if (top > z_from + kStepTolerance + 1e-9) continue;
        if (top < z_from - kStepTolerance - 1e-9) return std::nullopt;
        return top;
    }
    return std::nullopt;
}

bool is_traversable(const Scene& scene, const Vec3& p, double clearance) {
    if (scene.occupied_at(p)) return false;
    auto support = support_height(scene, p.x, p.y, p.z);
    if (!support) return false;

    const double h = scene.voxel_size;
    const double z_lo = *support + kStepTolerance;
    const double z_hi = *support + kAgentHeight;
    int iz0 = static_cast<int>(std::floor(z_lo / h));
    int iz1 = std::min(static_cast<int>(std::floor((z_hi - 1e-9) / h)), scene.nz - 1);
    int ix0 = static_cast<int>(std::floor((p.x - clearance) / h));
    int ix1 = static_cast<int>(std::floor((p.x + clearance) / h));
    int iy0 = static_cast<int>(std::floor((p.y - clearance) / h));
    int iy1 = static_cast<int>(std::floor((p.y + clearance) / h));
    const double r2 = clearance * clearance;
    for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy) {
            // nearest point of the cell footprint to the axis
            double cx = std::clamp(p.x, ix * h, (ix + 1) * h);
            double cy = std::clamp(p.y, iy * h, (iy + 1) * h);
            double dx = cx - p.x, dy = cy - p.y;
            if (dx * dx + dy * dy > r2) continue;
            for (int iz = iz0; iz <= iz1; ++iz)
                if (scene.occupied(ix, iy, iz)) return false;
        }
    return true;
}

bool segment_traversable(const Scene& scene, const Vec3& a, const Vec3& b, double clearance) {
    double len = distance_xy(a, b);
    int steps = std::max(1, static_cast<int>(std::ceil(len / 0.1)));
    // walk the surface: each sample steps from the previous support height,
    // so ramps are followed instead of linearly interpolated through
    double z = a.z;
    for (int i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / steps;
        Vec3 p{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, z};
        auto s = step_support(scene, p.x, p.y, z);
        if (!s) return false;
        z = *s;
        p.z = z;
        if (!is_traversable(scene, p, clearance)) return false;
    }
    return std::abs(z - b.z) <= kStepTolerance;
}

bool flood_fill_reaches(const Scene& scene, const Vec3& start, const std::vector<Vec3>& targets,
                        double clearance, double tol) {
    const double step = 0.1;
    struct Key {
        int x, y, z;
        bool operator==(const Key& o) const { return x == o.x && y == o.y && z == o.z; }
    };
    struct KeyHash {
        size_t operator()(const Key& k) const {
            return (static_cast<size_t>(k.x) * 73856093u) ^
                   (static_cast<size_t>(k.y) * 19349663u) ^
                   (static_cast<size_t>(k.z) * 83492791u);
        }
    };
    auto key_of = [&](const Vec3& p) {
        return Key{static_cast<int>(std::floor(p.x / step)),
                   static_cast<int>(std::floor(p.y / step)),
                   static_cast<int>(std::floor(p.z / step + 0.5))};
    };

    std::vector<bool> reached(targets.size(), false);
    size_t remaining = targets.size();
    if (!is_traversable(scene, start, clearance)) return false;

    std::unordered_set<Key, KeyHash> visited;
    std::deque<Vec3> queue = {start};
    visited.insert(key_of(start));
    const double dirs[4][2] = {{step, 0}, {-step, 0}, {0, step}, {0, -step}};
    while (!queue.empty() && remaining > 0) {
        Vec3 p = queue.front();
        queue.pop_front();
        for (size_t i = 0; i < targets.size(); ++i)
            if (!reached[i] && distance_xy(p, targets[i]) <= tol &&
                std::abs(p.z - targets[i].z) < 0.6) {
                reached[i] = true;
                --remaining;
            }
        for (const auto& d : dirs) {
            Vec3 q{p.x + d[0], p.y + d[1], p.z};
            auto s = step_support(scene, q.x, q.y, q.z);
            if (!s) continue;
            q.z = *s;
            Key k = key_of(q);
            if (visited.count(k)) continue;
            if (!is_traversable(scene, q, clearance)) continue;
            visited.insert(k);
            queue.push_back(q);
        }
    }
    return remaining == 0;
}

}  // namespace antnav
