#include "antnav/scene.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "antnav/error.hpp"
#include "antnav/rng.hpp"
#include "antnav/sensors.hpp"

namespace antnav {

namespace {

using json = nlohmann::json;

// Everything below works in voxel units (0.1 m). Vertical layout:
//   iz 0        ground slab, walk level 0.1
//   iz 1..23    ground-floor walls
//   iz 24       upper slab, walk level 2.5
//   iz 25..47   upper-floor walls
constexpr int kWallTop0 = 23;
constexpr int kSlab1 = 24;
constexpr int kWallTop1 = 47;
constexpr int kMinRoomVox = 30;   // 3.0 m interior side
constexpr int kDoorVox = 8;       // 0.8 m doorway
constexpr int kRampRunVox = 34;   // 3.4 m
constexpr int kRampWidthVox = 12; // 1.2 m
constexpr double kWalk0 = 0.1;
constexpr double kWalk1 = 2.5;

struct VoxRect {
    int x0, x1, y0, y1;  // half-open interior span
    int width() const { return x1 - x0; }
    int depth() const { return y1 - y0; }
    long area() const { return static_cast<long>(width()) * depth(); }
};

struct AttemptFail {};

struct Avoid {
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    bool active = false;
    bool intersects(int ax0, int ax1, int ay0, int ay1) const {
        return active && ax0 < x1 && x0 < ax1 && ay0 < y1 && y0 < ay1;
    }
};

// Guillotine partition into `count` interior rects; interior walls take a
// two-voxel band so each side can carry its own room color.
std::vector<VoxRect> partition_floor(Rng& rng, VoxRect region, int count, const Avoid& avoid) {
    std::vector<VoxRect> rects = {region};
    while (static_cast<int>(rects.size()) < count) {
        // split the largest splittable rect
        int best = -1;
        for (size_t i = 0; i < rects.size(); ++i) {
            const VoxRect& r = rects[i];
            if (std::max(r.width(), r.depth()) < 2 * kMinRoomVox + 2) continue;
            if (best < 0 || r.area() > rects[best].area()) best = static_cast<int>(i);
        }
        if (best < 0) throw AttemptFail{};
        VoxRect r = rects[best];
        bool along_x = r.width() >= r.depth();
        int lo = (along_x ? r.x0 : r.y0) + kMinRoomVox;
        int hi = (along_x ? r.x1 : r.y1) - kMinRoomVox - 2;
        int cut = -1;
        for (int tries = 0; tries < 16; ++tries) {
            int c = lo + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(hi - lo + 1)));
            bool bad = along_x ? avoid.intersects(c, c + 2, r.y0, r.y1)
                               : avoid.intersects(r.x0, r.x1, c, c + 2);
            if (!bad) {
                cut = c;
                break;
            }
        }
        if (cut < 0) throw AttemptFail{};
        VoxRect a = r, b = r;
        if (along_x) {
            a.x1 = cut;
            b.x0 = cut + 2;
        } else {
            a.y1 = cut;
            b.y0 = cut + 2;
        }
        rects[best] = a;
        rects.push_back(b);
    }
    std::sort(rects.begin(), rects.end(), [](const VoxRect& a, const VoxRect& b) {
        return a.x0 != b.x0 ? a.x0 < b.x0 : a.y0 < b.y0;
    });
    return rects;
}

struct WallShared {
    int a, b;        // room indices within the floor
    bool vertical;   // wall band runs along y (separates in x)
    int band;        // first wall voxel coordinate (band, band+1)
    int lo, hi;      // shared span along the wall
};

std::vector<WallShared> shared_walls(const std::vector<VoxRect>& rects) {
    std::vector<WallShared> out;
    for (size_t i = 0; i < rects.size(); ++i) {
        for (size_t j = i + 1; j < rects.size(); ++j) {
            const VoxRect& a = rects[i];
            const VoxRect& b = rects[j];
            if (a.x1 + 2 == b.x0 || b.x1 + 2 == a.x0) {
                int band = (a.x1 + 2 == b.x0) ? a.x1 : b.x1;
                int lo = std::max(a.y0, b.y0), hi = std::min(a.y1, b.y1);
                if (hi - lo >= kDoorVox + 6)
                    out.push_back({static_cast<int>(i), static_cast<int>(j), true, band, lo, hi});
            } else if (a.y1 + 2 == b.y0 || b.y1 + 2 == a.y0) {
                int band = (a.y1 + 2 == b.y0) ? a.y1 : b.y1;
                int lo = std::max(a.x0, b.x0), hi = std::min(a.x1, b.x1);
                if (hi - lo >= kDoorVox + 6)
                    out.push_back({static_cast<int>(i), static_cast<int>(j), false, band, lo, hi});
            }
        }
    }
    return out;
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

class Builder {
   public:
    Builder(uint64_t seed, uint64_t attempt, const SceneSpec& spec)
        : rng_(Rng::stream(seed, 0x5CE4E000 + attempt)), spec_(spec) {
        scene_.seed = seed;
        scene_.spec = spec;
    }

    Scene build() {
        int min_vox = static_cast<int>(std::lround(spec_.min_side / Scene::kVoxel));
        int max_vox = static_cast<int>(std::lround(spec_.max_side / Scene::kVoxel));
        scene_.nx = min_vox + static_cast<int>(rng_.uniform_int(max_vox - min_vox + 1));
        scene_.ny = min_vox + static_cast<int>(rng_.uniform_int(max_vox - min_vox + 1));
        scene_.nz = spec_.floors == 2 ? kWallTop1 + 1 : kWallTop0 + 1;
        scene_.cells.assign(static_cast<size_t>(scene_.nx) * scene_.ny * scene_.nz,
                            Scene::kEmpty);
        scene_.bounds_min = {0, 0, 0};
        scene_.bounds_max = {scene_.nx * Scene::kVoxel, scene_.ny * Scene::kVoxel,
                             scene_.nz * Scene::kVoxel};
        scene_.floor_heights = {kWalk0};
        if (spec_.floors == 2) scene_.floor_heights.push_back(kWalk1);

        VoxRect interior{1, scene_.nx - 1, 1, scene_.ny - 1};
        int n0 = spec_.floors == 2 ? (spec_.rooms + 1) / 2 : spec_.rooms;
        int n1 = spec_.rooms - n0;

        std::vector<VoxRect> floor0 = partition_floor(rng_, interior, n0, Avoid{});
        if (spec_.floors == 2) place_stairs(floor0);

        std::vector<VoxRect> floor1;
        if (spec_.floors == 2) floor1 = partition_floor(rng_, interior, n1, stair_avoid_);

        assign_colors(n0 + n1);
        rasterize_slabs();
        rasterize_rooms(floor0, 0);
        if (spec_.floors == 2) {
            rasterize_rooms(floor1, 1);
            rasterize_ramp();
        }
        carve_doors(floor0, 0);
        if (spec_.floors == 2) carve_doors(floor1, 1);

        audit_connectivity();
        return scene_;
    }

   private:
    void place_stairs(const std::vector<VoxRect>& rects) {
        // Need run + approach + landing along one axis and the strip plus a
        // free corridor across the other.
        int best = -1;
        long best_area = 0;
        for (size_t i = 0; i < rects.size(); ++i) {
            int along = std::max(rects[i].width(), rects[i].depth());
            int perp = std::min(rects[i].width(), rects[i].depth());
            if (along >= kRampRunVox + 13 && perp >= kRampWidthVox + 20 &&
                rects[i].area() > best_area) {
                best = static_cast<int>(i);
                best_area = rects[i].area();
            }
        }
        if (best < 0) throw AttemptFail{};
        const VoxRect& r = rects[best];
        StairRamp ramp;
        ramp.room_index = best;
        ramp.run = kRampRunVox * Scene::kVoxel;
        ramp.width = kRampWidthVox * Scene::kVoxel;
        ramp.z_top = kWalk1;
        if (r.width() >= r.depth()) {
            ramp.axis = 0;
            int sx = r.x1 - 10 - kRampRunVox;  // 1.0 m landing before the far wall
            ramp.base = {sx * Scene::kVoxel, r.y0 * Scene::kVoxel, kWalk0};
        } else {
            ramp.axis = 1;
            int sy = r.y1 - 10 - kRampRunVox;
            ramp.base = {r.x0 * Scene::kVoxel, sy * Scene::kVoxel, kWalk0};
        }
        scene_.stairs = ramp;

        // Slab opening above the ramp, dilated for head clearance.
        int sx0, sx1, sy0, sy1;
        ramp_footprint(sx0, sx1, sy0, sy1);
        stair_avoid_.active = true;
        if (ramp.axis == 0) {
            stair_avoid_.x0 = sx0 + carve_start_offset() - 2;
            stair_avoid_.x1 = sx1 + 2;
            stair_avoid_.y0 = sy0 - 2;
            stair_avoid_.y1 = sy1 + 5;
        } else {
            stair_avoid_.x0 = sx0 - 2;
            stair_avoid_.x1 = sx1 + 5;
            stair_avoid_.y0 = sy0 + carve_start_offset() - 2;
            stair_avoid_.y1 = sy1 + 2;
        }
    }

    void ramp_footprint(int& x0, int& x1, int& y0, int& y1) const {
        const StairRamp& s = *scene_.stairs;
        int bx = static_cast<int>(std::lround(s.base.x / Scene::kVoxel));
        int by = static_cast<int>(std::lround(s.base.y / Scene::kVoxel));
        if (s.axis == 0) {
            x0 = bx;
            x1 = bx + kRampRunVox;
            y0 = by;
            y1 = by + kRampWidthVox;
        } else {
            x0 = bx;
            x1 = bx + kRampWidthVox;
            y0 = by;
            y1 = by + kRampRunVox;
        }
    }

    // First along-axis voxel whose surface is high enough to need the slab
    // opened above it.
    int carve_start_offset() const {
        for (int u = 0; u < kRampRunVox; ++u) {
            double h = scene_.stairs->height_at((u + 0.5) * Scene::kVoxel);
            if (h >= 0.85) return u;
        }
        return kRampRunVox;
    }

    void assign_colors(int room_count) {
        // Distinct non-gray wall colors so instructions are unambiguous.
        std::vector<uint8_t> avail = {0, 1, 2, 3, 4, 5, 6};
        for (int i = static_cast<int>(avail.size()) - 1; i > 0; --i) {
            int j = static_cast<int>(rng_.uniform_int(i + 1));
            std::swap(avail[i], avail[j]);
        }
        wall_colors_.assign(avail.begin(), avail.begin() + room_count);
    }

    void rasterize_slabs() {
        for (int iy = 0; iy < scene_.ny; ++iy)
            for (int ix = 0; ix < scene_.nx; ++ix) {
                scene_.fill(ix, iy, 0, kPaletteGray);
                if (spec_.floors == 2) scene_.fill(ix, iy, kSlab1, kPaletteGray);
            }
    }

    void rasterize_rooms(const std::vector<VoxRect>& rects, int floor) {
        int z0 = floor == 0 ? 1 : kSlab1 + 1;
        int z1 = floor == 0 ? kWallTop0 : kWallTop1;
        if (spec_.floors == 2 && floor == 0) z1 = kSlab1 - 1;
        for (size_t i = 0; i < rects.size(); ++i) {
            const VoxRect& r = rects[i];
            uint8_t color = wall_colors_[room_base_[floor] + i];
            for (int ix = r.x0 - 1; ix <= r.x1; ++ix)
                for (int iz = z0; iz <= z1; ++iz) {
                    scene_.fill(ix, r.y0 - 1, iz, color);
                    scene_.fill(ix, r.y1, iz, color);
                }
            for (int iy = r.y0 - 1; iy <= r.y1; ++iy)
                for (int iz = z0; iz <= z1; ++iz) {
                    scene_.fill(r.x0 - 1, iy, iz, color);
                    scene_.fill(r.x1, iy, iz, color);
                }

            Room room;
            room.wall_color = color;
            room.floor_color = kPaletteGray;
            room.label = kPalette[color].name;
            room.floor = floor;
            double walk = floor == 0 ? kWalk0 : kWalk1;
            room.min_corner = {r.x0 * Scene::kVoxel, r.y0 * Scene::kVoxel, walk};
            room.max_corner = {r.x1 * Scene::kVoxel, r.y1 * Scene::kVoxel,
                               walk + (z1 - z0 + 1) * Scene::kVoxel};
            scene_.rooms.push_back(room);
        }
        if (floor == 0) room_base_[1] = static_cast<int>(rects.size());
    }

    void rasterize_ramp() {
        const StairRamp& s = *scene_.stairs;
        int fx0, fx1, fy0, fy1;
        ramp_footprint(fx0, fx1, fy0, fy1);
        for (int ix = fx0; ix < fx1; ++ix)
            for (int iy = fy0; iy < fy1; ++iy) {
                double along = s.axis == 0 ? (ix + 0.5) * Scene::kVoxel - s.base.x
                                           : (iy + 0.5) * Scene::kVoxel - s.base.y;
                double h = s.height_at(along);
                int top = static_cast<int>(std::lround(h / Scene::kVoxel)) - 1;
                for (int iz = 1; iz <= std::min(top, kSlab1); ++iz)
                    scene_.fill(ix, iy, iz, kPaletteGray);
            }
        // open the slab where the climb needs head room
        int off = carve_start_offset();
        int cx0 = s.axis == 0 ? fx0 + off - 2 : fx0 - 2;
        int cx1 = s.axis == 0 ? fx1 : fx1 + 2;
        int cy0 = s.axis == 1 ? fy0 + off - 2 : fy0 - 2;
        int cy1 = s.axis == 1 ? fy1 : fy1 + 2;
        for (int ix = cx0; ix < cx1; ++ix)
            for (int iy = cy0; iy < cy1; ++iy) {
                double along = s.axis == 0 ? (ix + 0.5) * Scene::kVoxel - s.base.x
                                           : (iy + 0.5) * Scene::kVoxel - s.base.y;
                double h = s.height_at(along);
                int top = static_cast<int>(std::lround(h / Scene::kVoxel)) - 1;
                if (top < kSlab1) scene_.carve(ix, iy, kSlab1);
            }

        // Exclude the ramp strip from the hosting room's interior record.
        Room& host = scene_.rooms[s.room_index];
        if (s.axis == 0)
            host.min_corner.y = (fy1 + 1) * Scene::kVoxel;
        else
            host.min_corner.x = (fx1 + 1) * Scene::kVoxel;
    }

    bool door_blocked(int floor, bool vertical, int band, int lo, int hi) const {
        if (!scene_.stairs) return false;
        int fx0, fx1, fy0, fy1;
        ramp_footprint(fx0, fx1, fy0, fy1);
        int m = 5;  // 0.5 m standoff from the ramp / stairwell
        int zx0 = fx0 - m, zx1 = fx1 + m, zy0 = fy0 - m, zy1 = fy1 + m;
        if (floor == 1) {
            zx0 = stair_avoid_.x0 - m;
            zx1 = stair_avoid_.x1 + m;
            zy0 = stair_avoid_.y0 - m;
            zy1 = stair_avoid_.y1 + m;
        }
        if (vertical) return band + 2 > zx0 && band < zx1 && lo < zy1 && zy0 < hi;
        return band + 2 > zy0 && band < zy1 && lo < zx1 && zx0 < hi;
    }

    void carve_doors(const std::vector<VoxRect>& rects, int floor) {
        auto walls = shared_walls(rects);
        if (rects.size() > 1 && walls.empty()) throw AttemptFail{};
        int z1 = floor == 0 ? (spec_.floors == 2 ? kSlab1 - 1 : kWallTop0) : kWallTop1;
        int z0 = floor == 0 ? 1 : kSlab1 + 1;

        std::vector<int> order(walls.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
            std::swap(order[i], order[rng_.uniform_int(i + 1)]);

        DisjointSet ds(static_cast<int>(rects.size()));
        int carved = 0;
        for (int pass = 0; pass < 2; ++pass) {
            for (int wi : order) {
                const WallShared& w = walls[wi];
                bool want = pass == 0 ? ds.find(w.a) != ds.find(w.b)
                                      : rng_.bernoulli(0.25);
                if (!want) continue;
                int clo = w.lo + 3, chi = w.hi - 3 - kDoorVox;
                int pos = -1;
                for (int tries = 0; tries < 12 && pos < 0; ++tries) {
                    int c = clo + static_cast<int>(rng_.uniform_int(chi - clo + 1));
                    if (!door_blocked(floor, w.vertical, w.band, c, c + kDoorVox)) pos = c;
                }
                if (pos < 0) continue;
                ds.unite(w.a, w.b);
                ++carved;
                for (int k = 0; k < kDoorVox; ++k)
                    for (int iz = z0; iz <= z1; ++iz) {
                        if (w.vertical) {
                            scene_.carve(w.band, pos + k, iz);
                            scene_.carve(w.band + 1, pos + k, iz);
                        } else {
                            scene_.carve(pos + k, w.band, iz);
                            scene_.carve(pos + k, w.band + 1, iz);
                        }
                    }
            }
        }
        // all rooms on the floor must be door-connected
        for (size_t i = 1; i < rects.size(); ++i)
            if (ds.find(0) != ds.find(static_cast<int>(i))) throw AttemptFail{};
        (void)carved;
    }

    void audit_connectivity() {
        std::vector<Vec3> targets;
        for (const Room& r : scene_.rooms) targets.push_back(r.center());
        if (targets.size() < 2) return;
        Vec3 start = targets.front();
        std::vector<Vec3> rest(targets.begin() + 1, targets.end());
        if (!flood_fill_reaches(scene_, start, rest, kAgentClearance)) throw AttemptFail{};
    }

    Rng rng_;
    SceneSpec spec_;
    Scene scene_;
    Avoid stair_avoid_;
    std::vector<uint8_t> wall_colors_;
    int room_base_[2] = {0, 0};
};

}  // namespace

void SceneSpec::validate() const {
    if (rooms < 2 || rooms > 6)
        throw AntError(ErrorKind::Config, "room count must be in [2, 6]");
    if (floors < 1 || floors > 2)
        throw AntError(ErrorKind::Config, "floor count must be in [1, 2]");
    if (!(min_side > 0) || !(max_side >= min_side))
        throw AntError(ErrorKind::Config, "scene size bounds must be positive");
}

std::optional<uint8_t> palette_index(const std::string& name) {
    for (uint8_t i = 0; i < kPalette.size(); ++i)
        if (name == kPalette[i].name) return i;
    return std::nullopt;
}

Scene generate_scene(uint64_t seed, const SceneSpec& spec) {
    spec.validate();
    for (uint64_t attempt = 0; attempt < 24; ++attempt) {
        try {
            Builder b(seed, attempt, spec);
            return b.build();
        } catch (const AttemptFail&) {
            continue;
        }
    }
    throw AntError(ErrorKind::Infeasible,
                   "infeasible spec: room placement failed after bounded retries");
}

std::string scene_to_json(const Scene& scene) {
    json j;
    j["seed"] = scene.seed;
    j["spec"] = {{"rooms", scene.spec.rooms},
                 {"floors", scene.spec.floors},
                 {"min_side", scene.spec.min_side},
                 {"max_side", scene.spec.max_side}};
    j["voxel_size"] = scene.voxel_size;
    j["floors"] = scene.floor_heights;
    j["bounds"] = {{"min", {scene.bounds_min.x, scene.bounds_min.y, scene.bounds_min.z}},
                   {"max", {scene.bounds_max.x, scene.bounds_max.y, scene.bounds_max.z}}};
    j["rooms"] = json::array();
    for (const Room& r : scene.rooms) {
        j["rooms"].push_back(
            {{"min", {r.min_corner.x, r.min_corner.y, r.min_corner.z}},
             {"max", {r.max_corner.x, r.max_corner.y, r.max_corner.z}},
             {"wall_color", kPalette[r.wall_color].name},
             {"floor_color", kPalette[r.floor_color].name},
             {"label", r.label},
             {"floor", r.floor}});
    }
    if (scene.stairs) {
        const StairRamp& s = *scene.stairs;
        j["stairs"] = {{"axis", s.axis},
                       {"base", {s.base.x, s.base.y, s.base.z}},
                       {"run", s.run},
                       {"width", s.width},
                       {"z_top", s.z_top},
                       {"room_index", s.room_index}};
    }
    return j.dump(2);
}

Scene scene_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    SceneSpec spec;
    spec.rooms = j.at("spec").at("rooms").get<int>();
    spec.floors = j.at("spec").at("floors").get<int>();
    spec.min_side = j.at("spec").at("min_side").get<double>();
    spec.max_side = j.at("spec").at("max_side").get<double>();
    return generate_scene(j.at("seed").get<uint64_t>(), spec);
}

}  // namespace antnav
