#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "antnav/geometry.hpp"
#include "antnav/image.hpp"

namespace antnav {

// Fixed palette; instructions reference rooms by these tokens.
struct PaletteColor {
    const char* name;
    Rgb rgb;
};

inline constexpr std::array<PaletteColor, 8> kPalette = {{
    {"red", {255, 0, 0}},
    {"green", {0, 255, 0}},
    {"blue", {0, 0, 255}},
    {"yellow", {255, 255, 0}},
    {"cyan", {0, 255, 255}},
    {"magenta", {255, 0, 255}},
    {"white", {255, 255, 255}},
    {"gray", {128, 128, 128}},
}};

constexpr uint8_t kPaletteGray = 7;

std::optional<uint8_t> palette_index(const std::string& name);

struct Room {
    Vec3 min_corner;  // interior airspace, meters
    Vec3 max_corner;
    uint8_t wall_color;   // palette index
    uint8_t floor_color;  // palette index
    std::string label;    // color token used in instructions
    int floor = 0;

    Vec3 center() const {
        return {(min_corner.x + max_corner.x) / 2, (min_corner.y + max_corner.y) / 2,
                min_corner.z};
    }
};

// Straight ramp joining two floor levels, monotone in z along its axis.
struct StairRamp {
    int axis = 0;          // 0: rises along +x, 1: along +y
    Vec3 base;             // low-end corner (min x/y of footprint), z = lower walk level
    double run = 0;        // horizontal length, meters
    double width = 0;      // meters
    double z_top = 0;      // upper walk level
    int room_index = -1;   // ground-floor room hosting the ramp

    double height_at(double along) const {
        double t = std::min(std::max(along / run, 0.0), 1.0);
        return base.z + t * (z_top - base.z);
    }
};

struct SceneSpec {
    int rooms = 3;          // 2..6
    int floors = 1;         // 1..2
    double min_side = 8.0;  // footprint bounds, meters
    double max_side = 12.0;

    void validate() const;
};

// Immutable voxel world. Occupancy and color share one byte per cell:
// palette index when occupied, 0xFF when empty.
class Scene {
   public:
    static constexpr uint8_t kEmpty = 0xFF;
    static constexpr double kVoxel = 0.1;

    uint64_t seed = 0;
    SceneSpec spec;
    double voxel_size = kVoxel;
    int nx = 0, ny = 0, nz = 0;
    std::vector<uint8_t> cells;  // nx * ny * nz, x fastest
    std::vector<double> floor_heights;  // walk levels, ascending
    std::vector<Room> rooms;
    std::optional<StairRamp> stairs;
    Vec3 bounds_min, bounds_max;

    bool in_bounds(int ix, int iy, int iz) const {
        return ix >= 0 && iy >= 0 && iz >= 0 && ix < nx && iy < ny && iz < nz;
    }
    size_t cell_index(int ix, int iy, int iz) const {
        return (static_cast<size_t>(iz) * ny + iy) * nx + ix;
    }
    bool occupied(int ix, int iy, int iz) const {
        return in_bounds(ix, iy, iz) && cells[cell_index(ix, iy, iz)] != kEmpty;
    }
    Rgb color_at(int ix, int iy, int iz) const {
        return kPalette[cells[cell_index(ix, iy, iz)]].rgb;
    }
    bool occupied_at(const Vec3& p) const {
        return occupied(static_cast<int>(std::floor(p.x / kVoxel)),
                        static_cast<int>(std::floor(p.y / kVoxel)),
                        static_cast<int>(std::floor(p.z / kVoxel)));
    }
    void fill(int ix, int iy, int iz, uint8_t color) {
        if (in_bounds(ix, iy, iz)) cells[cell_index(ix, iy, iz)] = color;
    }
    void carve(int ix, int iy, int iz) {
        if (in_bounds(ix, iy, iz)) cells[cell_index(ix, iy, iz)] = kEmpty;
    }
};

// Deterministic procedural generator. Retries internal placement
// choices a bounded number of times, then reports an infeasible spec.
Scene generate_scene(uint64_t seed, const SceneSpec& spec);

// Scene JSON: seed + spec + derived room list. Import regenerates the
// voxel grid from (seed, spec).
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& json_text);

}  // namespace antnav
