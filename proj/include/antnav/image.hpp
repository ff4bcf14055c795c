#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace antnav {

using Rgb = std::array<uint8_t, 3>;

// Row-major RGB raster, channel order fixed R,G,B.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // 3 * width * height

    Image() = default;
    Image(int w, int h, Rgb fill = {0, 0, 0}) : width(w), height(h), pixels(3ull * w * h) {
        for (size_t i = 0; i < pixels.size(); i += 3) {
            pixels[i] = fill[0];
            pixels[i + 1] = fill[1];
            pixels[i + 2] = fill[2];
        }
    }

    Rgb at(int x, int y) const {
        size_t i = 3ull * (static_cast<size_t>(y) * width + x);
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        size_t i = 3ull * (static_cast<size_t>(y) * width + x);
        pixels[i] = c[0];
        pixels[i + 1] = c[1];
        pixels[i + 2] = c[2];
    }
    bool operator==(const Image& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

// Row-major depth raster in meters. Negative sentinel marks missing rays.
struct DepthMap {
    static constexpr float kSentinel = -1.0f;

    int width = 0;
    int height = 0;
    std::vector<float> depth;

    DepthMap() = default;
    DepthMap(int w, int h) : width(w), height(h), depth(static_cast<size_t>(w) * h, kSentinel) {}

    float at(int x, int y) const { return depth[static_cast<size_t>(y) * width + x]; }
    void set(int x, int y, float d) { depth[static_cast<size_t>(y) * width + x] = d; }
    static bool valid(float d) { return d >= 0.0f; }
};

// Binary PPM (P6, maxval 255), bit-exact round trip.
void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);
std::string encode_ppm(const Image& img);
Image decode_ppm(const std::string& data);

// Raw depth dump: little-endian {width:u32, height:u32, sentinel:f32} header
// followed by width*height float32 samples.
void write_depth_raw(const DepthMap& d, const std::string& path);
DepthMap read_depth_raw(const std::string& path);

Image resize_nearest(const Image& img, int out_w, int out_h);

// Fraction of pixels within a Euclidean RGB ball around `center`.
double color_fraction(const Image& img, Rgb center, double radius);

}  // namespace antnav
