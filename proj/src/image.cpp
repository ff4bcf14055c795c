#include "antnav/image.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace antnav {

std::string encode_ppm(const Image& img) {
    std::ostringstream os;
    os << "P6\n" << img.width << " " << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels.data()),
             static_cast<std::streamsize>(img.pixels.size()));
    return os.str();
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::string data = encode_ppm(img);
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

namespace {

int read_ppm_token(std::istream& is) {
    // Skips whitespace and '#' comments, per the PPM grammar.
    int c = is.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = is.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = is.get();
    }
    if (c == EOF) throw std::runtime_error("truncated PPM header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = is.get();
    }
    return value;
}

Image decode_ppm_stream(std::istream& is) {
    char magic[2] = {0, 0};
    is.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '6') throw std::runtime_error("not a P6 PPM");
    int w = read_ppm_token(is);
    int h = read_ppm_token(is);
    int maxval = read_ppm_token(is);
    if (maxval != 255) throw std::runtime_error("unsupported PPM maxval");
    Image img(w, h);
    is.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<size_t>(is.gcount()) != img.pixels.size())
        throw std::runtime_error("truncated PPM payload");
    return img;
}

}  // namespace

Image decode_ppm(const std::string& data) {
    std::istringstream is(data, std::ios::binary);
    return decode_ppm_stream(is);
}

Image read_ppm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return decode_ppm_stream(f);
}

void write_depth_raw(const DepthMap& d, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    uint32_t w = static_cast<uint32_t>(d.width), h = static_cast<uint32_t>(d.height);
    float sentinel = DepthMap::kSentinel;
    f.write(reinterpret_cast<const char*>(&w), 4);
    f.write(reinterpret_cast<const char*>(&h), 4);
    f.write(reinterpret_cast<const char*>(&sentinel), 4);
    f.write(reinterpret_cast<const char*>(d.depth.data()),
            static_cast<std::streamsize>(d.depth.size() * sizeof(float)));
}

DepthMap read_depth_raw(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    uint32_t w = 0, h = 0;
    float sentinel = 0;
    f.read(reinterpret_cast<char*>(&w), 4);
    f.read(reinterpret_cast<char*>(&h), 4);
    f.read(reinterpret_cast<char*>(&sentinel), 4);
    DepthMap d(static_cast<int>(w), static_cast<int>(h));
    f.read(reinterpret_cast<char*>(d.depth.data()),
           static_cast<std::streamsize>(d.depth.size() * sizeof(float)));
    if (!f) throw std::runtime_error("truncated depth file: " + path);
    return d;
}

Image resize_nearest(const Image& img, int out_w, int out_h) {
    if (img.width == out_w && img.height == out_h) return img;
    Image out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        int sy = static_cast<int>(static_cast<int64_t>(y) * img.height / out_h);
        for (int x = 0; x < out_w; ++x) {
            int sx = static_cast<int>(static_cast<int64_t>(x) * img.width / out_w);
            out.set(x, y, img.at(sx, sy));
        }
    }
    return out;
}

double color_fraction(const Image& img, Rgb center, double radius) {
    if (img.width == 0 || img.height == 0) return 0.0;
    const double r2 = radius * radius;
    size_t inside = 0;
    const size_t n = img.pixels.size() / 3;
    for (size_t i = 0; i < n; ++i) {
        double dr = static_cast<double>(img.pixels[3 * i]) - center[0];
        double dg = static_cast<double>(img.pixels[3 * i + 1]) - center[1];
        double db = static_cast<double>(img.pixels[3 * i + 2]) - center[2];
        if (dr * dr + dg * dg + db * db <= r2) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(n);
}

}  // namespace antnav
