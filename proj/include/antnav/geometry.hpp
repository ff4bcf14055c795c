#pragma once

#include <cmath>
#include <stdexcept>

namespace antnav {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Wrap an angle into [-pi, pi).
inline double normalize_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    double norm_xy() const { return std::sqrt(x * x + y * y); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }
inline double distance_xy(const Vec3& a, const Vec3& b) { return (a - b).norm_xy(); }

// Rotation about the z-axis (counterclockwise, right-handed, z up).
inline Vec3 rotate_z(const Vec3& p, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y, p.z};
}

// Agent / camera pose. yaw is counterclockwise from +x about z;
// pitch > 0 looks up. Navigation poses keep pitch = 0.
struct Pose {
    double x = 0, y = 0, z = 0;
    double yaw = 0;
    double pitch = 0;

    Vec3 position() const { return {x, y, z}; }
    Pose normalized() const {
        Pose p = *this;
        p.yaw = normalize_angle(p.yaw);
        return p;
    }
};

struct CameraIntrinsics {
    int width = 256;
    int height = 256;
    double hfov_deg = 90.0;

    void validate() const {
        if (width < 16 || height < 16)
            throw std::invalid_argument("camera dimensions must be >= 16");
        if (!(hfov_deg > 10.0 && hfov_deg < 170.0))
            throw std::invalid_argument("hfov out of (10, 170) degrees");
    }
    // Focal length in pixels, derived from width and hfov.
    double focal() const { return width / (2.0 * std::tan(deg2rad(hfov_deg) / 2.0)); }
};

// Orthonormal camera basis for a pose: forward along the view ray,
// right in the horizontal plane, up completing the frame.
struct CameraBasis {
    Vec3 forward, right, up;

    explicit CameraBasis(const Pose& pose) {
        double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
        double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
        forward = {cp * cy, cp * sy, sp};
        right = {sy, -cy, 0.0};
        up = right.cross(forward);
    }

    // World-space direction through pixel (u, v), pixel centers at
    // half-integers, v growing downward. Not normalized.
    Vec3 pixel_dir(const CameraIntrinsics& cam, double u, double v) const {
        double f = cam.focal();
        double xr = (u - cam.width / 2.0) / f;
        double yu = (cam.height / 2.0 - v) / f;
        return forward + right * xr + up * yu;
    }
};

}  // namespace antnav
