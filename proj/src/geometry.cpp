#include "scengen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace scengen {

std::array<Vec2, 4> OrientedRect::corners() const {
    const Scalar c = std::cos(rotation), s = std::sin(rotation);
    const Vec2 ex{c * half_len, s * half_len};
    const Vec2 ey{-s * half_wid, c * half_wid};
    const Vec2 center{cx, cy};
    return {center + ex + ey, center - ex + ey, center - ex - ey, center + ex - ey};
}

OrientedRect OrientedRect::from_obstacle(const Obstacle& o, Scalar inflate) {
    OrientedRect r;
    r.cx = o.cx;
    r.cy = o.cy;
    r.half_len = o.length * 0.5 + inflate;
    r.half_wid = o.width * 0.5 + inflate;
    r.rotation = o.rotation_deg * M_PI / 180.0;
    return r;
}

namespace {

// Project corners of both rects onto an axis and test interval overlap.
bool separated_on_axis(const Vec2& axis, const std::array<Vec2, 4>& a,
                       const std::array<Vec2, 4>& b) {
    Scalar a_min = INFINITY, a_max = -INFINITY, b_min = INFINITY, b_max = -INFINITY;
    for (const Vec2& p : a) {
        Scalar t = axis.dot(p);
        a_min = std::min(a_min, t);
        a_max = std::max(a_max, t);
    }
    for (const Vec2& p : b) {
        Scalar t = axis.dot(p);
        b_min = std::min(b_min, t);
        b_max = std::max(b_max, t);
    }
    return a_max < b_min || b_max < a_min;
}

}  // namespace

bool rects_intersect(const OrientedRect& a, const OrientedRect& b) {
    const auto ca = a.corners();
    const auto cb = b.corners();
    const Scalar angles[4] = {a.rotation, a.rotation + M_PI_2, b.rotation, b.rotation + M_PI_2};
    for (Scalar ang : angles) {
        Vec2 axis{std::cos(ang), std::sin(ang)};
        if (separated_on_axis(axis, ca, cb)) return false;
    }
    return true;
}

bool point_in_rect(const Vec2& p, const OrientedRect& r) {
    const Scalar c = std::cos(r.rotation), s = std::sin(r.rotation);
    const Scalar dx = p.x() - r.cx, dy = p.y() - r.cy;
    const Scalar lx = c * dx + s * dy;
    const Scalar ly = -s * dx + c * dy;
    return std::abs(lx) <= r.half_len && std::abs(ly) <= r.half_wid;
}

Scalar point_rect_distance(const Vec2& p, const OrientedRect& r) {
    const Scalar c = std::cos(r.rotation), s = std::sin(r.rotation);
    const Scalar dx = p.x() - r.cx, dy = p.y() - r.cy;
    const Scalar lx = std::abs(c * dx + s * dy);
    const Scalar ly = std::abs(-s * dx + c * dy);
    const Scalar ox = std::max(lx - r.half_len, 0.0);
    const Scalar oy = std::max(ly - r.half_wid, 0.0);
    return std::hypot(ox, oy);
}

Polyline kappa_to_polyline(const Vector& kappas, Scalar ds, const Vec2& start, Scalar heading) {
    Polyline points;
    points.reserve(static_cast<std::size_t>(kappas.size()) + 1);
    points.push_back(start);
    Vec2 p = start;
    Scalar theta = heading;
    for (Eigen::Index i = 0; i < kappas.size(); ++i) {
        p += ds * Vec2{std::cos(theta), std::sin(theta)};
        theta += kappas[i] * ds;
        points.push_back(p);
    }
    return points;
}

namespace {

Vec2 catmull_rom(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3, Scalar t) {
    // Centripetal parameterization: knot spacing from sqrt of chord length.
    auto knot = [](const Vec2& a, const Vec2& b, Scalar prev) {
        return prev + std::sqrt((b - a).norm());
    };
    const Scalar t0 = 0;
    const Scalar t1 = knot(p0, p1, t0);
    const Scalar t2 = knot(p1, p2, t1);
    const Scalar t3 = knot(p2, p3, t2);
    const Scalar u = t1 + t * (t2 - t1);

    auto lerp = [](const Vec2& a, const Vec2& b, Scalar ta, Scalar tb, Scalar u) -> Vec2 {
        if (tb - ta < 1e-12) return a;
        Scalar w = (u - ta) / (tb - ta);
        return (1 - w) * a + w * b;
    };
    const Vec2 a1 = lerp(p0, p1, t0, t1, u);
    const Vec2 a2 = lerp(p1, p2, t1, t2, u);
    const Vec2 a3 = lerp(p2, p3, t2, t3, u);
    const Vec2 b1 = lerp(a1, a2, t0, t2, u);
    const Vec2 b2 = lerp(a2, a3, t1, t3, u);
    return lerp(b1, b2, t1, t2, u);
}

}  // namespace

Polyline smooth_spline(const Polyline& control, int samples_per_segment) {
    if (control.size() < 4)
        throw std::invalid_argument("smooth_spline: need at least 4 control points, got " +
                                    std::to_string(control.size()));
    if (samples_per_segment < 1)
        throw std::invalid_argument("smooth_spline: samples_per_segment must be >= 1");

    const std::size_t n = control.size();
    Polyline out;
    out.reserve(1 + (n - 1) * static_cast<std::size_t>(samples_per_segment));
    out.push_back(control.front());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // mirror the missing neighbor at the ends
        const Vec2 p0 = i == 0 ? 2 * control[0] - control[1] : control[i - 1];
        const Vec2 p1 = control[i];
        const Vec2 p2 = control[i + 1];
        const Vec2 p3 = i + 2 < n ? control[i + 2] : 2 * control[n - 1] - control[n - 2];
        for (int k = 1; k <= samples_per_segment; ++k) {
            Scalar t = static_cast<Scalar>(k) / samples_per_segment;
            out.push_back(t >= 1.0 ? p2 : catmull_rom(p0, p1, p2, p3, t));
        }
    }
    return out;
}

bool segments_intersect(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
    auto cross = [](const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); };
    const Vec2 r = a2 - a1, s = b2 - b1;
    const Scalar rxs = cross(r, s);
    const Vec2 qp = b1 - a1;
    const Scalar qpxr = cross(qp, r);
    constexpr Scalar eps = 1e-12;
    if (std::abs(rxs) < eps) {
        if (std::abs(qpxr) > eps) return false;  // parallel, non-collinear
        // collinear: check 1D interval overlap along r
        const Scalar rr = r.dot(r);
        if (rr < eps) return (b1 - a1).norm() < eps || (b2 - a1).norm() < eps;
        Scalar t0 = qp.dot(r) / rr;
        Scalar t1 = (b2 - a1).dot(r) / rr;
        if (t0 > t1) std::swap(t0, t1);
        return t0 <= 1.0 && t1 >= 0.0;
    }
    const Scalar t = cross(qp, s) / rxs;
    const Scalar u = qpxr / rxs;
    return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

bool path_exists(const ObstacleScene& scene, Scalar inflation, Scalar resolution) {
    const Mission& m = scene.mission;
    const int nx = static_cast<int>(std::ceil((m.x_max - m.x_min) / resolution));
    const int ny = static_cast<int>(std::ceil((m.y_max - m.y_min) / resolution));

    std::vector<OrientedRect> rects;
    rects.reserve(scene.obstacles.size());
    for (const Obstacle& o : scene.obstacles) rects.push_back(OrientedRect::from_obstacle(o, inflation));

    auto blocked = [&](int ix, int iy) {
        Vec2 p{m.x_min + (ix + 0.5) * resolution, m.y_min + (iy + 0.5) * resolution};
        for (const auto& r : rects)
            if (point_in_rect(p, r)) return true;
        return false;
    };
    auto cell_of = [&](const Vec2& p) {
        int ix = std::clamp(static_cast<int>((p.x() - m.x_min) / resolution), 0, nx - 1);
        int iy = std::clamp(static_cast<int>((p.y() - m.y_min) / resolution), 0, ny - 1);
        return std::pair{ix, iy};
    };

    const auto [sx, sy] = cell_of(m.start);
    const auto [gx, gy] = cell_of(m.goal);
    if (blocked(sx, sy) || blocked(gx, gy)) return false;

    std::vector<char> visited(static_cast<std::size_t>(nx) * ny, 0);
    auto idx = [nx](int ix, int iy) { return static_cast<std::size_t>(iy) * nx + ix; };
    std::queue<std::pair<int, int>> frontier;
    frontier.push({sx, sy});
    visited[idx(sx, sy)] = 1;
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    while (!frontier.empty()) {
        auto [ix, iy] = frontier.front();
        frontier.pop();
        if (ix == gx && iy == gy) return true;
        for (int k = 0; k < 4; ++k) {
            int jx = ix + dx[k], jy = iy + dy[k];
            if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
            if (visited[idx(jx, jy)] || blocked(jx, jy)) continue;
            visited[idx(jx, jy)] = 1;
            frontier.push({jx, jy});
        }
    }
    return false;
}

ValidityReport scene_validity(const ObstacleScene& s) {
    ValidityReport report;
    std::vector<OrientedRect> rects;
    rects.reserve(s.obstacles.size());
    for (const Obstacle& o : s.obstacles) rects.push_back(OrientedRect::from_obstacle(o));

    bool overlap = false;
    for (std::size_t i = 0; i < rects.size() && !overlap; ++i)
        for (std::size_t j = i + 1; j < rects.size() && !overlap; ++j)
            overlap = rects_intersect(rects[i], rects[j]);
    if (overlap) report.violations.push_back(Violation::ObstacleOverlap);

    if (!path_exists(s, kUavSafetyRadius, kFloodFillResolution))
        report.violations.push_back(Violation::PathBlocked);
    return report;
}

ValidityReport road_validity(const RoadSpec& r) {
    ValidityReport report;

    if ((r.kappas.array().abs() > kKappaLimit + 1e-12).any())
        report.violations.push_back(Violation::TooSharp);

    const Polyline smooth = smooth_spline(r.polyline, kRoadSmoothSamples);

    bool out = false;
    for (const Vec2& p : smooth) {
        if (p.x() < kLaneHalfWidth || p.x() > r.map_size - kLaneHalfWidth ||
            p.y() < kLaneHalfWidth || p.y() > r.map_size - kLaneHalfWidth) {
            out = true;
            break;
        }
    }
    if (out) report.violations.push_back(Violation::OutOfMap);

    bool crossing = false;
    for (std::size_t i = 0; i + 1 < smooth.size() && !crossing; ++i) {
        for (std::size_t j = i + 2; j + 1 < smooth.size(); ++j) {
            if (segments_intersect(smooth[i], smooth[i + 1], smooth[j], smooth[j + 1])) {
                crossing = true;
                break;
            }
        }
    }
    if (crossing) report.violations.push_back(Violation::SelfIntersect);
    return report;
}

Scalar polyline_length(const Polyline& p) {
    Scalar len = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) len += (p[i + 1] - p[i]).norm();
    return len;
}

PolylineProjection project_to_polyline(const Vec2& p, const Polyline& line) {
    PolylineProjection best;
    best.distance = INFINITY;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const Vec2 a = line[i], b = line[i + 1];
        const Vec2 ab = b - a;
        const Scalar len2 = ab.squaredNorm();
        Scalar t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        const Vec2 q = a + t * ab;
        const Scalar d = (p - q).norm();
        if (d < best.distance) {
            best.distance = d;
            best.point = q;
            best.segment = static_cast<Eigen::Index>(i);
        }
    }
    return best;
}

}  // namespace scengen
