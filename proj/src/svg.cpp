#include "scengen/svg.hpp"

#include "scengen/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scengen {

namespace {

// Fixed-point pixel coordinates keep the output byte-stable.
std::string px(Scalar v) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(2);
    ss << v;
    return ss.str();
}

struct Canvas {
    std::ostringstream body;
    Scalar width = 0, height = 0;

    // world-to-pixel transform per panel
    Scalar scale = 1, ox = 0, oy = 0, world_y_max = 0;

    Scalar X(Scalar wx) const { return ox + scale * wx; }
    Scalar Y(Scalar wy) const { return oy + scale * (world_y_max - wy); }  // y grows upward

    void polyline(const std::vector<Vec2>& pts, const std::string& stroke, Scalar width_px,
                  const std::string& dash = "") {
        if (pts.size() < 2) return;
        body << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
             << px(width_px) << "\"";
        if (!dash.empty()) body << " stroke-dasharray=\"" << dash << "\"";
        body << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) body << ' ';
            body << px(X(pts[i].x())) << ',' << px(Y(pts[i].y()));
        }
        body << "\"/>\n";
    }

    void polygon(const std::vector<Vec2>& pts, const std::string& fill,
                 const std::string& stroke) {
        body << "<polygon fill=\"" << fill << "\" stroke=\"" << stroke << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) body << ' ';
            body << px(X(pts[i].x())) << ',' << px(Y(pts[i].y()));
        }
        body << "\"/>\n";
    }

    void circle(const Vec2& c, Scalar r_px, const std::string& fill) {
        body << "<circle cx=\"" << px(X(c.x())) << "\" cy=\"" << px(Y(c.y())) << "\" r=\""
             << px(r_px) << "\" fill=\"" << fill << "\"/>\n";
    }

    void text(Scalar x_px, Scalar y_px, const std::string& s) {
        body << "<text x=\"" << px(x_px) << "\" y=\"" << px(y_px)
             << "\" font-family=\"monospace\" font-size=\"11\">" << s << "</text>\n";
    }

    std::string finish() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width)
            << "\" height=\"" << px(height) << "\" viewBox=\"0 0 " << px(width) << ' '
            << px(height) << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body.str() << "</svg>\n";
        return out.str();
    }
};

void draw_scene(Canvas& canvas, const ObstacleScene& scene, const Polyline* path) {
    const Mission& m = scene.mission;
    canvas.polygon({{m.x_min, m.y_min}, {m.x_max, m.y_min}, {m.x_max, m.y_max}, {m.x_min, m.y_max}},
                   "none", "black");
    for (const Obstacle& o : scene.obstacles) {
        const auto corners = OrientedRect::from_obstacle(o).corners();
        canvas.polygon({corners.begin(), corners.end()}, "#9db8d9", "#31506e");
    }
    canvas.polyline({m.start, m.goal}, "#bbbbbb", 1.0, "4,3");
    if (path) canvas.polyline(*path, "#c23b22", 1.5);
    canvas.circle(m.start, 3.0, "#1c7c2e");
    canvas.circle(m.goal, 3.0, "#c23b22");
}

void draw_road(Canvas& canvas, const RoadSpec& road, const std::vector<Vec2>* trace) {
    canvas.polygon({{0, 0}, {road.map_size, 0}, {road.map_size, road.map_size}, {0, road.map_size}},
                   "none", "black");
    const Polyline center = smooth_spline(road.polyline, kRoadSmoothSamples);

    auto offset_line = [&center](Scalar offset) {
        Polyline out;
        out.reserve(center.size());
        for (std::size_t i = 0; i < center.size(); ++i) {
            const std::size_t a = i == 0 ? 0 : i - 1;
            const std::size_t b = i + 1 == center.size() ? i : i + 1;
            Vec2 dir = center[b] - center[a];
            const Scalar len = dir.norm();
            if (len < 1e-12) dir = Vec2{1, 0};
            else dir /= len;
            out.push_back(center[i] + offset * Vec2{-dir.y(), dir.x()});
        }
        return out;
    };
    canvas.polyline(offset_line(kLaneHalfWidth), "#31506e", 1.2);
    canvas.polyline(offset_line(-kLaneHalfWidth), "#31506e", 1.2);
    canvas.polyline(center, "#999999", 0.8, "5,4");
    if (trace) canvas.polyline(*trace, "#c23b22", 1.2);
}

constexpr Scalar kPanel = 360.0;
constexpr Scalar kMargin = 18.0;

Canvas make_canvas(int panels, Scalar world_w, Scalar world_h) {
    Canvas canvas;
    const Scalar scale = (kPanel - 2 * kMargin) / std::max(world_w, world_h);
    canvas.scale = scale;
    canvas.width = kPanel * panels;
    canvas.height = kPanel + 20.0;
    return canvas;
}

void set_panel(Canvas& canvas, int panel, Scalar world_x_min, Scalar world_y_max) {
    canvas.ox = kPanel * panel + kMargin - canvas.scale * world_x_min;
    canvas.oy = kMargin;
    canvas.world_y_max = world_y_max;
}

}  // namespace

std::string render_scene_svg(const ObstacleScene& scene, const Polyline* path) {
    const Mission& m = scene.mission;
    Canvas canvas = make_canvas(1, m.x_max - m.x_min, m.y_max - m.y_min);
    set_panel(canvas, 0, m.x_min, m.y_max);
    draw_scene(canvas, scene, path);
    return canvas.finish();
}

std::string render_road_svg(const RoadSpec& road, const std::vector<Vec2>* trace) {
    Canvas canvas = make_canvas(1, road.map_size, road.map_size);
    set_panel(canvas, 0, 0.0, road.map_size);
    draw_road(canvas, road, trace);
    return canvas.finish();
}

std::string render_traversal_svg(const VaeModel& model, int dim, int panels, std::uint64_t seed) {
    if (dim < 0 || dim >= model.latent_dim)
        throw std::invalid_argument("render_traversal_svg: dimension " + std::to_string(dim) +
                                    " out of range for latent size " +
                                    std::to_string(model.latent_dim));
    Rng rng(seed);
    Genome base;
    base.space = Space::Latent;
    base.values.resize(model.latent_dim);
    for (int i = 0; i < model.latent_dim; ++i)
        base.values[i] = std::clamp(rng.normal(), kLatentLo, kLatentHi);

    const bool is_uav = model.input_dim == kUavGenomeDim;
    Canvas canvas = is_uav ? make_canvas(panels, 80.0, 55.0) : make_canvas(panels, 200.0, 200.0);

    for (int p = 0; p < panels; ++p) {
        const Scalar value =
            kLatentLo + (kLatentHi - kLatentLo) * static_cast<Scalar>(p) /
                            static_cast<Scalar>(std::max(panels - 1, 1));
        Genome z = base;
        z.values[dim] = value;
        const Genome decoded = decode(model, z);
        if (is_uav) {
            const ObstacleScene scene = genome_to_scene(decoded);
            set_panel(canvas, p, scene.mission.x_min, scene.mission.y_max);
            draw_scene(canvas, scene, nullptr);
        } else {
            const RoadSpec road = genome_to_road(decoded);
            set_panel(canvas, p, 0.0, road.map_size);
            draw_road(canvas, road, nullptr);
        }
        canvas.text(kPanel * p + kMargin, kPanel + 12.0,
                    "z[" + std::to_string(dim) + "]=" + format_double(value));
    }
    return canvas.finish();
}

std::string render_boxplot_svg(
    const std::vector<std::pair<std::string, std::vector<Scalar>>>& groups) {
    Canvas canvas;
    const Scalar box_w = 70.0, gap = 30.0, plot_h = 300.0;
    canvas.width = kMargin * 2 + groups.size() * (box_w + gap);
    canvas.height = plot_h + 60.0;

    Scalar v_max = 1.0;
    for (const auto& [name, values] : groups)
        for (Scalar v : values) v_max = std::max(v_max, v);

    auto y_of = [&](Scalar v) { return kMargin + plot_h * (1.0 - v / v_max); };

    auto quantile = [](std::vector<Scalar> v, Scalar q) {
        std::sort(v.begin(), v.end());
        const Scalar pos = q * static_cast<Scalar>(v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<Scalar>(lo)) * (v[hi] - v[lo]);
    };

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& [name, values] = groups[gi];
        if (values.empty()) continue;
        const Scalar x0 = kMargin + gi * (box_w + gap);
        const Scalar q1 = quantile(values, 0.25);
        const Scalar q2 = quantile(values, 0.5);
        const Scalar q3 = quantile(values, 0.75);
        const Scalar lo = *std::min_element(values.begin(), values.end());
        const Scalar hi = *std::max_element(values.begin(), values.end());
        const Scalar xc = x0 + box_w / 2;

        canvas.body << "<line x1=\"" << px(xc) << "\" y1=\"" << px(y_of(lo)) << "\" x2=\""
                    << px(xc) << "\" y2=\"" << px(y_of(hi))
                    << "\" stroke=\"#31506e\" stroke-width=\"1\"/>\n";
        canvas.body << "<rect x=\"" << px(x0) << "\" y=\"" << px(y_of(q3)) << "\" width=\""
                    << px(box_w) << "\" height=\"" << px(std::max(y_of(q1) - y_of(q3), 1.0))
                    << "\" fill=\"#9db8d9\" stroke=\"#31506e\"/>\n";
        canvas.body << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y_of(q2)) << "\" x2=\""
                    << px(x0 + box_w) << "\" y2=\"" << px(y_of(q2))
                    << "\" stroke=\"#1c2f42\" stroke-width=\"2\"/>\n";
        canvas.text(x0, plot_h + kMargin + 24.0, name);
    }
    canvas.text(kMargin, plot_h + kMargin + 40.0, "max=" + format_double(v_max));
    return canvas.finish();
}

}  // namespace scengen
