#pragma once

// Planar geometry: SE(2) poses, convex shapes, hull distances and
// minimum-translation penetration queries.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ocp {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 rotate(Vec2 v, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into [-pi, pi).
inline double normalize_angle(double a)
{
    if (a >= -kPi && a < kPi) return a;
    if (!std::isfinite(a)) return a;
    double r = std::fmod(a + kPi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    r -= kPi;
    if (r >= kPi) r -= kTwoPi;
    if (r < -kPi) r = -kPi;
    return r;
}

/// Signed smallest rotation taking `from` onto `to`, in [-pi, pi).
inline double angle_diff(double to, double from) { return normalize_angle(to - from); }

/// Rigid planar transform. The heading is kept in [-pi, pi) at construction.
class Pose2 {
public:
    constexpr Pose2() = default;
    Pose2(double x, double y, double theta) : x_(x), y_(y), theta_(normalize_angle(theta)) {}
    Pose2(Vec2 p, double theta) : Pose2(p.x, p.y, theta) {}

    static Pose2 identity() { return {}; }

    double x() const { return x_; }
    double y() const { return y_; }
    double theta() const { return theta_; }
    Vec2 position() const { return {x_, y_}; }

    /// Body-frame point to world frame.
    Vec2 transform(Vec2 body) const
    {
        const double c = std::cos(theta_), s = std::sin(theta_);
        return {x_ + c * body.x - s * body.y, y_ + s * body.x + c * body.y};
    }

    bool operator==(const Pose2&) const = default;

private:
    double x_ = 0.0;
    double y_ = 0.0;
    double theta_ = 0.0;
};

/// a ∘ b: apply b expressed in a's frame.
inline Pose2 compose(const Pose2& a, const Pose2& b)
{
    const double c = std::cos(a.theta()), s = std::sin(a.theta());
    return {a.x() + c * b.x() - s * b.y(), a.y() + s * b.x() + c * b.y(), a.theta() + b.theta()};
}

inline Pose2 inverse(const Pose2& p)
{
    const double c = std::cos(p.theta()), s = std::sin(p.theta());
    return {-(c * p.x() + s * p.y()), s * p.x() - c * p.y(), -p.theta()};
}

/// Body-frame motion from `s` to `s_hat`: compose(s, result) == s_hat.
inline Pose2 relative_transform(const Pose2& s, const Pose2& s_hat) { return compose(inverse(s), s_hat); }

/// Linear interpolation of position and shortest-arc interpolation of heading.
inline Pose2 interpolate(const Pose2& a, const Pose2& b, double t)
{
    const Vec2 p = a.position() + (b.position() - a.position()) * t;
    return {p, a.theta() + angle_diff(b.theta(), a.theta()) * t};
}

// ---------------------------------------------------------------------------
// Shapes

struct Circle {
    double radius = 0.0;
    Vec2 center{}; ///< offset of the disc center in the body frame
};

/// Strictly convex polygon, body-frame vertices in counter-clockwise order.
struct ConvexPolygon {
    std::vector<Vec2> vertices;
};

using ConvexPart = std::variant<Circle, ConvexPolygon>;

namespace detail {

inline double polygon_area(std::span<const Vec2> v)
{
    double a = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) a += cross(v[k], v[(k + 1) % v.size()]);
    return 0.5 * a;
}

inline void validate_polygon(const ConvexPolygon& poly)
{
    const auto& v = poly.vertices;
    if (v.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    double turning = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const Vec2 e0 = v[(k + 1) % v.size()] - v[k];
        const Vec2 e1 = v[(k + 2) % v.size()] - v[(k + 1) % v.size()];
        if (e0.squared_norm() == 0.0) throw std::invalid_argument("polygon has repeated vertices");
        if (cross(e0, e1) <= 1e-15 * e0.norm() * e1.norm())
            throw std::invalid_argument("polygon must be strictly convex with counter-clockwise winding");
        turning += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    if (std::abs(turning - kTwoPi) > 1e-6) throw std::invalid_argument("polygon is self-intersecting");
}

/// Distance from the origin to the polygon boundary if the origin is inside, else 0.
inline double polygon_inradius(std::span<const Vec2> v)
{
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const Vec2 a = v[k], b = v[(k + 1) % v.size()];
        const Vec2 e = b - a;
        // signed distance of the origin to the left of the edge
        const double d = cross(e, Vec2{} - a) / e.norm();
        if (d <= 0.0) return 0.0;
        r = std::min(r, d);
    }
    return r;
}

} // namespace detail

/// Rigid body outline: one convex part, or a union of convex parts for
/// non-convex objects. Derived radii are cached at construction.
class Shape {
public:
    Shape() : Shape(circle(0.01)) {}

    static Shape circle(double radius) { return Shape({Circle{radius, {}}}); }

    static Shape polygon(std::vector<Vec2> vertices) { return Shape({ConvexPolygon{std::move(vertices)}}); }

    static Shape box(double width, double height)
    {
        const double hx = 0.5 * width, hy = 0.5 * height;
        return polygon({{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}});
    }

    static Shape compound(std::vector<ConvexPart> parts) { return Shape(std::move(parts)); }

    const std::vector<ConvexPart>& parts() const { return parts_; }
    bool is_single_circle() const { return parts_.size() == 1 && std::holds_alternative<Circle>(parts_[0]); }

    /// Largest distance from the body origin to the outline.
    double circumradius() const { return circumradius_; }
    /// Radius of the largest origin-centered disc inside the outline.
    double inradius() const { return inradius_; }
    double area() const { return area_; }

    /// World-frame outline points (polygon vertices; circles sampled).
    std::vector<Vec2> outline(const Pose2& pose, int circle_samples = 16) const
    {
        std::vector<Vec2> pts;
        for (const auto& part : parts_) {
            if (const auto* c = std::get_if<Circle>(&part)) {
                for (int k = 0; k < circle_samples; ++k)
                    pts.push_back(pose.transform(c->center + unit_vector(kTwoPi * k / circle_samples) * c->radius));
            } else {
                for (const Vec2& v : std::get<ConvexPolygon>(part).vertices) pts.push_back(pose.transform(v));
            }
        }
        return pts;
    }

private:
    explicit Shape(std::vector<ConvexPart> parts) : parts_(std::move(parts))
    {
        if (parts_.empty()) throw std::invalid_argument("shape needs at least one part");
        circumradius_ = 0.0;
        inradius_ = 0.0;
        area_ = 0.0;
        for (const auto& part : parts_) {
            if (const auto* c = std::get_if<Circle>(&part)) {
                if (!(c->radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
                circumradius_ = std::max(circumradius_, c->center.norm() + c->radius);
                inradius_ = std::max(inradius_, c->radius - c->center.norm());
                area_ += kPi * c->radius * c->radius;
            } else {
                const auto& poly = std::get<ConvexPolygon>(part);
                detail::validate_polygon(poly);
                for (const Vec2& v : poly.vertices) circumradius_ = std::max(circumradius_, v.norm());
                inradius_ = std::max(inradius_, detail::polygon_inradius(poly.vertices));
                area_ += detail::polygon_area(poly.vertices);
            }
        }
    }

    std::vector<ConvexPart> parts_;
    double circumradius_ = 0.0;
    double inradius_ = 0.0;
    double area_ = 0.0;
};

// ---------------------------------------------------------------------------
// Workspace

struct Workspace {
    Vec2 min{-0.15, -0.15};
    Vec2 max{0.15, 0.15};
    double boundary_margin = 0.02;

    void validate() const
    {
        if (!(max.x > min.x && max.y > min.y)) throw std::invalid_argument("workspace max must exceed min");
        const double half_side = 0.5 * std::min(width(), height());
        if (!(boundary_margin >= 0.0 && boundary_margin < half_side))
            throw std::invalid_argument("workspace boundary_margin must be in [0, half the smaller side)");
    }

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    Vec2 center() const { return (min + max) * 0.5; }
    double area() const { return width() * height(); }
    /// Area inside the out-of-bounds guard band.
    double inner_area() const { return (width() - 2 * boundary_margin) * (height() - 2 * boundary_margin); }

    bool contains(Vec2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }

    /// Signed distance to the nearest edge; positive inside.
    double edge_distance(Vec2 p) const
    {
        return std::min({p.x - min.x, max.x - p.x, p.y - min.y, max.y - p.y});
    }

    bool in_guard_band(Vec2 p) const { return edge_distance(p) < boundary_margin; }
};

// ---------------------------------------------------------------------------
// Hulls and distances

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
/// Degenerate inputs return one or two points.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts)
{
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

inline double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1)
{
    const double d1 = cross(a1 - a0, b0 - a0), d2 = cross(a1 - a0, b1 - a0);
    const double d3 = cross(b1 - b0, a0 - b0), d4 = cross(b1 - b0, a1 - b0);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
    return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                     point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

/// Inclusive point-in-convex-polygon test for a CCW hull with >= 3 vertices.
inline bool hull_contains(std::span<const Vec2> hull, Vec2 p)
{
    if (hull.size() < 3) return false;
    for (std::size_t k = 0; k < hull.size(); ++k)
        if (cross(hull[(k + 1) % hull.size()] - hull[k], p - hull[k]) < 0.0) return false;
    return true;
}

/// Minimum Euclidean distance between the convex hulls of two point sets;
/// zero when the hulls touch or overlap.
inline double convex_hull_distance(std::span<const Vec2> points_a, std::span<const Vec2> points_b)
{
    if (points_a.empty() || points_b.empty()) throw std::invalid_argument("convex_hull_distance: empty point list");
    const auto ha = convex_hull({points_a.begin(), points_a.end()});
    const auto hb = convex_hull({points_b.begin(), points_b.end()});
    for (Vec2 p : ha)
        if (hull_contains(hb, p)) return 0.0;
    for (Vec2 p : hb)
        if (hull_contains(ha, p)) return 0.0;
    auto edges = [](const std::vector<Vec2>& h) {
        std::vector<std::pair<Vec2, Vec2>> e;
        if (h.size() == 1) e.emplace_back(h[0], h[0]);
        else if (h.size() == 2) e.emplace_back(h[0], h[1]);
        else
            for (std::size_t k = 0; k < h.size(); ++k) e.emplace_back(h[k], h[(k + 1) % h.size()]);
        return e;
    };
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a0, a1] : edges(ha))
        for (const auto& [b0, b1] : edges(hb)) best = std::min(best, segment_distance(a0, a1, b0, b1));
    return best;
}

// ---------------------------------------------------------------------------
// Penetration

struct Penetration {
    double depth = 0.0; ///< minimum translation distance
    Vec2 axis{};        ///< unit direction that moves B out of A
};

/// Shape placed in the world, with transformed vertices and edge normals.
/// Reused across queries so the simulator does not allocate per pair.
struct WorldShape {
    struct Part {
        bool is_circle = false;
        Vec2 center{};
        double radius = 0.0;
        std::vector<Vec2> vertices;
        std::vector<Vec2> normals;
    };

    Vec2 origin{};
    double bound = 0.0;
    std::vector<Part> parts;

    WorldShape() = default;
    WorldShape(const Shape& shape, const Pose2& pose) { update(shape, pose); }

    void update(const Shape& shape, const Pose2& pose)
    {
        origin = pose.position();
        bound = shape.circumradius();
        parts.resize(shape.parts().size());
        const double c = std::cos(pose.theta()), s = std::sin(pose.theta());
        auto xf = [&](Vec2 v) { return Vec2{origin.x + c * v.x - s * v.y, origin.y + s * v.x + c * v.y}; };
        for (std::size_t k = 0; k < parts.size(); ++k) {
            auto& out = parts[k];
            if (const auto* circ = std::get_if<Circle>(&shape.parts()[k])) {
                out.is_circle = true;
                out.center = xf(circ->center);
                out.radius = circ->radius;
                out.vertices.clear();
                out.normals.clear();
            } else {
                const auto& v = std::get<ConvexPolygon>(shape.parts()[k]).vertices;
                out.is_circle = false;
                out.vertices.resize(v.size());
                out.normals.resize(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) out.vertices[i] = xf(v[i]);
                for (std::size_t i = 0; i < v.size(); ++i) {
                    const Vec2 e = out.vertices[(i + 1) % v.size()] - out.vertices[i];
                    out.normals[i] = Vec2{e.y, -e.x} / e.norm();
                }
                Vec2 sum{};
                for (Vec2 p : out.vertices) sum += p;
                out.center = sum / static_cast<double>(v.size());
            }
        }
    }

    /// Largest projection of the outline onto `dir`.
    double support(Vec2 dir) const
    {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& p : parts) {
            if (p.is_circle) best = std::max(best, dot(p.center, dir) + p.radius * dir.norm());
            else
                for (Vec2 v : p.vertices) best = std::max(best, dot(v, dir));
        }
        return best;
    }
};

namespace detail {

struct Interval {
    double lo, hi;
};

inline Interval project(const WorldShape::Part& p, Vec2 n)
{
    if (p.is_circle) {
        const double c = dot(p.center, n);
        return {c - p.radius, c + p.radius};
    }
    Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (Vec2 v : p.vertices) {
        const double d = dot(v, n);
        r.lo = std::min(r.lo, d);
        r.hi = std::max(r.hi, d);
    }
    return r;
}

/// Separating-axis test on a fixed candidate axis set. Returns false when a
/// separating axis exists.
template <class Axes>
bool sat_min_overlap(const WorldShape::Part& a, const WorldShape::Part& b, const Axes& axes, Penetration& out)
{
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_axis{1.0, 0.0};
    const Vec2 centers = b.center - a.center;
    for (Vec2 n : axes) {
        const Interval ia = project(a, n), ib = project(b, n);
        const double forward = ia.hi - ib.lo;  // move B along +n
        const double backward = ib.hi - ia.lo; // move B along -n
        const double overlap = std::min(forward, backward);
        if (overlap <= 0.0) return false;
        if (overlap < best) {
            best = overlap;
            const bool plus = forward < backward || (forward == backward && dot(centers, n) >= 0.0);
            best_axis = plus ? n : -n;
        }
    }
    out = {best, best_axis};
    return true;
}

inline std::optional<Penetration> penetrate_parts(const WorldShape::Part& a, const WorldShape::Part& b)
{
    if (a.is_circle && b.is_circle) {
        const Vec2 d = b.center - a.center;
        const double len = d.norm();
        const double depth = a.radius + b.radius - len;
        if (depth <= 0.0) return std::nullopt;
        return Penetration{depth, len > 0.0 ? d / len : Vec2{1.0, 0.0}};
    }
    if (a.is_circle != b.is_circle) {
        const auto& poly = a.is_circle ? b : a;
        const auto& circ = a.is_circle ? a : b;
        thread_local std::vector<Vec2> axes;
        axes.assign(poly.normals.begin(), poly.normals.end());
        double best = std::numeric_limits<double>::infinity();
        Vec2 nearest{};
        for (Vec2 v : poly.vertices) {
            const double d2 = (circ.center - v).squared_norm();
            if (d2 < best) best = d2, nearest = v;
        }
        const Vec2 to_center = circ.center - nearest;
        if (to_center.squared_norm() > 0.0) axes.push_back(to_center / to_center.norm());
        Penetration p;
        if (!sat_min_overlap(a, b, axes, p)) return std::nullopt;
        return p;
    }
    thread_local std::vector<Vec2> axes;
    axes.assign(a.normals.begin(), a.normals.end());
    axes.insert(axes.end(), b.normals.begin(), b.normals.end());
    Penetration p;
    if (!sat_min_overlap(a, b, axes, p)) return std::nullopt;
    return p;
}

} // namespace detail

/// Deepest part-pair penetration between two placed shapes, or nullopt when
/// they are separated or merely touching.
inline std::optional<Penetration> penetration(const WorldShape& a, const WorldShape& b)
{
    if ((b.origin - a.origin).squared_norm() >= (a.bound + b.bound) * (a.bound + b.bound)) return std::nullopt;
    std::optional<Penetration> best;
    for (const auto& pa : a.parts)
        for (const auto& pb : b.parts)
            if (auto p = detail::penetrate_parts(pa, pb); p && (!best || p->depth > best->depth)) best = p;
    return best;
}

inline std::optional<Penetration> penetration(const Shape& shape_a, const Pose2& pose_a, const Shape& shape_b,
                                              const Pose2& pose_b)
{
    return penetration(WorldShape(shape_a, pose_a), WorldShape(shape_b, pose_b));
}

} // namespace ocp
