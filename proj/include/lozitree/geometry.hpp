#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "lozitree/qscalar.hpp"

namespace lozitree {

struct QPoint {
    QScalar x, y;

    friend QPoint operator+(const QPoint& a, const QPoint& b) { return {a.x + b.x, a.y + b.y}; }
    friend QPoint operator-(const QPoint& a, const QPoint& b) { return {a.x - b.x, a.y - b.y}; }
    friend QPoint operator*(const QScalar& s, const QPoint& p) { return {s * p.x, s * p.y}; }
    friend bool operator==(const QPoint& a, const QPoint& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const QPoint& a, const QPoint& b) { return !(a == b); }

    double fx() const { return x.to_double(); }
    double fy() const { return y.to_double(); }
};

inline QScalar cross(const QPoint& u, const QPoint& v) { return u.x * v.y - u.y * v.x; }
inline QScalar dot(const QPoint& u, const QPoint& v) { return u.x * v.x + u.y * v.y; }

// Sign of the signed area of triangle (a, b, c): +1 counterclockwise.
inline int orient(const QPoint& a, const QPoint& b, const QPoint& c) { return cross(b - a, c - a).sign(); }

inline QPoint lerp(const QPoint& a, const QPoint& b, const QScalar& t) {
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

// Strict lexicographic order, x before y; used only to canonicalize.
inline bool lex_less(const QPoint& a, const QPoint& b) {
    int c = (a.x - b.x).sign();
    if (c != 0) return c < 0;
    return (a.y - b.y).sign() < 0;
}

inline bool point_on_segment(const QPoint& p, const QPoint& a, const QPoint& b) {
    if (orient(a, b, p) != 0) return false;
    return dot(p - a, b - a).sign() >= 0 && dot(p - b, a - b).sign() >= 0;
}

// --- segment intersection ---------------------------------------------------

struct SegmentIntersection {
    enum class Kind { none, point, overlap };
    Kind kind = Kind::none;
    QPoint p{};         // kind == point: the intersection; kind == overlap: one end
    QPoint p2{};        // kind == overlap: other end
    QScalar t1{}, t2{}; // kind == point: parameters on [a1,b1] and [a2,b2]
};

// Exact classification of [a1,b1] vs [a2,b2]. Degenerate (zero-length)
// segments are a usage error.
inline SegmentIntersection segment_intersect(const QPoint& a1, const QPoint& b1, const QPoint& a2, const QPoint& b2) {
    if (a1 == b1 || a2 == b2) throw UsageError("segment_intersect: degenerate segment");
    SegmentIntersection out;
    QPoint r = b1 - a1;
    QPoint s = b2 - a2;
    QScalar denom = cross(r, s);
    QPoint qp = a2 - a1;
    if (denom.sign() == 0) {
        if (cross(qp, r).sign() != 0) return out;  // parallel, disjoint lines
        // Collinear: project on r.
        QScalar rr = dot(r, r);
        QScalar t0 = dot(qp, r) / rr;
        QScalar t1 = dot(b2 - a1, r) / rr;
        if (t1 < t0) std::swap(t0, t1);
        QScalar lo = t0.sign() > 0 ? t0 : QScalar::from_rational(0, t0.d());
        QScalar hi = t1 < QScalar::from_rational(1, t1.d()) ? t1 : QScalar::from_rational(1, t1.d());
        int c = (hi - lo).sign();
        if (c < 0) return out;
        if (c == 0) {
            out.kind = SegmentIntersection::Kind::point;
            out.p = lerp(a1, b1, lo);
            out.t1 = lo;
            return out;
        }
        out.kind = SegmentIntersection::Kind::overlap;
        out.p = lerp(a1, b1, lo);
        out.p2 = lerp(a1, b1, hi);
        return out;
    }
    QScalar t = cross(qp, s) / denom;
    QScalar u = cross(qp, r) / denom;
    if (t.sign() < 0 || (t - Rational(1)).sign() > 0) return out;
    if (u.sign() < 0 || (u - Rational(1)).sign() > 0) return out;
    out.kind = SegmentIntersection::Kind::point;
    out.p = lerp(a1, b1, t);
    out.t1 = t;
    out.t2 = u;
    return out;
}

// --- polyline ----------------------------------------------------------------

struct QPolyline {
    std::vector<QPoint> v;

    size_t size() const { return v.size(); }
    size_t segments() const { return v.size() < 2 ? 0 : v.size() - 1; }
    bool empty() const { return v.empty(); }
    const QPoint& operator[](size_t i) const { return v[i]; }

    double length_approx() const {
        double s = 0;
        for (size_t i = 0; i + 1 < v.size(); ++i) {
            double dx = v[i + 1].fx() - v[i].fx();
            double dy = v[i + 1].fy() - v[i].fy();
            s += std::sqrt(dx * dx + dy * dy);
        }
        return s;
    }
};

// Position along a polyline: segment index plus exact parameter in [0,1].
// Canonical form keeps t < 1 except at the very end of the line.
struct PathParam {
    size_t seg = 0;
    QScalar t{};

    static PathParam at_vertex(size_t i) { return {i, QScalar()}; }

    friend bool operator==(const PathParam& a, const PathParam& b) { return a.seg == b.seg && a.t == b.t; }
    friend bool operator<(const PathParam& a, const PathParam& b) {
        if (a.seg != b.seg) return a.seg < b.seg;
        return a.t < b.t;
    }
    friend bool operator<=(const PathParam& a, const PathParam& b) { return a == b || a < b; }
};

inline PathParam canonical(PathParam p, const QPolyline& pl) {
    if (p.t == QScalar::from_rational(1, p.t.d()) && p.seg + 1 < pl.segments()) {
        return PathParam::at_vertex(p.seg + 1);
    }
    return p;
}

inline QPoint point_at(const QPolyline& pl, const PathParam& p) {
    if (p.t.is_zero()) return pl.v[p.seg];
    return lerp(pl.v[p.seg], pl.v[p.seg + 1], p.t);
}

enum class AxisLine { x_zero, y_zero };  // the lines x = 0 and y = 0

inline const QScalar& axis_coord(const QPoint& p, AxisLine axis) { return axis == AxisLine::x_zero ? p.x : p.y; }

// Inserts exact crossing vertices so every edge of the result lies in one
// closed half-plane of the axis. Traces the same point set.
inline QPolyline split_polyline_at_axis(const QPolyline& pl, AxisLine axis) {
    QPolyline out;
    if (pl.v.empty()) return out;
    out.v.reserve(pl.v.size() + 8);
    out.v.push_back(pl.v.front());
    for (size_t i = 0; i + 1 < pl.v.size(); ++i) {
        const QPoint& a = pl.v[i];
        const QPoint& b = pl.v[i + 1];
        int sa = axis_coord(a, axis).sign();
        int sb = axis_coord(b, axis).sign();
        if (sa * sb < 0) {
            const QScalar& ca = axis_coord(a, axis);
            const QScalar& cb = axis_coord(b, axis);
            QScalar t = ca / (ca - cb);
            QPoint m = lerp(a, b, t);
            // The crossing coordinate is exactly zero; pin it.
            if (axis == AxisLine::x_zero)
                m.x = QScalar::from_rational(0, m.x.d());
            else
                m.y = QScalar::from_rational(0, m.y.d());
            out.v.push_back(m);
        }
        out.v.push_back(b);
    }
    return out;
}

// --- polygon -----------------------------------------------------------------

struct QPolygon {
    std::vector<QPoint> v;  // closed, counterclockwise; v.front() != v.back()

    size_t size() const { return v.size(); }
    const QPoint& operator[](size_t i) const { return v[i]; }
    const QPoint& vertex(size_t i) const { return v[i % v.size()]; }

    // Twice the signed area (positive for counterclockwise).
    QScalar area2() const {
        QScalar s;
        for (size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
        return s;
    }

    void make_ccw() {
        if (area2().sign() < 0) std::reverse(v.begin(), v.end());
    }
};

enum class Location { inside, boundary, outside };

// Exact even-odd test with explicit boundary detection. Works for any simple
// polygon.
inline Location point_in_polygon(const QPoint& p, const QPolygon& poly) {
    const size_t n = poly.v.size();
    for (size_t i = 0; i < n; ++i) {
        if (point_on_segment(p, poly.v[i], poly.v[(i + 1) % n])) return Location::boundary;
    }
    bool in = false;
    for (size_t i = 0; i < n; ++i) {
        const QPoint& a = poly.v[i];
        const QPoint& b = poly.v[(i + 1) % n];
        bool ay = a.y > p.y;
        bool by = b.y > p.y;
        if (ay == by) continue;
        // x coordinate of the edge at height p.y, compared with p.x.
        QScalar t = (p.y - a.y) / (b.y - a.y);
        QScalar xc = a.x + t * (b.x - a.x);
        if (xc > p.x) in = !in;
    }
    return in ? Location::inside : Location::outside;
}

// Position on a polygon boundary: edge index plus exact parameter in [0,1).
struct BoundaryParam {
    size_t edge = 0;
    QScalar t{};

    friend bool operator==(const BoundaryParam& a, const BoundaryParam& b) { return a.edge == b.edge && a.t == b.t; }
    friend bool operator<(const BoundaryParam& a, const BoundaryParam& b) {
        if (a.edge != b.edge) return a.edge < b.edge;
        return a.t < b.t;
    }
};

// Locates p on the boundary of poly; canonicalizes edge-end hits to the next
// edge's start.
inline std::optional<BoundaryParam> boundary_param_of(const QPoint& p, const QPolygon& poly) {
    const size_t n = poly.v.size();
    for (size_t i = 0; i < n; ++i) {
        const QPoint& a = poly.v[i];
        const QPoint& b = poly.v[(i + 1) % n];
        if (!point_on_segment(p, a, b)) continue;
        QPoint d = b - a;
        QScalar t = dot(d, d).sign() != 0 ? dot(p - a, d) / dot(d, d) : QScalar();
        if (t == QScalar::from_rational(1, t.d())) return BoundaryParam{(i + 1) % n, QScalar()};
        return BoundaryParam{i, t};
    }
    return std::nullopt;
}

inline QPoint point_at_boundary(const QPolygon& poly, const BoundaryParam& bp) {
    const QPoint& a = poly.v[bp.edge];
    const QPoint& b = poly.v[(bp.edge + 1) % poly.v.size()];
    if (bp.t.is_zero()) return a;
    return lerp(a, b, bp.t);
}

// O(n^2) simplicity check, for tests and small inputs.
inline bool polyline_is_simple(const QPolyline& pl) {
    for (size_t i = 0; i + 1 < pl.v.size(); ++i) {
        if (pl.v[i] == pl.v[i + 1]) return false;
        for (size_t j = i + 1; j + 1 < pl.v.size(); ++j) {
            auto x = segment_intersect(pl.v[i], pl.v[i + 1], pl.v[j], pl.v[j + 1]);
            if (x.kind == SegmentIntersection::Kind::overlap) return false;
            if (x.kind == SegmentIntersection::Kind::point) {
                bool adjacent = (j == i + 1);
                if (adjacent) {
                    if (x.p != pl.v[j]) return false;
                } else {
                    return false;
                }
            }
        }
    }
    return true;
}

inline double distance_approx(const QPoint& a, const QPoint& b) {
    double dx = a.fx() - b.fx();
    double dy = a.fy() - b.fy();
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace lozitree
