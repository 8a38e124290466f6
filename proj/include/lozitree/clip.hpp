#pragma once

#include <cassert>
#include <optional>
#include <vector>

#include "lozitree/geometry.hpp"

namespace lozitree {

// A point where a polyline meets a polygon boundary.
struct BoundaryEvent {
    PathParam param;
    QPoint point;
    BoundaryParam bparam;
    bool from_overlap = false;  // endpoint of a collinear run along the boundary
};

// All meeting points of pl with the boundary of poly, sorted along pl.
// Collinear overlap runs contribute their two endpoints, flagged.
inline std::vector<BoundaryEvent> collect_boundary_events(const QPolyline& pl, const QPolygon& poly) {
    std::vector<BoundaryEvent> events;
    const size_t n = poly.v.size();
    for (size_t i = 0; i + 1 < pl.v.size(); ++i) {
        for (size_t j = 0; j < n; ++j) {
            auto x = segment_intersect(pl.v[i], pl.v[i + 1], poly.v[j], poly.v[(j + 1) % n]);
            if (x.kind == SegmentIntersection::Kind::none) continue;
            if (x.kind == SegmentIntersection::Kind::point) {
                BoundaryEvent e;
                e.param = canonical(PathParam{i, x.t1}, pl);
                e.point = x.p;
                auto bp = boundary_param_of(x.p, poly);
                assert(bp);
                e.bparam = *bp;
                events.push_back(std::move(e));
            } else {
                for (const QPoint* pt : {&x.p, &x.p2}) {
                    BoundaryEvent e;
                    QPoint d = pl.v[i + 1] - pl.v[i];
                    QScalar t = dot(*pt - pl.v[i], d) / dot(d, d);
                    e.param = canonical(PathParam{i, t}, pl);
                    e.point = *pt;
                    auto bp = boundary_param_of(*pt, poly);
                    assert(bp);
                    e.bparam = *bp;
                    e.from_overlap = true;
                    events.push_back(std::move(e));
                }
            }
        }
    }
    std::sort(events.begin(), events.end(), [](const BoundaryEvent& a, const BoundaryEvent& b) {
        if (a.param < b.param) return true;
        if (b.param < a.param) return false;
        return a.from_overlap < b.from_overlap;
    });
    // Merge duplicates (corner hits are reported by two edges).
    std::vector<BoundaryEvent> out;
    for (auto& e : events) {
        if (!out.empty() && out.back().param == e.param) {
            out.back().from_overlap = out.back().from_overlap || e.from_overlap;
            continue;
        }
        out.push_back(std::move(e));
    }
    return out;
}

enum class EndpointKind { on_boundary, free_tip };

struct ClipTouch {
    QPoint point;
    PathParam param;
    BoundaryParam bparam;
    bool tangential = true;  // false: straight pass through a boundary point (no bend)
};

struct ClippedComponent {
    QPolyline line;  // exact geometry including entry/exit points
    PathParam start, end;
    EndpointKind start_kind = EndpointKind::on_boundary;
    EndpointKind end_kind = EndpointKind::on_boundary;
    std::optional<BoundaryParam> start_b, end_b;
    std::vector<ClipTouch> touches;
    bool has_boundary_overlap = false;
};

namespace detail {

// A point of pl strictly between params a and b (a < b), staying within the
// first segment of the gap so no boundary point can be skipped.
inline QPoint gap_probe(const QPolyline& pl, const PathParam& a, const PathParam& b) {
    Rational half(1, 2);
    if (a.seg == b.seg) {
        QScalar mid = (a.t + b.t) * half;
        return point_at(pl, {a.seg, mid});
    }
    QScalar one = QScalar::from_rational(1, a.t.d());
    QScalar mid = (a.t + one) * half;
    return point_at(pl, {a.seg, mid});
}

inline bool straight_through(const QPolyline& pl, const PathParam& p) {
    if (!p.t.is_zero()) return true;  // interior of a straight segment
    size_t i = p.seg;
    if (i == 0 || i + 1 >= pl.v.size()) return false;
    QPoint u = pl.v[i] - pl.v[i - 1];
    QPoint w = pl.v[i + 1] - pl.v[i];
    return cross(u, w).sign() == 0 && dot(u, w).sign() > 0;
}

}  // namespace detail

// Maximal connected pieces of pl inside the closed polygon. Component
// endpoints are classified on-boundary or free-tip; boundary points interior
// to a component are reported as touches with a tangential flag.
inline std::vector<ClippedComponent> clip_polyline_to_polygon(const QPolyline& pl, const QPolygon& poly) {
    std::vector<ClippedComponent> out;
    if (pl.v.size() < 2) return out;
    auto events = collect_boundary_events(pl, poly);

    struct Marker {
        PathParam param;
        QPoint point;
        std::optional<BoundaryParam> bparam;
        bool overlap = false;
    };
    std::vector<Marker> ms;
    PathParam begin = PathParam::at_vertex(0);
    PathParam endp{pl.segments() - 1, QScalar::from_rational(1, Rational(0))};
    if (events.empty() || !(events.front().param == begin))
        ms.push_back({begin, pl.v.front(), std::nullopt, false});
    for (auto& e : events) ms.push_back({e.param, e.point, e.bparam, e.from_overlap});
    if (ms.back().param < endp) ms.push_back({endp, pl.v.back(), std::nullopt, false});

    ClippedComponent cur;
    bool open = false;
    auto append_vertices_between = [&](const PathParam& a, const PathParam& b) {
        // polyline vertices with param strictly inside (a, b)
        size_t first = a.t.is_zero() ? a.seg + 1 : a.seg + 1;
        for (size_t k = first; k <= b.seg; ++k) {
            PathParam vp = PathParam::at_vertex(k);
            if (a < vp && vp < b) cur.line.v.push_back(pl.v[k]);
        }
    };

    for (size_t i = 0; i + 1 < ms.size(); ++i) {
        const Marker& A = ms[i];
        const Marker& B = ms[i + 1];
        QPoint probe = detail::gap_probe(pl, A.param, B.param);
        Location loc = point_in_polygon(probe, poly);
        bool in = loc != Location::outside;
        if (in) {
            if (!open) {
                open = true;
                cur = ClippedComponent{};
                cur.start = A.param;
                cur.start_b = A.bparam;
                cur.start_kind = A.bparam ? EndpointKind::on_boundary : EndpointKind::free_tip;
                cur.line.v.push_back(A.point);
            } else if (A.bparam) {
                // interior boundary contact between two inside stretches
                ClipTouch t;
                t.point = A.point;
                t.param = A.param;
                t.bparam = *A.bparam;
                t.tangential = !detail::straight_through(pl, A.param);
                cur.touches.push_back(std::move(t));
                cur.line.v.push_back(A.point);
            }
            if (loc == Location::boundary || A.overlap || B.overlap) cur.has_boundary_overlap = true;
            append_vertices_between(A.param, B.param);
        } else if (open) {
            cur.end = A.param;
            cur.end_b = A.bparam;
            cur.end_kind = A.bparam ? EndpointKind::on_boundary : EndpointKind::free_tip;
            cur.line.v.push_back(A.point);
            out.push_back(std::move(cur));
            open = false;
        }
    }
    if (open) {
        const Marker& Z = ms.back();
        cur.end = Z.param;
        cur.end_b = Z.bparam;
        cur.end_kind = Z.bparam ? EndpointKind::on_boundary : EndpointKind::free_tip;
        cur.line.v.push_back(Z.point);
        out.push_back(std::move(cur));
    }
    // Drop consecutive duplicate vertices (entry point may equal a vertex).
    for (auto& c : out) {
        std::vector<QPoint> dedup;
        for (auto& p : c.line.v)
            if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
        c.line.v = std::move(dedup);
    }
    return out;
}

namespace detail {

// Clips a simple ring against the closed half-plane left of (A -> B),
// producing zero or more rings. Cut gaps are closed along the line by
// pairing chain endpoints whose connecting interval lies inside the ring.
inline std::vector<std::vector<QPoint>> halfplane_clip_ring(const std::vector<QPoint>& ring, const QPoint& A,
                                                            const QPoint& B) {
    const size_t n = ring.size();
    std::vector<int> side(n);
    bool any_pos = false, any_neg = false;
    for (size_t i = 0; i < n; ++i) {
        side[i] = orient(A, B, ring[i]);
        any_pos |= side[i] > 0;
        any_neg |= side[i] < 0;
    }
    if (!any_neg) return {ring};
    if (!any_pos) return {};
    // rotate so vertex 0 is strictly outside
    size_t start = 0;
    while (side[start] >= 0) ++start;
    auto at = [&](size_t k) -> const QPoint& { return ring[(start + k) % n]; };
    auto sd = [&](size_t k) { return side[(start + k) % n]; };

    struct Chain {
        std::vector<QPoint> pts;
    };
    std::vector<Chain> chains;
    QPoint dir = B - A;
    auto line_cross = [&](const QPoint& u, const QPoint& w) {
        // exact intersection of (u, w) with the line through A, B
        QScalar cu = cross(dir, u - A);
        QScalar cw = cross(dir, w - A);
        QScalar t = cu / (cu - cw);
        return lerp(u, w, t);
    };
    Chain cur;
    bool open = false;
    for (size_t k = 0; k < n; ++k) {
        const QPoint& u = at(k);
        const QPoint& w = at(k + 1);
        int su = sd(k), sw = sd((k + 1) % n);
        if (su < 0 && sw >= 0) {  // entering
            cur = Chain{};
            open = true;
            cur.pts.push_back(sw == 0 ? w : line_cross(u, w));
            if (sw > 0) cur.pts.push_back(w);
        } else if (su >= 0 && sw < 0) {  // leaving
            if (!open) throw InvariantViolation("halfplane_clip_ring: unbalanced exit");
            QPoint x = su == 0 ? u : line_cross(u, w);
            if (!(cur.pts.back() == x)) cur.pts.push_back(x);
            chains.push_back(std::move(cur));
            open = false;
        } else if (su >= 0 && sw >= 0) {
            if (open && !(cur.pts.back() == w)) cur.pts.push_back(w);
        }
    }
    if (open) throw InvariantViolation("halfplane_clip_ring: unterminated chain");
    if (chains.empty()) return {};

    // Close chains along the cut line.
    struct End {
        QScalar pos;       // parameter along dir
        size_t chain;
        bool is_start;
    };
    std::vector<End> ends;
    QScalar dd = dot(dir, dir);
    for (size_t c = 0; c < chains.size(); ++c) {
        ends.push_back({dot(chains[c].pts.front() - A, dir) / dd, c, true});
        ends.push_back({dot(chains[c].pts.back() - A, dir) / dd, c, false});
    }
    std::sort(ends.begin(), ends.end(), [](const End& a, const End& b) { return a.pos < b.pos; });
    QPolygon orig;
    orig.v = ring;
    // link[chain][0] = chain connected at its start; [1] at its end
    std::vector<std::array<int, 2>> link(chains.size(), {-1, -1});
    std::vector<std::array<int, 2>> link_end(chains.size(), {-1, -1});
    Rational half(1, 2);
    for (size_t i = 0; i + 1 < ends.size(); ++i) {
        const End& e1 = ends[i];
        const End& e2 = ends[i + 1];
        if ((e2.pos - e1.pos).sign() <= 0) continue;
        QPoint p1 = e1.is_start ? chains[e1.chain].pts.front() : chains[e1.chain].pts.back();
        QPoint p2 = e2.is_start ? chains[e2.chain].pts.front() : chains[e2.chain].pts.back();
        QPoint mid = lerp(p1, p2, QScalar::from_rational(half, p1.x.d()));
        if (point_in_polygon(mid, orig) != Location::inside) continue;
        auto& l1 = link[e1.chain][e1.is_start ? 0 : 1];
        auto& m1 = link_end[e1.chain][e1.is_start ? 0 : 1];
        auto& l2 = link[e2.chain][e2.is_start ? 0 : 1];
        auto& m2 = link_end[e2.chain][e2.is_start ? 0 : 1];
        if (l1 != -1 || l2 != -1) throw InvariantViolation("halfplane_clip_ring: endpoint closed twice");
        l1 = static_cast<int>(e2.chain);
        m1 = e2.is_start ? 0 : 1;
        l2 = static_cast<int>(e1.chain);
        m2 = e1.is_start ? 0 : 1;
    }
    for (size_t c = 0; c < chains.size(); ++c)
        if (link[c][0] == -1 || link[c][1] == -1)
            throw InvariantViolation("halfplane_clip_ring: open chain endpoint after closing");

    // Walk cycles: chain, then jump from its end-link to the next chain.
    std::vector<char> used(chains.size(), 0);
    std::vector<std::vector<QPoint>> out;
    for (size_t c0 = 0; c0 < chains.size(); ++c0) {
        if (used[c0]) continue;
        std::vector<QPoint> ringOut;
        size_t c = c0;
        int enter = 0;  // entering the chain at its start
        while (!used[c]) {
            used[c] = 1;
            auto pts = chains[c].pts;
            if (enter == 1) std::reverse(pts.begin(), pts.end());
            for (auto& p : pts)
                if (ringOut.empty() || !(ringOut.back() == p)) ringOut.push_back(std::move(p));
            int leave = 1 - enter;
            int nxt = link[c][leave];
            int nxt_end = link_end[c][leave];
            c = static_cast<size_t>(nxt);
            enter = nxt_end;
        }
        if (!ringOut.empty() && ringOut.front() == ringOut.back()) ringOut.pop_back();
        if (ringOut.size() >= 3) out.push_back(std::move(ringOut));
    }
    return out;
}

}  // namespace detail

// Exact intersection of a simple polygon with a convex polygon; returns the
// connected components (open-component semantics: pieces meeting at a single
// pinch point are separate).
inline std::vector<QPolygon> polygon_intersect_convex(const QPolygon& subject, const QPolygon& convex_clip) {
    std::vector<std::vector<QPoint>> rings{subject.v};
    const size_t m = convex_clip.v.size();
    for (size_t j = 0; j < m && !rings.empty(); ++j) {
        std::vector<std::vector<QPoint>> next;
        for (auto& r : rings) {
            auto parts = detail::halfplane_clip_ring(r, convex_clip.v[j], convex_clip.v[(j + 1) % m]);
            for (auto& p : parts) next.push_back(std::move(p));
        }
        rings = std::move(next);
    }
    std::vector<QPolygon> out;
    for (auto& r : rings) {
        QPolygon p;
        p.v = std::move(r);
        p.make_ccw();
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace lozitree
