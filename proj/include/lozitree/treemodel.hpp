#pragma once

#include <deque>
#include <map>
#include <optional>

#include "lozitree/manifold.hpp"
#include "lozitree/subdivision.hpp"

namespace lozitree {

// A connected component of the clipped stable manifold inside delta: both
// endpoints on the boundary, interior inside, with its boundary touches and
// the face-degree c filled in by build_tree.
struct GammaArc {
    size_t id = 0;
    QPolyline line;
    PathParam start, end;  // interval on the stable polyline
    BoundaryParam b_start, b_end;
    std::vector<ClipTouch> touches;
    int depth_created = 0;
    size_t c = 2;      // face degree; 2 + interior touches
    size_t c_alt = 2;  // alternative convention: tangential touches discounted
};

struct GammaFamily {
    LoziParams params;
    int depth = 0;
    StableApprox stable;
    std::vector<GammaArc> arcs;
    size_t excluded_tips = 0;  // free-tip components dropped (truncation artifacts)
};

inline GammaFamily gamma_arcs(const LoziParams& P, int n, size_t budget = default_budget()) {
    GammaFamily fam;
    fam.params = P;
    fam.depth = n;
    fam.stable = grow_stable(P, n, budget);
    auto comps = clip_polyline_to_polygon(fam.stable.line, P.delta);
    for (auto& c : comps) {
        if (c.start_kind == EndpointKind::free_tip || c.end_kind == EndpointKind::free_tip) {
            ++fam.excluded_tips;
            continue;
        }
        if (c.has_boundary_overlap)
            throw InvariantViolation("gamma_arcs: stable manifold overlaps the boundary of delta");
        GammaArc a;
        a.id = fam.arcs.size();
        a.line = std::move(c.line);
        a.start = c.start;
        a.end = c.end;
        a.b_start = *c.start_b;
        a.b_end = *c.end_b;
        a.touches = std::move(c.touches);
        size_t trans = 0;
        for (auto& t : a.touches) trans += t.tangential ? 0 : 1;
        a.c = 2 + a.touches.size();
        a.c_alt = 2 + trans;
        int d = 0;
        for (size_t k = a.start.seg; k <= a.end.seg + 1 && k < fam.stable.info.size(); ++k)
            d = std::max(d, fam.stable.info[k].depth_created);
        a.depth_created = d;
        fam.arcs.push_back(std::move(a));
    }
    return fam;
}

// Bipartite face/arc incidence structure of the subdivision of delta by the
// gamma arcs. Node ids: arcs 0..A-1, faces A..A+F-1.
struct FiniteTree {
    size_t n_arcs = 0, n_faces = 0;
    std::vector<std::vector<size_t>> adj;
    Subdivision sd;

    size_t face_node(size_t f) const { return n_arcs + f; }
    bool is_arc_node(size_t v) const { return v < n_arcs; }
    size_t nodes() const { return n_arcs + n_faces; }
    size_t edges() const {
        size_t e = 0;
        for (size_t a = 0; a < n_arcs; ++a) e += adj[a].size();
        return e;
    }

    std::vector<size_t> path(size_t from, size_t to) const {
        std::vector<int> parent(nodes(), -1);
        std::deque<size_t> q{from};
        parent[from] = static_cast<int>(from);
        while (!q.empty()) {
            size_t u = q.front();
            q.pop_front();
            if (u == to) break;
            for (size_t w : adj[u])
                if (parent[w] < 0) {
                    parent[w] = static_cast<int>(u);
                    q.push_back(w);
                }
        }
        std::vector<size_t> out;
        if (parent[to] < 0) return out;
        for (size_t v = to;; v = static_cast<size_t>(parent[v])) {
            out.push_back(v);
            if (v == from) break;
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

    // Multi-source BFS distance from every node to the nearest branch
    // arc-node (degree >= 3); empty optional when no branch nodes exist.
    std::optional<std::vector<size_t>> distance_to_branch() const {
        std::vector<size_t> dist(nodes(), SIZE_MAX);
        std::deque<size_t> q;
        for (size_t a = 0; a < n_arcs; ++a)
            if (adj[a].size() >= 3) {
                dist[a] = 0;
                q.push_back(a);
            }
        if (q.empty()) return std::nullopt;
        while (!q.empty()) {
            size_t u = q.front();
            q.pop_front();
            for (size_t w : adj[u])
                if (dist[w] == SIZE_MAX) {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
        }
        return dist;
    }
};

inline FiniteTree build_tree(const GammaFamily& fam) {
    FiniteTree t;
    std::vector<QPolyline> lines;
    lines.reserve(fam.arcs.size());
    for (auto& a : fam.arcs) lines.push_back(a.line);
    try {
        t.sd = subdivide(fam.params.delta, lines);
    } catch (const UsageError& e) {
        throw InvariantViolation(std::string("build_tree: subdivision rejected the arcs: ") + e.what());
    }
    t.n_arcs = fam.arcs.size();
    t.n_faces = t.sd.faces.size();
    t.adj.assign(t.nodes(), {});
    for (size_t a = 0; a < t.n_arcs; ++a)
        for (size_t f : t.sd.arc_faces[a]) {
            t.adj[a].push_back(t.face_node(f));
            t.adj[t.face_node(f)].push_back(a);
        }
    if (!t.sd.is_tree()) throw InvariantViolation("build_tree: incidence graph is not a tree");
    return t;
}

// Fills c / c_alt of each arc from the subdivision's face degrees, checking
// the branch criterion face-degree = 2 + interior touches.
inline void reconcile_face_degrees(GammaFamily& fam, const FiniteTree& t) {
    for (size_t a = 0; a < fam.arcs.size(); ++a) {
        size_t deg = t.sd.face_degree(a);
        size_t touches = t.sd.interior_touches(a);
        if (deg != touches + 2)
            throw InvariantViolation("face degree disagrees with touch count on arc " + std::to_string(a));
        if (touches != fam.arcs[a].touches.size())
            throw InvariantViolation("clip and subdivision disagree on touches of arc " + std::to_string(a));
        fam.arcs[a].c = deg;
    }
}

struct BranchCensus {
    std::map<size_t, size_t> histogram;      // order -> count, order >= 3
    std::map<size_t, size_t> histogram_alt;  // tangential touches discounted
    size_t min_order = 0, max_order = 0;
};

inline BranchCensus branch_census(const GammaFamily& fam, const FiniteTree& t) {
    BranchCensus c;
    for (size_t a = 0; a < fam.arcs.size(); ++a) {
        size_t deg = t.adj[a].size();
        if (deg >= 3) {
            c.histogram[deg]++;
            if (c.min_order == 0 || deg < c.min_order) c.min_order = deg;
            c.max_order = std::max(c.max_order, deg);
        }
        if (fam.arcs[a].c_alt >= 3) c.histogram_alt[fam.arcs[a].c_alt]++;
    }
    return c;
}

// --- T_n polygons -------------------------------------------------------------

// A0 = [V0, V^{-1}] ∩ [X, Z^1]: the unstable corner of the triangle T0.
inline QPoint t0_corner(const LoziParams& P) {
    QPoint vm1 = lozi_inverse(P, P.V0);
    QPoint z1 = lozi_forward(P, P.Z);
    auto x = segment_intersect(P.V0, vm1, P.X, z1);
    if (x.kind != SegmentIntersection::Kind::point)
        throw InvariantViolation("T0: [V0, V^-1] does not meet [X, Z^1] in a point");
    return x.p;
}

// Triangle with vertices X, V0 and A0; stable edges [X,V0], [V0,A0] and
// unstable edge [A0, X].
inline QPolygon t0_triangle(const LoziParams& P) {
    QPolygon t;
    t.v = {P.X, P.V0, t0_corner(P)};
    t.make_ccw();
    return t;
}

struct TComponents {
    QPolygon t_polygon;                // T_n = L^{-n}(T0)
    QPoint a_pullback;                 // A^{-n} = L^{-n}(A0)
    std::vector<QPolygon> components;  // s^n_i of T_n ∩ delta
    std::vector<double> diameters;
};

inline double polygon_diameter_approx(const QPolygon& p) {
    double best = 0;
    for (size_t i = 0; i < p.v.size(); ++i)
        for (size_t j = i + 1; j < p.v.size(); ++j) best = std::max(best, distance_approx(p.v[i], p.v[j]));
    return best;
}

inline TComponents t_polygon(const LoziParams& P, int n, size_t budget = default_budget()) {
    if (n < 0) throw UsageError("t_polygon: depth must be >= 0");
    QPoint a0 = t0_corner(P);
    // stable boundary: pull the path X -> V0 -> A0 back n times with splits
    QPolyline path;
    path.v = {P.X, P.V0, a0};
    for (int k = 0; k < n; ++k) {
        QPolyline split = split_polyline_at_axis(path, AxisLine::y_zero);
        QPolyline next;
        next.v.reserve(split.v.size());
        for (auto& p : split.v) next.v.push_back(lozi_inverse(P, p));
        path = std::move(next);
        if (path.v.size() > budget) throw ResourceError("t_polygon: vertex budget exceeded", k);
    }
    TComponents out;
    out.a_pullback = path.v.back();
    // the unstable boundary [A^{-n}, X] must lie on the edge of delta through
    // Z and L(Z)
    QPoint z1 = lozi_forward(P, P.Z);
    if (orient(P.Z, z1, out.a_pullback) != 0 || !point_on_segment(out.a_pullback, P.Z, z1))
        throw InvariantViolation("t_polygon: A^{-n} left the unstable edge of delta");
    out.t_polygon.v = path.v;  // closing edge A^{-n} -> X is implicit
    out.t_polygon.make_ccw();
    for (auto& comp : polygon_intersect_convex(out.t_polygon, P.delta)) {
        out.diameters.push_back(polygon_diameter_approx(comp));
        out.components.push_back(std::move(comp));
    }
    return out;
}

// --- induced map on arcs -------------------------------------------------------

namespace detail {

// Parameters of split(S_{n-1}) vertices, expressed on S_{n-1}. Vertex j of
// S_n is the pullback of this split vertex j.
inline std::vector<PathParam> split_params(const QPolyline& prev) {
    std::vector<PathParam> out;
    out.push_back(PathParam::at_vertex(0));
    for (size_t i = 0; i + 1 < prev.v.size(); ++i) {
        int sa = prev.v[i].y.sign();
        int sb = prev.v[i + 1].y.sign();
        if (sa * sb < 0) {
            QScalar t = prev.v[i].y / (prev.v[i].y - prev.v[i + 1].y);
            out.push_back(PathParam{i, t});
        }
        out.push_back(PathParam::at_vertex(i + 1));
    }
    return out;
}

// Image on S_{n-1} of a parameter on S_n under L.
inline PathParam forward_param(const std::vector<PathParam>& sp, const QPolyline& prev, const PathParam& p) {
    const PathParam& a = sp[p.seg];
    const PathParam& b = sp[p.seg + 1];
    if (p.t.is_zero()) return a;
    QScalar ta = a.t;
    QScalar tb = b.seg == a.seg ? b.t : QScalar::from_rational(1, ta.d());
    PathParam out{a.seg, ta + p.t * (tb - ta)};
    return canonical(out, prev);
}

}  // namespace detail

struct InducedMap {
    std::vector<size_t> image;  // depth-n arc id -> depth-(n-1) arc id
};

// f(pi(gamma)) = pi(L(gamma)): for each depth-n arc the unique depth-(n-1)
// arc containing its forward image. Straddling two arcs falsifies the model
// and raises an invariant violation.
inline InducedMap induced_map(const GammaFamily& fam_n, const GammaFamily& fam_prev) {
    if (fam_n.depth != fam_prev.depth + 1) throw UsageError("induced_map: families must be at consecutive depths");
    auto sp = detail::split_params(fam_prev.stable.line);
    if (sp.size() != fam_n.stable.line.v.size())
        throw InvariantViolation("induced_map: split parameter table does not match the deeper polyline");
    InducedMap out;
    for (auto& arc : fam_n.arcs) {
        PathParam u = detail::forward_param(sp, fam_prev.stable.line, arc.start);
        PathParam v = detail::forward_param(sp, fam_prev.stable.line, arc.end);
        if (v < u) std::swap(u, v);
        bool found = false;
        for (auto& prev_arc : fam_prev.arcs) {
            bool contains = (prev_arc.start < u || prev_arc.start == u) && (v < prev_arc.end || v == prev_arc.end);
            if (contains) {
                out.image.push_back(prev_arc.id);
                found = true;
                break;
            }
            bool overlaps = prev_arc.start < v && u < prev_arc.end;
            if (overlaps && !contains)
                throw InvariantViolation("induced_map: image of arc " + std::to_string(arc.id) +
                                         " straddles arcs at the previous depth");
        }
        if (!found)
            throw InvariantViolation("induced_map: image of arc " + std::to_string(arc.id) +
                                     " is not contained in any arc at the previous depth");
    }
    return out;
}

// --- accumulation witness ------------------------------------------------------

struct AccumulationWitness {
    bool found = false;
    int depth_used = 0;
    size_t witness_a = 0, witness_b = 0;  // arc ids at depth_used, opposite sides
    double hausdorff_a = 0, hausdorff_b = 0;
};

inline double hausdorff_approx(const QPolyline& A, const QPolyline& B) {
    auto h = [](const QPolyline& P, const QPolyline& Q) {
        double worst = 0;
        for (auto& p : P.v) {
            double px = p.fx(), py = p.fy();
            double best = 1e300;
            for (size_t i = 0; i + 1 < Q.v.size(); ++i) {
                double ax = Q.v[i].fx(), ay = Q.v[i].fy();
                double bx = Q.v[i + 1].fx(), by = Q.v[i + 1].fy();
                double dx = bx - ax, dy = by - ay;
                double t = ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy);
                t = std::clamp(t, 0.0, 1.0);
                double qx = ax + t * dx, qy = ay + t * dy;
                best = std::min(best, std::hypot(px - qx, py - qy));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(h(A, B), h(B, A));
}

// Searches increasing depth for two arcs within Hausdorff distance eps of the
// arc through X, lying in the two components for it. eps is a float
// diagnostic with a 1e-9 guard band; sides are decided exactly on the tree.
inline AccumulationWitness accumulation_witness(const LoziParams& P, double eps, int max_depth,
                                                size_t budget = default_budget()) {
    AccumulationWitness w;
    for (int d = 2; d <= max_depth; ++d) {
        GammaFamily fam = gamma_arcs(P, d, budget);
        FiniteTree t = build_tree(fam);
        // the arc through X starts at the very beginning of the polyline
        size_t target = SIZE_MAX;
        for (auto& a : fam.arcs)
            if (a.start == PathParam::at_vertex(0)) target = a.id;
        if (target == SIZE_MAX) throw InvariantViolation("accumulation_witness: arc through X not found");
        if (t.adj[target].size() != 2) throw InvariantViolation("accumulation_witness: target arc is not order 2");
        size_t fa = t.adj[target][0], fb = t.adj[target][1];
        // component of each arc relative to the target: first step of the path
        double best_a = 1e300, best_b = 1e300;
        size_t arg_a = 0, arg_b = 0;
        for (auto& cand : fam.arcs) {
            if (cand.id == target) continue;
            double h = hausdorff_approx(cand.line, fam.arcs[target].line);
            if (h >= eps - 1e-9) continue;
            auto path = t.path(cand.id, target);
            if (path.size() < 2) continue;
            size_t side = path[path.size() - 2];  // face adjacent to target on this path
            if (side == fa && h < best_a) {
                best_a = h;
                arg_a = cand.id;
            } else if (side == fb && h < best_b) {
                best_b = h;
                arg_b = cand.id;
            }
        }
        if (best_a < 1e299 && best_b < 1e299) {
            w.found = true;
            w.depth_used = d;
            w.witness_a = arg_a;
            w.witness_b = arg_b;
            w.hausdorff_a = best_a;
            w.hausdorff_b = best_b;
            return w;
        }
        w.depth_used = d;
    }
    return w;
}

}  // namespace lozitree
