#pragma once

#include <set>

#include "lozitree/treemodel.hpp"

namespace lozitree {

// Finite rendering of the stem/level induction. Selections resolve to arcs
// when the separating witness exists at the working depth; otherwise the
// junction node (the finite shadow of the branch point, possibly a face) is
// reported and nothing is guessed.
enum class SelectStatus {
    resolved,        // unique pool arc separates Y from the stable boundary
    face_shadow,     // junction is a face node: the witness arc is ideal here
    no_candidate,    // junction arc exists but is not in the stem pool
    ambiguous,       // several pool arcs qualify; deeper data needed
    no_branch_point  // all stable boundary already blocked (degenerate Y pair)
};

struct StemSelection {
    int stage = 0;
    size_t region = 0;
    QPoint Y_a, Y_b;  // boundary pair of the E-piece, in order along L^{-k}(E)
    SelectStatus status = SelectStatus::face_shadow;
    size_t node = 0;          // junction node (arc node when resolved)
    bool fresh = false;       // first selection of this arc: level = stage
    bool touch_on_unstable_boundary = false;
};

struct StemRecord {
    int level = 0;                // stem level (selection stage + 1); B0 has level 0
    std::vector<size_t> arc_ids;  // arcs of the stem, anchor included
    size_t anchor = 0;            // anchor node (branch arc for level >= 1 stems)
};

struct BranchLevel {
    size_t arc_id = 0;
    int level = 0;
};

struct StageReport {
    int stage = 0;
    size_t regions_inside = 0;
    size_t e_pieces = 0;
    std::vector<StemSelection> selections;
};

struct StemsResult {
    int depth = 0;          // stages 0..depth
    int working_depth = 0;  // arc family depth
    GammaFamily fam;
    FiniteTree tree;
    std::vector<size_t> B0;  // spine arcs separating Z and Z^1
    size_t b0_node = 0;      // junction of Y0 with the spine
    bool b0_is_arc = false;
    std::vector<size_t> B1;  // arcs separating Y0 and the b0 node
    bool b0_meet_single_node = false;
    std::vector<StemRecord> stems;
    std::vector<BranchLevel> branch_levels;
    std::vector<StageReport> stages;
};

namespace detail {

// Face adjacent to the start of an E-piece: a point of the piece strictly
// before its first meeting with any arc or the boundary, located exactly.
inline std::optional<size_t> face_at_piece_start(const Subdivision& sd, const std::vector<QPolyline>& arcs,
                                                 const QPolyline& piece) {
    if (piece.v.size() < 2) return std::nullopt;
    const QPoint& a = piece.v[0];
    QPoint b = piece.v[1];
    // shrink [a, b] until free of arc crossings and boundary points
    Rational half(1, 2);
    for (int guard = 0; guard < 256; ++guard) {
        bool clean = true;
        for (auto& arc : arcs) {
            for (size_t i = 0; i + 1 < arc.v.size() && clean; ++i) {
                auto x = segment_intersect(a, b, arc.v[i], arc.v[i + 1]);
                if (x.kind == SegmentIntersection::Kind::none) continue;
                if (x.kind == SegmentIntersection::Kind::point && x.p == a) continue;
                clean = false;
            }
            if (!clean) break;
        }
        if (clean) break;
        b = lerp(a, b, QScalar::from_rational(half, a.x.d()));
    }
    QPoint probe = lerp(a, b, QScalar::from_rational(half, a.x.d()));
    return sd.locate_face(probe);
}

// Meet of the paths from `from` to each target: the last common node.
inline std::pair<size_t, std::vector<size_t>> junction(const FiniteTree& t, size_t from,
                                                       const std::vector<size_t>& targets) {
    std::vector<size_t> common = t.path(from, targets.front());
    for (size_t k = 1; k < targets.size(); ++k) {
        auto p = t.path(from, targets[k]);
        size_t m = std::min(common.size(), p.size());
        size_t i = 0;
        while (i < m && common[i] == p[i]) ++i;
        common.resize(i);
    }
    return {common.back(), common};
}

}  // namespace detail

// Face whose closure contains a neighborhood of corner c of delta; empty if
// an arc ends exactly at the corner.
inline std::optional<size_t> corner_face(const Subdivision& sd, const QPoint& corner) {
    for (size_t i = 0; i < sd.nodes.size(); ++i) {
        if (!(sd.nodes[i].pt == corner)) continue;
        if (!sd.nodes[i].corner) continue;
        if (sd.nodes[i].arc >= 0) return std::nullopt;
        return sd.face_after_node[i];
    }
    return std::nullopt;
}

inline StemsResult stems_and_levels(const LoziParams& P, int n, int working_depth = -1,
                                    size_t budget = default_budget()) {
    if (n < 0) throw UsageError("stems_and_levels: depth must be >= 0");
    if (working_depth < 0) working_depth = n + 2;
    StemsResult R;
    R.depth = n;
    R.working_depth = working_depth;
    R.fam = gamma_arcs(P, working_depth, budget);
    R.tree = build_tree(R.fam);
    reconcile_face_degrees(R.fam, R.tree);
    const FiniteTree& t = R.tree;
    std::vector<QPolyline> arc_lines;
    for (auto& a : R.fam.arcs) arc_lines.push_back(a.line);

    QPoint Z1 = lozi_forward(P, P.Z);
    auto fZ = corner_face(t.sd, P.Z);
    auto fZ1 = corner_face(t.sd, Z1);
    if (!fZ || !fZ1)
        throw InvariantViolation("stems: an arc ends exactly at a corner of delta; spine faces are ambiguous");

    // B0: arcs on the tree path between the corner faces of Z and Z^1.
    auto spine = t.path(t.face_node(*fZ), t.face_node(*fZ1));
    for (size_t v : spine)
        if (t.is_arc_node(v)) R.B0.push_back(v);
    StemRecord b0_stem;
    b0_stem.level = 0;
    b0_stem.arc_ids = R.B0;
    b0_stem.anchor = t.face_node(*fZ);
    R.stems.push_back(b0_stem);

    std::set<size_t> pool(R.B0.begin(), R.B0.end());
    std::map<size_t, int> level_of;  // branch arc -> level

    // E = delta ∩ y-axis, oriented from Y0 = L^{-1}(Z).
    QPoint Y0 = lozi_inverse(P, P.Z);
    QScalar ylo = P.delta.v[0].y, yhi = P.delta.v[0].y;
    for (auto& v : P.delta.v) {
        if (v.y < ylo) ylo = v.y;
        if (yhi < v.y) yhi = v.y;
    }
    QPolyline yaxis;
    yaxis.v = {{P.qs(0), yhi + Rational(1)}, {P.qs(0), ylo - Rational(1)}};
    auto ecomp = clip_polyline_to_polygon(yaxis, P.delta);
    if (ecomp.size() != 1) throw InvariantViolation("stems: delta ∩ y-axis is not a single segment");
    QPolyline E = ecomp[0].line;
    if (!(E.v.front() == Y0)) {
        std::reverse(E.v.begin(), E.v.end());
        if (!(E.v.front() == Y0)) throw InvariantViolation("stems: Y0 is not an endpoint of E");
    }

    // stage k: regions of T_k, pieces of L^{-k}(E), junction selections
    QPolyline Ek = E;
    for (int k = 0; k <= n; ++k) {
        StageReport stage;
        stage.stage = k;
        auto tc = t_polygon(P, k, budget);

        // prefix arcs of T_k: arcs whose interval ends before A^{-k}
        PathParam a_param{};
        {
            bool found = false;
            const QPolyline& S = R.fam.stable.line;
            for (size_t i = 0; i + 1 < S.v.size() && !found; ++i) {
                if (point_on_segment(tc.a_pullback, S.v[i], S.v[i + 1])) {
                    QPoint d = S.v[i + 1] - S.v[i];
                    QScalar tt = dot(tc.a_pullback - S.v[i], d) / dot(d, d);
                    a_param = canonical(PathParam{i, tt}, S);
                    found = true;
                }
            }
            if (!found) throw InvariantViolation("stems: A^{-k} not on the stable polyline; deepen working_depth");
        }
        std::vector<char> is_prefix(t.n_arcs, 0);
        for (auto& a : R.fam.arcs)
            if (a.end < a_param || a.end == a_param) is_prefix[a.id] = 1;

        // regions: components of the tree minus prefix arc nodes
        std::vector<int> region_of(t.nodes(), -1);
        int nregions = 0;
        for (size_t v = 0; v < t.nodes(); ++v) {
            if (region_of[v] >= 0) continue;
            if (t.is_arc_node(v) && is_prefix[v]) continue;
            int rid = nregions++;
            std::deque<size_t> q{v};
            region_of[v] = rid;
            while (!q.empty()) {
                size_t u = q.front();
                q.pop_front();
                for (size_t w : t.adj[u]) {
                    if (region_of[w] >= 0) continue;
                    if (t.is_arc_node(w) && is_prefix[w]) continue;
                    region_of[w] = rid;
                    q.push_back(w);
                }
            }
        }
        // interior side of each prefix arc from T_k's orientation; seeds mark
        // regions inside T_k
        int orient_sign = tc.t_polygon.area2().sign();
        std::vector<char> inside(nregions, 0), outside(nregions, 0);
        for (auto& a : R.fam.arcs) {
            if (!is_prefix[a.id]) continue;
            for (size_t piece = 0; piece + 1 < t.sd.arc_contacts[a.id].size(); ++piece) {
                auto [fl, fr] = t.sd.chord_faces(a.id, piece);
                size_t fin = orient_sign > 0 ? fl : fr;
                size_t fout = orient_sign > 0 ? fr : fl;
                inside[region_of[t.face_node(fin)]] = 1;
                outside[region_of[t.face_node(fout)]] = 1;
            }
        }
        for (int r = 0; r < nregions; ++r)
            if (inside[r] && outside[r])
                throw InvariantViolation("stems: region classified on both sides of T_" + std::to_string(k));
        stage.regions_inside = 0;
        for (int r = 0; r < nregions; ++r) stage.regions_inside += inside[r];

        // stable boundary arcs per inside region
        std::vector<std::vector<size_t>> region_sboundary(nregions);
        for (auto& a : R.fam.arcs) {
            if (!is_prefix[a.id]) continue;
            std::set<int> rs;
            for (size_t f : t.sd.arc_faces[a.id]) rs.insert(region_of[t.face_node(f)]);
            for (int r : rs)
                if (r >= 0 && inside[r]) region_sboundary[r].push_back(a.id);
        }

        // E-pieces of L^{-k}(E) within delta, split so each piece meets the
        // boundary in exactly its two endpoints
        std::vector<std::pair<QPolyline, std::pair<QPoint, QPoint>>> pieces;
        for (auto& comp : clip_polyline_to_polygon(Ek, P.delta)) {
            if (comp.start_kind == EndpointKind::free_tip || comp.end_kind == EndpointKind::free_tip) continue;
            // split at touches so every piece meets the boundary only at its ends
            std::vector<QPoint> cutpts{comp.line.v.front()};
            for (auto& touch : comp.touches) {
                cutpts.push_back(touch.point);
            }
            cutpts.push_back(comp.line.v.back());
            // walk the component splitting at the touch points
            size_t ci = 1;
            QPolyline cur;
            cur.v.push_back(comp.line.v[0]);
            for (size_t i = 1; i < comp.line.v.size(); ++i) {
                cur.v.push_back(comp.line.v[i]);
                if (ci + 1 < cutpts.size() && comp.line.v[i] == cutpts[ci]) {
                    pieces.push_back({cur, {cur.v.front(), cur.v.back()}});
                    cur = QPolyline{};
                    cur.v.push_back(comp.line.v[i]);
                    ++ci;
                }
            }
            if (cur.v.size() >= 2) pieces.push_back({cur, {cur.v.front(), cur.v.back()}});
        }
        stage.e_pieces = pieces.size();

        // group pieces by region and select
        std::map<int, std::vector<size_t>> by_region;
        std::vector<std::optional<size_t>> piece_face(pieces.size());
        for (size_t pi = 0; pi < pieces.size(); ++pi) {
            auto f = detail::face_at_piece_start(t.sd, arc_lines, pieces[pi].first);
            piece_face[pi] = f;
            if (!f) throw InvariantViolation("stems: could not locate the face at an E-piece start");
            int r = region_of[t.face_node(*f)];
            if (r < 0 || !inside[r])
                throw InvariantViolation("stems: an E-piece starts outside T_" + std::to_string(k));
            by_region[r].push_back(pi);
        }
        for (auto& [r, plist] : by_region) {
            std::set<size_t> blockers;
            for (size_t pi : plist) {
                StemSelection sel;
                sel.stage = k;
                sel.region = static_cast<size_t>(r);
                sel.Y_a = pieces[pi].second.first;
                sel.Y_b = pieces[pi].second.second;
                size_t fa = t.face_node(*piece_face[pi]);
                // unblocked stable boundary arcs
                std::vector<size_t> targets;
                for (size_t g : region_sboundary[r]) {
                    auto path = t.path(fa, g);
                    bool blocked = false;
                    for (size_t v : path)
                        if (v != g && t.is_arc_node(v) && blockers.count(v)) blocked = true;
                    if (!blocked) targets.push_back(g);
                }
                if (targets.empty()) {
                    sel.status = SelectStatus::no_branch_point;
                    stage.selections.push_back(sel);
                    continue;
                }
                auto [meet, common] = detail::junction(t, fa, targets);
                sel.node = meet;
                if (!t.is_arc_node(meet)) {
                    sel.status = SelectStatus::face_shadow;
                } else {
                    std::vector<size_t> cands;
                    for (size_t v : common)
                        if (t.is_arc_node(v) && pool.count(v)) cands.push_back(v);
                    if (cands.empty())
                        sel.status = SelectStatus::no_candidate;
                    else if (cands.size() > 1)
                        sel.status = SelectStatus::ambiguous;
                    else {
                        sel.status = SelectStatus::resolved;
                        size_t alpha = cands[0];
                        sel.node = alpha;
                        blockers.insert(alpha);
                        sel.touch_on_unstable_boundary = !R.fam.arcs[alpha].touches.empty();
                        if (!level_of.count(alpha)) {
                            level_of[alpha] = k;
                            sel.fresh = true;
                            R.branch_levels.push_back({alpha, k});
                            // new stem of level k+1: arcs separating Y and alpha
                            StemRecord st;
                            st.level = k + 1;
                            st.anchor = alpha;
                            for (size_t v : t.path(fa, alpha))
                                if (t.is_arc_node(v)) st.arc_ids.push_back(v);
                            for (size_t a : st.arc_ids) pool.insert(a);
                            R.stems.push_back(std::move(st));
                        }
                    }
                }
                if (k == 0) {
                    R.b0_node = sel.node;
                    R.b0_is_arc = sel.status == SelectStatus::resolved;
                    for (size_t v : t.path(fa, sel.node))
                        if (t.is_arc_node(v)) R.B1.push_back(v);
                    // B0 ∩ B1 must meet exactly at the junction node
                    auto pb0 = spine;
                    auto pb1 = t.path(fa, sel.node);
                    std::set<size_t> sb0(pb0.begin(), pb0.end());
                    size_t inter = 0;
                    bool node_in = false;
                    for (size_t v : pb1)
                        if (sb0.count(v)) {
                            ++inter;
                            node_in = node_in || v == sel.node;
                        }
                    R.b0_meet_single_node = inter == 1 && node_in;
                }
                stage.selections.push_back(sel);
            }
        }
        R.stages.push_back(std::move(stage));

        if (k < n) {
            QPolyline split = split_polyline_at_axis(Ek, AxisLine::y_zero);
            QPolyline next;
            next.v.reserve(split.v.size());
            for (auto& p : split.v) next.v.push_back(lozi_inverse(P, p));
            Ek = std::move(next);
        }
    }
    return R;
}

// Interleaving check: between any two branch arcs of equal level l >= 1 the
// tree path contains a branch arc of strictly smaller level. Returns the
// number of pairs checked; failures are collected.
struct InterleavingReport {
    size_t pairs_checked = 0;
    size_t violations = 0;
};

inline InterleavingReport check_interleaving(const StemsResult& R) {
    InterleavingReport rep;
    std::map<size_t, int> level_of;
    for (auto& b : R.branch_levels) level_of[b.arc_id] = b.level;
    for (size_t i = 0; i < R.branch_levels.size(); ++i) {
        for (size_t j = i + 1; j < R.branch_levels.size(); ++j) {
            int li = R.branch_levels[i].level, lj = R.branch_levels[j].level;
            if (li != lj || li < 1) continue;
            ++rep.pairs_checked;
            auto path = R.tree.path(R.branch_levels[i].arc_id, R.branch_levels[j].arc_id);
            bool ok = false;
            for (size_t v : path) {
                if (!R.tree.is_arc_node(v)) continue;
                auto it = level_of.find(v);
                if (it != level_of.end() && it->second < li) ok = true;
            }
            if (!ok) ++rep.violations;
        }
    }
    return rep;
}

}  // namespace lozitree
