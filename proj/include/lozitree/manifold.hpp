#pragma once

#include <cstdlib>
#include <unordered_set>
#include <vector>

#include "lozitree/lozi.hpp"

namespace lozitree {

inline size_t default_budget() {
    if (const char* s = std::getenv("LOZITREE_BUDGET")) {
        long v = std::atol(s);
        if (v > 0) return static_cast<size_t>(v);
    }
    return 1'000'000;
}

// Forward-orbit bookkeeping for a vertex of the stable polyline. Every
// vertex maps under L to a vertex of the previous approximation (or to an
// axis crossing that never revisits either axis), so hits and trapping
// certificates propagate in O(1) without iterating orbits.
struct VertexInfo {
    int depth_created = 0;
    int first_hit = -1;   // forward steps to the first y-axis hit, -1 if none
    int last_hit = -1;    // forward steps to the last y-axis hit
    int trap_entry = 0;   // steps until the orbit provably stays on [X, L(V0)]
    bool tangential = false;  // lies on the y-axis yet hits it again later
};

struct StableApprox {
    LoziParams params;
    int depth = 0;
    QPolyline line;  // X = v[0], then the order along the manifold out to V^{-depth}
    std::vector<VertexInfo> info;
};

// The straight piece [X, V0] of the stable manifold. Verifies that the
// eigenline construction reproduces the closed-form V0 exactly.
inline std::pair<QPoint, QPoint> stable_segment0(const LoziParams& P) {
    QPoint dir = P.stable_dir();
    // X - X.x * (1, slope) hits the y-axis
    QScalar hit_y = P.X.y - P.X.x * dir.y;
    if (!(hit_y == P.V0.y))
        throw InvariantViolation("stable eigenline y-axis hit disagrees with the closed form V0",
                                 hit_y.str() + " vs " + P.V0.y.str());
    return {P.X, P.V0};
}

namespace detail {

// Startup certificate for the trap segment [X, L(V0)]: it has positive
// x-coordinates, sits inside [X, V0], and 0 < lambda_s < 1, so L maps it
// into itself and orbits on it never meet the y-axis again.
struct TrapSegment {
    QPoint X, V01;

    static TrapSegment certify(const LoziParams& P) {
        QPoint v01 = lozi_forward(P, P.V0);
        if (v01.x.sign() <= 0)
            throw InvariantViolation("trap certificate failed: L(V0) not in x > 0. Parameters outside M?");
        if (!point_on_segment(v01, P.X, P.V0))
            throw InvariantViolation("trap certificate failed: L(V0) not on [X, V0]");
        QScalar ls = P.lambda_stable();
        if (!(ls.sign() > 0 && (ls - Rational(1)).sign() < 0))
            throw InvariantViolation("trap certificate failed: lambda_s outside (0,1)");
        return {P.X, v01};
    }

    bool contains(const QPoint& p) const { return point_on_segment(p, X, V01); }
};

}  // namespace detail

// Grows the stable approximation by fold-split pullbacks:
// S_0 = [X, V0], S_{i+1} = L^{-1}(split(S_i at y = 0)).
inline StableApprox grow_stable(const LoziParams& P, int n, size_t budget = default_budget()) {
    if (n < 0) throw UsageError("grow_stable: depth must be >= 0");
    stable_segment0(P);            // exact eigenline/closed-form agreement
    detail::TrapSegment::certify(P);

    StableApprox S;
    S.params = P;
    S.depth = 0;
    S.line.v = {P.X, P.V0};
    S.info.resize(2);
    S.info[0] = {0, -1, -1, 0, false};
    S.info[1] = {0, 0, 0, 1, false};  // L(V0) lies on the trap segment

    for (int step = 1; step <= n; ++step) {
        const auto& v = S.line.v;
        std::vector<QPoint> nv;
        std::vector<VertexInfo> ni;
        nv.reserve(v.size() * 2);
        ni.reserve(v.size() * 2);
        auto push_from_vertex = [&](size_t i) {
            const QPoint& w = v[i];
            const VertexInfo& wi = S.info[i];
            QPoint p = lozi_inverse(P, w);
            VertexInfo pi;
            if (p == P.X) {
                nv.push_back(std::move(p));
                ni.push_back(VertexInfo{0, -1, -1, 0, false});
                return;
            }
            pi.depth_created = wi.depth_created + 1;
            if (p.x.sign() == 0) {
                pi.first_hit = 0;
                pi.last_hit = wi.last_hit >= 0 ? wi.last_hit + 1 : 0;
                pi.tangential = wi.last_hit >= 0;
            } else {
                pi.first_hit = wi.first_hit >= 0 ? wi.first_hit + 1 : -1;
                pi.last_hit = wi.last_hit >= 0 ? wi.last_hit + 1 : -1;
            }
            pi.trap_entry = wi.trap_entry + 1;
            nv.push_back(std::move(p));
            ni.push_back(pi);
        };
        auto push_from_crossing = [&](const QPoint& c, size_t i) {
            // c is an x-axis point interior to segment [v[i], v[i+1]]; its
            // forward orbit stays interior to segments and never meets the
            // y-axis, so the pullback is a basic V-point. Segment 0 is always
            // [X, V0]; its unique crossing pulls back to V0 itself.
            QPoint p = lozi_inverse(P, c);
            VertexInfo pi;
            pi.depth_created = i == 0 ? 0 : std::max(S.info[i].depth_created, S.info[i + 1].depth_created) + 1;
            pi.first_hit = 0;
            pi.last_hit = 0;
            pi.trap_entry = std::max(S.info[i].trap_entry, S.info[i + 1].trap_entry) + 1;
            nv.push_back(std::move(p));
            ni.push_back(pi);
        };
        for (size_t i = 0; i + 1 < v.size(); ++i) {
            push_from_vertex(i);
            int sa = v[i].y.sign();
            int sb = v[i + 1].y.sign();
            if (sa == 0 && sb == 0)
                throw InvariantViolation("stable polyline has a segment on the x-axis");
            if (sa * sb < 0) {
                QScalar t = v[i].y / (v[i].y - v[i + 1].y);
                QPoint c = lerp(v[i], v[i + 1], t);
                c.y = QScalar::from_rational(0, c.y.d());
                push_from_crossing(c, i);
            }
        }
        push_from_vertex(v.size() - 1);
        if (nv.size() > budget)
            throw ResourceError("grow_stable: vertex budget exceeded", step - 1);
        // segments of the pullback must lie in closed x-half-planes
        for (size_t i = 0; i + 1 < nv.size(); ++i) {
            if (nv[i].x.sign() * nv[i + 1].x.sign() < 0)
                throw InvariantViolation("stable pullback segment crosses the y-axis");
            if (nv[i] == nv[i + 1]) throw InvariantViolation("stable pullback produced a duplicate vertex");
        }
        S.line.v = std::move(nv);
        S.info = std::move(ni);
        S.depth = step;
    }
    return S;
}

enum class BasicStatus { certified_basic, certified_nonbasic, undecided };

struct VPointRec {
    size_t vertex = 0;  // index into the stable polyline
    QPoint point;
    int first_axis_hit = 0;  // k: forward steps to the first y-axis hit
    int level = 1;           // (last hit) + 1; the last hit is certified basic
    BasicStatus status = BasicStatus::certified_basic;  // of the first-hit point
    bool tangential = false;
};

// Every vertex of the stable polyline except X is a V-point; levels follow
// from the construction bookkeeping and the trap certificate.
inline std::vector<VPointRec> find_v_points(const StableApprox& S) {
    std::vector<VPointRec> out;
    for (size_t i = 0; i < S.line.v.size(); ++i) {
        const VertexInfo& vi = S.info[i];
        if (vi.first_hit < 0) continue;  // X
        VPointRec r;
        r.vertex = i;
        r.point = S.line.v[i];
        r.first_axis_hit = vi.first_hit;
        r.level = vi.last_hit + 1;
        r.status = vi.first_hit == vi.last_hit ? BasicStatus::certified_basic : BasicStatus::certified_nonbasic;
        r.tangential = vi.tangential;
        out.push_back(std::move(r));
    }
    return out;
}

// Lemma-1 shadow: all V-points along the polyline are pairwise distinct.
inline bool vpoints_distinct(const StableApprox& S) {
    std::vector<const QPoint*> pts;
    pts.reserve(S.line.v.size());
    for (auto& p : S.line.v) pts.push_back(&p);
    std::sort(pts.begin(), pts.end(), [](const QPoint* a, const QPoint* b) { return lex_less(*a, *b); });
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (*pts[i] == *pts[i + 1]) return false;
    return true;
}

struct UnstableApprox {
    LoziParams params;
    int depth = 0;
    QPolyline line;  // one path; X at index x_index
    size_t x_index = 0;
};

// U_0 = [X, Z]; each step maps the newest piece forward with a fold split
// and attaches the image at the opposite end.
inline UnstableApprox grow_unstable(const LoziParams& P, int m, size_t budget = default_budget()) {
    if (m < 0) throw UsageError("grow_unstable: depth must be >= 0");
    // Eigenline x-axis hit must reproduce the closed-form Z.
    QPoint dir = P.unstable_dir();
    QScalar t = -P.X.y / dir.y;
    QScalar hit_x = P.X.x + t;
    if (!(hit_x == P.Z.x))
        throw InvariantViolation("unstable eigenline x-axis hit disagrees with the closed form Z",
                                 hit_x.str() + " vs " + P.Z.x.str());

    std::vector<std::vector<QPoint>> side(2);  // from X outward
    side[0] = {P.X, P.Z};
    side[1] = {P.X};
    std::vector<QPoint> block = side[0];  // newest piece, junction first
    for (int step = 1; step <= m; ++step) {
        QPolyline bl;
        bl.v = block;
        QPolyline split = split_polyline_at_axis(bl, AxisLine::x_zero);
        std::vector<QPoint> img;
        img.reserve(split.v.size());
        for (auto& p : split.v) img.push_back(lozi_forward(P, p));
        auto& target = side[step % 2];
        // Drop any image prefix that retraces the target side (happens at
        // step 2, where the image starts back at X).
        size_t pos = target.size();
        while (pos > 0 && !(target[pos - 1] == img[0])) --pos;
        if (pos == 0) throw InvariantViolation("grow_unstable: image does not attach to the polyline");
        --pos;
        size_t j = 0;
        while (j < img.size() && pos + j < target.size()) {
            if (!(img[j] == target[pos + j]))
                throw InvariantViolation("grow_unstable: image retrace mismatch");
            ++j;
        }
        std::vector<QPoint> fresh(img.begin() + (j > 0 ? j - 1 : 0), img.end());
        for (size_t k = 1; k < fresh.size(); ++k) target.push_back(fresh[k]);
        block = std::move(fresh);
        if (side[0].size() + side[1].size() > budget)
            throw ResourceError("grow_unstable: vertex budget exceeded", step - 1);
    }
    UnstableApprox U;
    U.params = P;
    U.depth = m;
    U.line.v.assign(side[1].rbegin(), side[1].rend());
    U.x_index = U.line.v.size() - 1;
    U.line.v.insert(U.line.v.end(), side[0].begin() + 1, side[0].end());
    return U;
}

struct BasinAnchors {
    QPoint M, N;
    std::vector<QPoint> M_pullbacks, N_pullbacks;  // M^{-1}.. and N^{-1}..
    QPolyline boundary;  // polygonal piece of the basin boundary through Y
};

// The stable manifold of Y: N is the first y-axis hit of the half going
// down, M the first x-axis hit past N. Both exact.
inline BasinAnchors basin_anchors(const LoziParams& P, int depth) {
    if (depth < 0) throw UsageError("basin_anchors: depth must be >= 0");
    // Stable eigendirection at Y (left branch): roots of t^2 - a t - b,
    // stable root (a - sqrt(D))/2, direction (1, b/lambda) = (1, -(a+sqrt(D))/2).
    QScalar slope = -(P.sqrtD() + P.a) / Rational(2);
    QScalar tN = -P.Y.x;
    QPoint N{P.qs(0), P.Y.y + tN * slope};
    if (N.y.sign() >= 0) throw InvariantViolation("basin anchor N expected on the negative y-axis");

    // Grow the W^s_Y polyline from the seed [Y, N] by fold-split pullbacks;
    // even iterates extend the down half.
    QPolyline G;
    G.v = {P.Y, N};
    int steps = std::max(2, 2 * ((depth + 1) / 2) + 2);
    for (int i = 0; i < steps; ++i) {
        QPolyline s = split_polyline_at_axis(G, AxisLine::y_zero);
        QPolyline next;
        next.v.reserve(s.v.size());
        for (auto& p : s.v) next.v.push_back(lozi_inverse(P, p));
        G = std::move(next);
    }
    // G is the down half again; M is the first x-axis crossing past N.
    QPolyline Gs = split_polyline_at_axis(G, AxisLine::y_zero);
    std::optional<QPoint> M;
    bool past_N = false;
    for (auto& p : Gs.v) {
        if (p == N) {
            past_N = true;
            continue;
        }
        if (past_N && p.y.sign() == 0) {
            M = p;
            break;
        }
    }
    if (!M) throw InvariantViolation("basin anchor M not found past N");
    if (!((*M).x > P.Z.x)) throw InvariantViolation("basin anchors: expected M_x > Z_x",
                                                    (*M).x.str() + " vs " + P.Z.x.str());
    BasinAnchors out;
    out.M = *M;
    out.N = N;
    QPoint m = *M, n = N;
    for (int k = 1; k <= depth; ++k) {
        m = lozi_inverse(P, m);
        n = lozi_inverse(P, n);
        out.M_pullbacks.push_back(m);
        out.N_pullbacks.push_back(n);
    }
    out.boundary = Gs;
    return out;
}

struct DensityReport {
    double coverage = 0;  // fraction of reference cells visited
    size_t cells_visited = 0;
    size_t cells_reference = 0;
};

// Fraction of the eps-grid cells near the attractor (those visited by a
// longer reference orbit) that the forward float orbit of the segment
// midpoint visits.
inline DensityReport orbit_density_diagnostic(const LoziParams& P, const QPoint& seg_a, const QPoint& seg_b,
                                              size_t iterations, double eps, size_t ref_iterations) {
    if (eps <= 0) throw UsageError("orbit_density_diagnostic: eps must be positive");
    if (ref_iterations < iterations) ref_iterations = iterations;
    double a = to_double(P.a), b = to_double(P.b);
    auto stepf = [&](double& x, double& y) {
        double nx = 1.0 + y - a * std::fabs(x);
        y = b * x;
        x = nx;
    };
    double x0 = (seg_a.fx() + seg_b.fx()) / 2, y0 = (seg_a.fy() + seg_b.fy()) / 2;
    // Reference pass fixes the bounding box.
    double minx = x0, maxx = x0, miny = y0, maxy = y0;
    {
        double x = x0, y = y0;
        for (size_t i = 0; i < ref_iterations; ++i) {
            stepf(x, y);
            minx = std::min(minx, x);
            maxx = std::max(maxx, x);
            miny = std::min(miny, y);
            maxy = std::max(maxy, y);
        }
    }
    long nx = std::max(1L, static_cast<long>(std::ceil((maxx - minx) / eps)));
    auto key = [&](double x, double y) {
        long ix = static_cast<long>(std::floor((x - minx) / eps));
        long iy = static_cast<long>(std::floor((y - miny) / eps));
        return iy * (nx + 2) + ix;
    };
    auto run = [&](size_t iters) {
        std::unordered_set<long> cells;
        double x = x0, y = y0;
        cells.insert(key(x, y));
        for (size_t i = 0; i < iters; ++i) {
            stepf(x, y);
            cells.insert(key(x, y));
        }
        return cells;
    };
    auto ref = run(ref_iterations);
    auto got = run(iterations);
    size_t inter = 0;
    for (long c : got)
        if (ref.count(c)) ++inter;
    DensityReport r;
    r.cells_visited = got.size();
    r.cells_reference = ref.size();
    r.coverage = ref.empty() ? 0.0 : static_cast<double>(inter) / static_cast<double>(ref.size());
    return r;
}

}  // namespace lozitree
