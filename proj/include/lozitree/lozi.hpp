#pragma once

#include <optional>
#include <string>

#include "lozitree/clip.hpp"
#include "lozitree/geometry.hpp"

namespace lozitree {

// The Misiurewicz parameter region: b > 0, a*sqrt(2) - b > 2, 2a + b < 4.
inline bool in_misiurewicz(const Rational& a, const Rational& b) {
    if (b <= 0) return false;
    if (cmp_rational_vs_sqrt(b + 2, a, 2) >= 0) return false;  // needs a*sqrt(2) > 2 + b
    return 2 * a + b < 4;
}

// Parameters of L_{a,b}(x, y) = (1 + y - a|x|, bx) together with the exact
// derived objects every construction reuses: the fixed points X and Y, the
// first axis hits Z and V0 of the unstable/stable manifold halves at X, and
// the trapping triangle with vertices Z, L(Z), L^2(Z).
struct LoziParams {
    Rational a, b;
    Rational D;  // a^2 + 4b, the shared radicand
    QPoint X, Y, Z, V0;
    QPolygon delta;

    QScalar qs(const Rational& r) const { return QScalar::from_rational(r, D); }
    QScalar sqrtD() const { return QScalar::sqrt_d(D); }

    // Eigenvalues of DL on x > 0: roots of t^2 + a t - b.
    QScalar lambda_stable() const { return (sqrtD() - a) / Rational(2); }
    QScalar lambda_unstable() const { return (-sqrtD() - a) / Rational(2); }
    // Eigendirections (1, b / lambda) = (1, lambda + a).
    QPoint stable_dir() const { return {qs(1), lambda_stable() + a}; }
    QPoint unstable_dir() const { return {qs(1), lambda_unstable() + a}; }
};

inline QPoint lozi_forward(const LoziParams& P, const QPoint& p) {
    QScalar ax = abs_of(p.x) * P.a;
    return {p.y - ax + Rational(1), P.b * p.x};
}

inline QPoint lozi_inverse(const LoziParams& P, const QPoint& p) {
    QScalar x = p.y / P.b;
    return {x, abs_of(p.y) * (P.a / P.b) + p.x - Rational(1)};
}

inline LoziParams make_lozi_params(const Rational& a, const Rational& b) {
    if (b == 0) throw UsageError("Lozi parameters need b != 0");
    LoziParams P;
    P.a = a;
    P.b = b;
    P.D = a * a + 4 * b;
    if (P.D < 0) throw UsageError("Lozi parameters need a^2 + 4b >= 0");
    Rational s = 1 + a - b;
    Rational u = a + b - 1;
    if (s == 0 || u == 0) throw UsageError("Lozi fixed points are undefined at 1 + a - b = 0 or a + b = 1");
    P.X = {P.qs(Rational(1) / s), P.qs(b / s)};
    P.Y = {P.qs(-Rational(1) / u), P.qs(-b / u)};
    P.Z = {(P.sqrtD() + (a + 2)) / (2 * s), P.qs(0)};
    P.V0 = {P.qs(0), (P.qs(2 * b - a) - P.sqrtD()) / (2 * s)};
    QPoint Z1 = lozi_forward(P, P.Z);
    QPoint Z2 = lozi_forward(P, Z1);
    P.delta.v = {P.Z, Z1, Z2};
    P.delta.make_ccw();
    return P;
}

inline Rational jacobian_det(const LoziParams& P, const QPoint& p) {
    if (p.x.sign() == 0) throw DomainError("jacobian_det: derivative undefined on the fold line x = 0");
    return -P.b;
}

// Maps a closed polygon boundary forward, splitting at the fold line x = 0
// first so every edge maps affinely.
inline QPolygon lozi_forward_polygon_boundary(const LoziParams& P, const QPolygon& poly) {
    QPolyline closed;
    closed.v = poly.v;
    closed.v.push_back(poly.v.front());
    QPolyline split = split_polyline_at_axis(closed, AxisLine::x_zero);
    QPolygon out;
    for (size_t i = 0; i + 1 < split.v.size(); ++i) out.v.push_back(lozi_forward(P, split.v[i]));
    return out;
}

struct TrappingResult {
    bool trapped = false;
    std::optional<QPoint> witness;  // a point of L(delta)'s boundary outside delta
};

// Exact check that L(delta) is contained in delta: every boundary point of
// the image polygon must classify inside-or-boundary. Each image edge is cut
// at its crossings with the boundary of delta and the open pieces are
// classified by an interior probe, so corner passes cannot hide an excursion.
inline TrappingResult check_trapping(const LoziParams& P) {
    QPolygon img = lozi_forward_polygon_boundary(P, P.delta);
    const size_t n = img.v.size();
    for (size_t i = 0; i < n; ++i) {
        if (point_in_polygon(img.v[i], P.delta) == Location::outside) return {false, img.v[i]};
        const QPoint& a = img.v[i];
        const QPoint& b = img.v[(i + 1) % n];
        QPolyline seg;
        seg.v = {a, b};
        auto events = collect_boundary_events(seg, P.delta);
        std::vector<QScalar> ts;
        ts.push_back(QScalar::from_rational(0, P.D));
        for (auto& e : events) ts.push_back(e.param.t);
        ts.push_back(QScalar::from_rational(1, P.D));
        Rational half(1, 2);
        for (size_t k = 0; k + 1 < ts.size(); ++k) {
            if ((ts[k + 1] - ts[k]).sign() <= 0) continue;
            QPoint probe = lerp(a, b, (ts[k] + ts[k + 1]) * half);
            if (point_in_polygon(probe, P.delta) == Location::outside) return {false, probe};
        }
    }
    return {true, std::nullopt};
}

}  // namespace lozitree
