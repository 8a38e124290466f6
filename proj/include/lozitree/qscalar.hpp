#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "lozitree/rational.hpp"

namespace lozitree {

// Element p + q*sqrt(D) of the real quadratic field Q(sqrt(D)), D >= 0
// rational. All values participating in one computation share the same D;
// mixing distinct radicands is rejected rather than coerced. If D is a
// perfect square the irrational part is folded into p at construction, so
// equality stays componentwise and the sign of any element is decidable by
// comparing p^2 with q^2 D.
//
// A value with q == 0 and D == 0 is an untagged rational; it combines with
// any field. That keeps default-constructed zeros and plain rational
// constants usable without threading D through every call site.
class QScalar {
  public:
    QScalar() : p_(0), q_(0), d_(0) {}

    QScalar(Rational p, Rational q, Rational d) : p_(std::move(p)), q_(std::move(q)), d_(std::move(d)) {
        if (d_ < 0) throw DomainError("QScalar radicand must be non-negative");
        normalize();
    }

    static QScalar from_rational(Rational value, Rational d) { return QScalar(std::move(value), 0, std::move(d)); }
    static QScalar sqrt_d(const Rational& d) { return QScalar(0, 1, d); }

    const Rational& p() const { return p_; }
    const Rational& q() const { return q_; }
    const Rational& d() const { return d_; }

    bool is_zero() const { return p_ == 0 && q_ == 0; }
    bool is_rational() const { return q_ == 0; }

    // Exact sign of the real number p + q*sqrt(D).
    int sign() const {
        int sp = sign_of(p_);
        if (q_ == 0) return sp;
        int sq = sign_of(q_);
        if (p_ == 0) return sq;
        if (sp == sq) return sp;
        // Opposite signs: |p| vs |q|sqrt(D) decided by squaring.
        int cmp = sign_of(p_ * p_ - q_ * q_ * d_);
        return cmp == 0 ? 0 : cmp * sp;
    }

    QScalar operator-() const { return QScalar(-p_, -q_, d_, NoNormalize{}); }

    QScalar& operator+=(const QScalar& o) {
        merge_field(o);
        p_ += o.p_;
        q_ += o.q_;
        return *this;
    }
    QScalar& operator-=(const QScalar& o) {
        merge_field(o);
        p_ -= o.p_;
        q_ -= o.q_;
        return *this;
    }
    QScalar& operator*=(const QScalar& o) {
        merge_field(o);
        Rational np = p_ * o.p_ + q_ * o.q_ * d_;
        Rational nq = p_ * o.q_ + q_ * o.p_;
        p_ = std::move(np);
        q_ = std::move(nq);
        return *this;
    }
    QScalar& operator/=(const QScalar& o) { return *this *= o.inverse(); }

    QScalar& operator+=(const Rational& r) {
        p_ += r;
        return *this;
    }
    QScalar& operator-=(const Rational& r) {
        p_ -= r;
        return *this;
    }
    QScalar& operator*=(const Rational& r) {
        p_ *= r;
        q_ *= r;
        return *this;
    }
    QScalar& operator/=(const Rational& r) {
        if (r == 0) throw DomainError("division of QScalar by zero rational");
        p_ /= r;
        q_ /= r;
        return *this;
    }

    QScalar inverse() const {
        if (is_zero()) throw DomainError("inverse of zero QScalar");
        Rational denom = p_ * p_ - q_ * q_ * d_;
        // denom == 0 would force p = q = 0 once perfect squares are folded.
        return QScalar(p_ / denom, -q_ / denom, d_, NoNormalize{});
    }

    double to_double() const {
        if (q_ == 0) return lozitree::to_double(p_);
        return lozitree::to_double(p_) + lozitree::to_double(q_) * std::sqrt(lozitree::to_double(d_));
    }

    friend QScalar operator+(QScalar a, const QScalar& b) { return a += b; }
    friend QScalar operator-(QScalar a, const QScalar& b) { return a -= b; }
    friend QScalar operator*(QScalar a, const QScalar& b) { return a *= b; }
    friend QScalar operator/(QScalar a, const QScalar& b) { return a /= b; }
    friend QScalar operator+(QScalar a, const Rational& b) { return a += b; }
    friend QScalar operator-(QScalar a, const Rational& b) { return a -= b; }
    friend QScalar operator*(QScalar a, const Rational& b) { return a *= b; }
    friend QScalar operator/(QScalar a, const Rational& b) { return a /= b; }
    friend QScalar operator*(const Rational& b, QScalar a) { return a *= b; }

    friend bool operator==(const QScalar& a, const QScalar& b) {
        if (a.q_ != 0 && b.q_ != 0 && a.d_ != b.d_)
            throw UsageError("comparing QScalars from different fields");
        return a.p_ == b.p_ && a.q_ == b.q_;
    }
    friend bool operator!=(const QScalar& a, const QScalar& b) { return !(a == b); }
    friend bool operator<(const QScalar& a, const QScalar& b) { return (a - b).sign() < 0; }
    friend bool operator>(const QScalar& a, const QScalar& b) { return (a - b).sign() > 0; }
    friend bool operator<=(const QScalar& a, const QScalar& b) { return (a - b).sign() <= 0; }
    friend bool operator>=(const QScalar& a, const QScalar& b) { return (a - b).sign() >= 0; }

    // Textual form "p + q*sqrt(D)", e.g. "10/23 + 0*sqrt(389/80)".
    std::string str() const {
        return lozitree::to_string(p_) + " + " + lozitree::to_string(q_) + "*sqrt(" + lozitree::to_string(d_) + ")";
    }

  private:
    struct NoNormalize {};
    QScalar(Rational p, Rational q, Rational d, NoNormalize) : p_(std::move(p)), q_(std::move(q)), d_(std::move(d)) {}

    void normalize() {
        if (q_ == 0) return;
        if (auto root = rational_sqrt(d_)) {
            p_ += q_ * *root;
            q_ = 0;
        }
    }

    void merge_field(const QScalar& o) {
        if (d_ == o.d_) return;
        if (d_ == 0 && q_ == 0) {
            d_ = o.d_;
            return;
        }
        if (o.d_ == 0 && o.q_ == 0) return;
        throw UsageError("QScalar operands carry different radicands: " + to_string(d_) + " vs " + to_string(o.d_));
    }

    Rational p_, q_, d_;
};

inline int sign_of(const QScalar& x) { return x.sign(); }
inline QScalar abs_of(QScalar x) { return x.sign() < 0 ? -x : x; }

// Exact sign of r - s*sqrt(t); t must be non-negative.
inline int cmp_rational_vs_sqrt(const Rational& r, const Rational& s, const Rational& t) {
    if (t < 0) throw DomainError("cmp_rational_vs_sqrt: negative radicand");
    return QScalar(r, -s, t).sign();
}

inline std::optional<QScalar> try_parse_qscalar(std::string_view text) {
    auto plus = text.find(" + ");
    auto sq = text.find("*sqrt(");
    if (plus == std::string_view::npos || sq == std::string_view::npos || text.empty() || text.back() != ')')
        return std::nullopt;
    auto p = try_parse_rational(text.substr(0, plus));
    auto q = try_parse_rational(text.substr(plus + 3, sq - plus - 3));
    auto d = try_parse_rational(text.substr(sq + 6, text.size() - sq - 7));
    if (!p || !q || !d || *d < 0) return std::nullopt;
    return QScalar(*p, *q, *d);
}

}  // namespace lozitree
