#include "psym/ratfunc.hpp"

#include "psym/errors.hpp"

namespace psym {

RationalFunction::RationalFunction(const SparsePoly& num) : num_(num), den_(1) {}

RationalFunction::RationalFunction(SparsePoly num, SparsePoly den)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw AlgebraError("division by zero polynomial");
    normalize();
}

void RationalFunction::normalize() {
    if (num_.is_zero()) {
        den_ = SparsePoly(1);
        return;
    }
    if (den_.is_constant()) {
        if (den_.constant_value() != 1) {
            num_ *= Rational(1 / den_.constant_value());
            den_ = SparsePoly(1);
        }
        return;
    }
    const Monomial shared = num_.monomial_content().gcd(den_.monomial_content());
    if (!shared.is_one()) {
        num_ = num_.div_monomial(shared);
        den_ = den_.div_monomial(shared);
    }
    if (!den_.is_monomial() && !num_.is_constant()) {
        const SparsePoly g = gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = *divide_exact(num_, g);
            den_ = *divide_exact(den_, g);
        }
    }
    Rational scale = den_.integer_content();
    if (den_.leading_coefficient() < 0) scale = -scale;
    if (scale != 1) {
        const Rational inv = 1 / scale;
        num_ *= inv;
        den_ *= inv;
    }
    if (den_.is_constant()) {
        num_ *= Rational(1 / den_.constant_value());
        den_ = SparsePoly(1);
    }
}

std::set<SymbolId> RationalFunction::symbols() const {
    auto s = num_.symbols();
    auto d = den_.symbols();
    s.insert(d.begin(), d.end());
    return s;
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    if (den_ == o.den_) {
        num_ += o.num_;
    } else if (o.den_.is_constant()) {
        num_ += o.num_ * den_;
    } else if (den_.is_constant()) {
        num_ = num_ * o.den_ + o.num_;
        den_ = o.den_;
    } else {
        // combine over lcm(den, o.den) to limit growth
        const SparsePoly g = gcd(den_, o.den_);
        const SparsePoly a = *divide_exact(o.den_, g);
        const SparsePoly b = *divide_exact(den_, g);
        num_ = num_ * a + o.num_ * b;
        den_ = den_ * a;
    }
    normalize();
    return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o) {
    return *this += -o;
}

RationalFunction& RationalFunction::operator*=(const RationalFunction& o) {
    if (is_zero()) return *this;
    if (o.is_zero()) return *this = RationalFunction();
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
}

RationalFunction& RationalFunction::operator/=(const RationalFunction& o) {
    if (o.is_zero()) throw AlgebraError("division by zero polynomial");
    if (is_zero()) return *this;
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
}

RationalFunction RationalFunction::operator-() const {
    RationalFunction out = *this;
    out.num_ = -out.num_;
    return out;
}

RationalFunction RationalFunction::pow(int e) const {
    if (e < 0) {
        if (is_zero()) throw AlgebraError("division by zero polynomial");
        return RationalFunction(den_.pow(unsigned(-e)), num_.pow(unsigned(-e)));
    }
    RationalFunction out;
    out.num_ = num_.pow(unsigned(e));
    out.den_ = den_.pow(unsigned(e));
    out.normalize();
    return out;
}

double RationalFunction::evaluate(std::span<const double> values) const {
    return num_.evaluate(values) / den_.evaluate(values);
}

Rational RationalFunction::evaluate(std::span<const Rational> values) const {
    const Rational d = den_.evaluate(values);
    if (d == 0) throw AlgebraError("denominator vanishes at evaluation point");
    return num_.evaluate(values) / d;
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
    if (a.num_ == b.num_ && a.den_ == b.den_) return true;
    return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
}

bool canonical_less(const RationalFunction& a, const RationalFunction& b) {
    if (canonical_less(a.num_, b.num_)) return true;
    if (canonical_less(b.num_, a.num_)) return false;
    return canonical_less(a.den_, b.den_);
}

}  // namespace psym
