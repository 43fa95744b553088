#pragma once
// Complex numbers carried as mantissa * exp(exponent) so that quantities with
// astronomically large or small magnitude (products of exponentially growing
// and decaying special functions) can be combined without overflow.  Only the
// final materialization to std::complex<double> can fail.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace helmtrace {

using cplx = std::complex<double>;

namespace detail {

class ScaledComplex {
public:
    ScaledComplex() = default;
    ScaledComplex(cplx mantissa, double exponent = 0.0)
        : mant_(mantissa), expo_(exponent) {
        normalize();
    }

    static ScaledComplex from_log(double log_magnitude, cplx phase = {1.0, 0.0}) {
        return ScaledComplex(phase, log_magnitude);
    }

    cplx mantissa() const { return mant_; }
    double exponent() const { return expo_; }
    bool is_zero() const { return mant_ == cplx{0.0, 0.0}; }

    // log of |value|; -inf for zero.
    double log_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        return expo_ + std::log(std::abs(mant_));
    }

    ScaledComplex& operator*=(const ScaledComplex& o) {
        mant_ *= o.mant_;
        expo_ += o.expo_;
        normalize();
        return *this;
    }
    ScaledComplex& operator*=(cplx c) {
        mant_ *= c;
        normalize();
        return *this;
    }
    ScaledComplex& operator*=(double c) { return (*this) *= cplx{c, 0.0}; }

    ScaledComplex& operator/=(const ScaledComplex& o) {
        if (o.is_zero()) throw std::domain_error("ScaledComplex: division by zero");
        mant_ /= o.mant_;
        expo_ -= o.expo_;
        normalize();
        return *this;
    }

    ScaledComplex& operator+=(const ScaledComplex& o) {
        if (o.is_zero()) return *this;
        if (is_zero()) { *this = o; return *this; }
        // Align to the larger exponent; the smaller term may flush to zero,
        // which is the correct limit for a magnitude gap beyond ~700 nats.
        if (expo_ >= o.expo_) {
            double d = o.expo_ - expo_;
            mant_ += o.mant_ * std::exp(d);
        } else {
            double d = expo_ - o.expo_;
            mant_ = mant_ * std::exp(d) + o.mant_;
            expo_ = o.expo_;
        }
        normalize();
        return *this;
    }
    ScaledComplex& operator-=(const ScaledComplex& o) { return (*this) += (-o); }

    ScaledComplex operator-() const {
        ScaledComplex r(*this);
        r.mant_ = -r.mant_;
        return r;
    }

    friend ScaledComplex operator*(ScaledComplex a, const ScaledComplex& b) { return a *= b; }
    friend ScaledComplex operator*(ScaledComplex a, cplx b) { return a *= b; }
    friend ScaledComplex operator*(cplx b, ScaledComplex a) { return a *= b; }
    friend ScaledComplex operator*(ScaledComplex a, double b) { return a *= b; }
    friend ScaledComplex operator*(double b, ScaledComplex a) { return a *= b; }
    friend ScaledComplex operator/(ScaledComplex a, const ScaledComplex& b) { return a /= b; }
    friend ScaledComplex operator+(ScaledComplex a, const ScaledComplex& b) { return a += b; }
    friend ScaledComplex operator-(ScaledComplex a, const ScaledComplex& b) { return a -= b; }

    ScaledComplex inverse() const {
        if (is_zero()) throw std::domain_error("ScaledComplex: inverse of zero");
        return ScaledComplex(cplx{1.0, 0.0} / mant_, -expo_);
    }

    // Materialize as a plain complex.  Overflow is a hard error; underflow
    // flushes to zero.
    cplx value() const {
        if (is_zero()) return {0.0, 0.0};
        double la = log_abs();
        if (la > 709.0) throw std::range_error("ScaledComplex: overflow materializing value");
        if (la < -745.0) return {0.0, 0.0};
        cplx phase = mant_ / std::abs(mant_);
        return phase * std::exp(la);
    }

private:
    void normalize() {
        if (is_zero()) { expo_ = 0.0; return; }
        double a = std::abs(mant_);
        if (a > 1e8 || a < 1e-8) {
            double l = std::log(a);
            mant_ /= std::exp(l);
            expo_ += l;
        }
    }

    cplx mant_{0.0, 0.0};
    double expo_ = 0.0;
};

// Ratio of two scaled values as a plain complex (exponents mostly cancel).
inline cplx ratio(const ScaledComplex& a, const ScaledComplex& b) {
    if (b.is_zero()) throw std::domain_error("ScaledComplex ratio: zero denominator");
    if (a.is_zero()) return {0.0, 0.0};
    double d = a.exponent() - b.exponent();
    cplx m = a.mantissa() / b.mantissa();
    double la = std::log(std::abs(m)) + d;
    if (la > 709.0) throw std::range_error("ScaledComplex ratio: overflow");
    if (la < -745.0) return {0.0, 0.0};
    cplx phase = m / std::abs(m);
    return phase * std::exp(la);
}

} // namespace detail
} // namespace helmtrace
