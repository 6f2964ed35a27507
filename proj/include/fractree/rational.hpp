#pragma once

#include <cmath>
#include <complex>

#include "fractree/polynomial.hpp"

namespace fractree {

// principal square root of s, with the imaginary axis handled componentwise so
// that s = j*omega (omega > 0) gives arg(w) = pi/4 exactly and the omega < 0
// value is its exact conjugate
inline Complex half_order_var(Complex s) {
    if (s.real() == 0.0) {
        double omega = s.imag();
        if (omega == 0.0) return Complex(0.0, 0.0);
        static const double h = std::sqrt(0.5);
        double m = std::sqrt(std::abs(omega)) * h;
        return omega > 0.0 ? Complex(m, m) : Complex(m, -m);
    }
    return std::sqrt(s);
}

// Ratio of real-coefficient polynomials in w = s^(1/2).
struct Rational {
    Polynomial num;
    Polynomial den;

    Rational() : num(Polynomial::one()), den(Polynomial::one()) {}
    Rational(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {
        if (den.is_zero()) throw ZeroDenominator("rational function with zero denominator");
    }

    static Rational one() { return Rational(); }

    // value at w directly (no square root applied)
    Complex at_w(Complex w) const {
        Complex d = den(w);
        if (std::abs(d) < 1e-300) throw PoleProximity("denominator vanishes at evaluation point");
        return num(w) / d;
    }
};

inline Rational normalize(const Rational& r) {
    if (r.den.is_zero()) throw ZeroDenominator("cannot normalize: zero denominator");
    double lead = r.den.leading();
    return Rational(poly_scale(r.num, 1.0 / lead), poly_scale(r.den, 1.0 / lead));
}

inline Complex evaluate(const Rational& r, Complex s) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw NonFinite("evaluation point is not finite");
    return r.at_w(half_order_var(s));
}

inline Complex evaluate_jomega(const Rational& r, double omega) {
    return evaluate(r, Complex(0.0, omega));
}

} // namespace fractree
