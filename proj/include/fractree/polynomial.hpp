#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <vector>

#include "fractree/errors.hpp"

namespace fractree {

using Complex = std::complex<double>;

// Real-coefficient polynomial in the half-order variable w, ascending powers:
// coeffs[i] multiplies w^i.  Trailing zeros are stripped so degree() is exact;
// the zero polynomial is kept as the single coefficient 0.
class Polynomial {
  public:
    Polynomial() : c_{0.0} {}
    Polynomial(std::initializer_list<double> cs) : c_(cs) { trim(); }
    explicit Polynomial(std::vector<double> cs) : c_(std::move(cs)) { trim(); }

    static Polynomial one() { return Polynomial{1.0}; }

    const std::vector<double>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double leading() const { return c_.back(); }
    bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

    Complex operator()(Complex w) const {
        Complex acc(0.0, 0.0);
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * w + c_[i];
        return acc;
    }
    double operator()(double w) const {
        double acc = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * w + c_[i];
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() == 1) return Polynomial{};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    bool operator==(const Polynomial& o) const { return c_ == o.c_; }

  private:
    void trim() {
        if (c_.empty()) c_.push_back(0.0);
        for (double v : c_)
            if (!std::isfinite(v)) throw NonFinite("polynomial coefficient is not finite");
        while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    }

    std::vector<double> c_;
};

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    std::vector<double> out(ca.size() + cb.size() - 1, 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = 0; j < cb.size(); ++j) out[i + j] += ca[i] * cb[j];
    return Polynomial(std::move(out));
}

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
    std::vector<double> out(std::max(a.coeffs().size(), b.coeffs().size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return Polynomial(std::move(out));
}

inline Polynomial poly_scale(const Polynomial& a, double g) {
    std::vector<double> out = a.coeffs();
    for (double& v : out) v *= g;
    return Polynomial(std::move(out));
}

// multiply by w (shift coefficients up one power)
inline Polynomial poly_shift(const Polynomial& a) {
    if (a.is_zero()) return a;
    std::vector<double> out(a.coeffs().size() + 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) out[i + 1] = a.coeffs()[i];
    return Polynomial(std::move(out));
}

// synthetic division by (w - r): returns the quotient, writes p(r) to remainder
inline Polynomial poly_deflate(const Polynomial& p, double r, double* remainder = nullptr) {
    const auto& c = p.coeffs();
    if (c.size() < 2) throw DomainError("cannot deflate a constant polynomial");
    std::vector<double> quo(c.size() - 1, 0.0);
    double carry = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        quo[i] = carry;
        carry = c[i] + carry * r;
    }
    if (remainder) *remainder = carry;
    return Polynomial(std::move(quo));
}

} // namespace fractree
