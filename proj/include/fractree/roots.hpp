#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fractree/polynomial.hpp"

namespace fractree {

namespace detail {

// eigenvalues of the companion matrix of a monic-normalized polynomial
inline std::vector<Complex> companion_roots(const std::vector<double>& monic) {
    int n = static_cast<int>(monic.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -monic[i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) throw NoConvergence("companion eigensolver failed");
    std::vector<Complex> out(n);
    for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
    return out;
}

// sum_i |c_i| x^i: the natural scale for evaluation residuals at |root| = x
inline double abs_coeff_eval(const Polynomial& p, double x) {
    const auto& c = p.coeffs();
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + std::abs(c[i]);
    return acc;
}

inline Complex newton_polish(const Polynomial& p, const Polynomial& dp, Complex r, int iters) {
    Complex best = r;
    double best_res = std::abs(p(r));
    for (int it = 0; it < iters; ++it) {
        Complex d = dp(r);
        if (std::abs(d) < 1e-300) break;
        r -= p(r) / d;
        double res = std::abs(p(r));
        if (res < best_res) {
            best_res = res;
            best = r;
        }
        if (res == 0.0) break;
    }
    return best;
}

} // namespace detail

// deterministic ordering: by real part, then imaginary part
inline void sort_canonical(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

// All roots of p in the w-plane via companion-matrix eigenvalues followed by
// Newton polishing.  Coefficients with extreme magnitude are handled by the
// substitution w = sigma*v before solving.
inline std::vector<Complex> roots(const Polynomial& p) {
    if (p.degree() < 1) throw DomainError("roots of a constant polynomial are undefined");
    double maxabs = p.max_abs_coeff();

    double sigma = 1.0;
    Polynomial work = p;
    if (maxabs > 1e12) {
        sigma = std::exp2(std::round(std::log2(maxabs) / p.degree()));
        std::vector<double> scaled = p.coeffs();
        double f = 1.0;
        for (auto& cc : scaled) {
            cc *= f;
            f *= sigma;
        }
        work = Polynomial(std::move(scaled));
    }

    const auto& c = work.coeffs();
    std::vector<double> monic(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) monic[i] = c[i] / c.back();
    std::vector<Complex> rs = detail::companion_roots(monic);

    Polynomial dp = work.derivative();
    for (auto& r : rs) {
        r = detail::newton_polish(work, dp, r, 20);
        double tol = 1e-10 * detail::abs_coeff_eval(work, std::abs(r));
        if (std::abs(work(r)) > tol) throw NoConvergence("root polishing did not reach tolerance");
    }
    if (sigma != 1.0)
        for (auto& r : rs) r *= sigma;
    sort_canonical(rs);
    return rs;
}

// largest unmatched-conjugate distance over the multiset (0 for a perfectly
// conjugate-closed set)
inline double conjugation_defect(const std::vector<Complex>& v) {
    double worst = 0.0;
    for (const auto& a : v) {
        double best = HUGE_VAL;
        for (const auto& b : v) best = std::min(best, std::abs(std::conj(a) - b));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace fractree
