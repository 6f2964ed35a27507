#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "fractree/errors.hpp"

namespace fractree {

// deterministic splitmix64 stream with Box-Muller normals
struct RngStream {
    std::uint64_t state;

    explicit RngStream(std::uint64_t seed) : state(seed) {}

    static RngStream substream(std::uint64_t seed, std::uint64_t idx) {
        return RngStream(seed + idx * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { // in (0, 1)
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }
};

// golden-section minimization on [a, b]; deterministic, derivative-free
template <typename F>
double golden_min(F&& f, double a, double b, double xtol, int max_iter = 200) {
    static const double gr = 0.6180339887498948482045868343656;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    long iterations = 0;
    bool converged = false;
};

// standard Nelder-Mead simplex (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5) with an objective-spread stopping rule
template <typename F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0, double step, long max_iter,
                             double ftol) {
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::size_t n = x0.size();
    if (n == 0) throw DomainError("empty parameter vector");

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i <= n; ++i) val[i] = f(pts[i]);

    std::vector<std::size_t> ord(n + 1);
    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        for (std::size_t i = 0; i <= n; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
            if (val[a] != val[b]) return val[a] < val[b];
            return a < b;
        });
        if (val[ord[n]] - val[ord[0]] <= ftol) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[ord[i]][d] / double(n);

        auto blend = [&](const std::vector<double>& from, double t) {
            std::vector<double> out(n);
            for (std::size_t d = 0; d < n; ++d) out[d] = centroid[d] + t * (from[d] - centroid[d]);
            return out;
        };

        const auto& worst = pts[ord[n]];
        std::vector<double> refl = blend(worst, -alpha);
        double f_refl = f(refl);
        if (f_refl < val[ord[0]]) {
            std::vector<double> expd = blend(worst, -gamma);
            double f_expd = f(expd);
            if (f_expd < f_refl) {
                pts[ord[n]] = std::move(expd);
                val[ord[n]] = f_expd;
            } else {
                pts[ord[n]] = std::move(refl);
                val[ord[n]] = f_refl;
            }
            continue;
        }
        if (f_refl < val[ord[n - 1]]) {
            pts[ord[n]] = std::move(refl);
            val[ord[n]] = f_refl;
            continue;
        }
        std::vector<double> contr = blend(worst, rho);
        double f_contr = f(contr);
        if (f_contr < val[ord[n]]) {
            pts[ord[n]] = std::move(contr);
            val[ord[n]] = f_contr;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            auto& pt = pts[ord[i]];
            for (std::size_t d = 0; d < n; ++d)
                pt[d] = pts[ord[0]][d] + sigma * (pt[d] - pts[ord[0]][d]);
            val[ord[i]] = f(pt);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (val[i] < val[best]) best = i;
    res.x = pts[best];
    res.value = val[best];
    return res;
}

} // namespace fractree
