#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fractree/fractree.hpp"

namespace testutil {

using fractree::Complex;
using fractree::Kind;
using fractree::TreeParams;

// closed-form generation-1 roots, written from the quadratic formulas rather
// than the library's coefficient tables
struct BaseCaseRoots {
    std::vector<Complex> zeros;
    std::vector<Complex> poles;
};

inline BaseCaseRoots base_case_roots(Kind kind, double eps, const TreeParams& p) {
    double c = p.c();
    BaseCaseRoots out;
    if (kind == Kind::spring) {
        out.zeros = {Complex(-c, 0.0), Complex(-eps * c, 0.0)};
        Complex disc = std::sqrt(Complex(eps * (eps - 1.0) * p.k / p.b, 0.0));
        out.poles = {-(eps * c + disc), -(eps * c - disc)};
    } else {
        out.zeros = {Complex(-c, 0.0), Complex(-c / eps, 0.0)};
        Complex disc = std::sqrt(Complex((eps - 1.0) * p.k / (eps * p.b), 0.0));
        out.poles = {-(c + disc), -(c - disc)};
    }
    return out;
}

// distance from each element of `a` to its nearest element of `b`
inline double worst_nearest_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = 0.0;
    for (const auto& x : a) {
        double best = HUGE_VAL;
        for (const auto& y : b) best = std::min(best, std::abs(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

inline double rel_err(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

// log-uniform frequency draw in [lo, hi]
inline double draw_omega(fractree::RngStream& rng, double lo, double hi) {
    return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

inline std::vector<fractree::Location> all_locations_up_to(int gmax) {
    std::vector<fractree::Location> out;
    for (int g = 1; g <= gmax; ++g)
        for (int n = 1; n <= (1 << (g - 1)); ++n)
            for (Kind kd : {Kind::spring, Kind::damper}) out.push_back({g, n, kd});
    return out;
}

inline fractree::FrequencyResponse delta_response(const fractree::Location& loc, double eps,
                                                  const TreeParams& p) {
    fractree::DamageSpec d;
    d.where = loc;
    d.epsilon = eps;
    return fractree::sample_rational(fractree::delta_for(d, p), fractree::default_identify_grid());
}

} // namespace testutil
