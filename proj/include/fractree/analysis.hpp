#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fractree/locus.hpp"
#include "fractree/optimize.hpp"
#include "fractree/tree.hpp"

namespace fractree {

template <typename F>
FrequencyResponse sample_response(F&& evaluator, const FrequencyGrid& grid) {
    grid.validate();
    FrequencyResponse out;
    out.grid = grid;
    out.values.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        out.values[i] = evaluator(Complex(0.0, grid.omegas[i]));
    });
    out.validate();
    return out;
}

inline FrequencyResponse sample_rational(const Rational& r, const FrequencyGrid& grid) {
    return sample_response([&](Complex s) { return evaluate(r, s); }, grid);
}

struct BodeRow {
    double omega;
    double mag_db;
    double phase_deg;
};

// magnitude in dB and cumulatively unwrapped phase in degrees, seeded at the
// lowest frequency
inline std::vector<BodeRow> bode(const FrequencyResponse& fr) {
    fr.validate();
    std::vector<BodeRow> rows(fr.values.size());
    double prev_arg = 0.0;
    double acc = 0.0;
    static const double pi = 3.14159265358979323846264338327950288;
    for (std::size_t i = 0; i < fr.values.size(); ++i) {
        double mag = std::abs(fr.values[i]);
        if (mag < 1e-300) throw ZeroMagnitude("zero magnitude in Bode conversion");
        double arg = std::arg(fr.values[i]);
        if (i == 0) {
            acc = arg;
        } else {
            double d = arg - prev_arg;
            while (d > pi) d -= 2.0 * pi;
            while (d <= -pi) d += 2.0 * pi;
            acc += d;
        }
        prev_arg = arg;
        rows[i] = {fr.grid.omegas[i], 20.0 * std::log10(mag), acc * 180.0 / pi};
    }
    return rows;
}

struct HinfConfig {
    double omega_lo = 0.0; // 0 = derive from params as 1e-6 * c^2
    double omega_hi = 0.0;
    int grid_points = 2000;
    double ln_tol = 1e-8; // golden-section tolerance in ln(omega)
};

struct HinfResult {
    double norm = 0.0;
    double argmax_omega = 0.0;
};

// sup over omega of |delta(j omega)| by a log-spaced sweep plus golden-section
// refinement around every local maximum
inline HinfResult hinf_norm(const Rational& delta, const TreeParams& p, HinfConfig cfg = {}) {
    double c2 = p.k / p.b;
    double lo = cfg.omega_lo > 0.0 ? cfg.omega_lo : 1e-6 * c2;
    double hi = cfg.omega_hi > 0.0 ? cfg.omega_hi : 1e6 * c2;
    if (!(hi > lo) || cfg.grid_points < 16) throw ValidationError("bad norm search config");

    if (delta.den.degree() >= 1) {
        static const double quarter_pi = 0.78539816339744830961566084581988;
        for (const auto& r : roots(delta.den)) {
            if (std::abs(r) < 1e-12) throw PoleOnAxis("pole at s = 0");
            double a = std::arg(r);
            if (std::abs(std::abs(a) - quarter_pi) < 1e-9)
                throw PoleOnAxis("pole on the imaginary s-axis");
        }
    }

    auto mag = [&](double omega) { return std::abs(evaluate_jomega(delta, omega)); };

    int n = cfg.grid_points;
    std::vector<double> lw(n), m(n);
    double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < n; ++i) {
        lw[i] = la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1);
        m[i] = mag(std::exp(lw[i]));
    }

    HinfResult best;
    auto consider = [&](double omega, double value) {
        if (value > best.norm) {
            best.norm = value;
            best.argmax_omega = omega;
        }
    };
    for (int i = 0; i < n; ++i) consider(std::exp(lw[i]), m[i]);
    for (int i = 0; i < n; ++i) {
        bool local_max = (i == 0 || m[i] >= m[i - 1]) && (i == n - 1 || m[i] >= m[i + 1]);
        if (!local_max) continue;
        double a = lw[std::max(0, i - 1)];
        double b = lw[std::min(n - 1, i + 1)];
        double lx = golden_min([&](double t) { return -mag(std::exp(t)); }, a, b, cfg.ln_tol);
        consider(std::exp(lx), mag(std::exp(lx)));
    }
    return best;
}

struct NormSweepRow {
    Location location;
    double epsilon = 0.0;
    double hinf = 0.0;
    double argmax_omega = 0.0;
};

// one hinf row per (location, epsilon); rows ordered by location, then epsilon
// descending
inline std::vector<NormSweepRow> norm_vs_epsilon(std::vector<Location> locations,
                                                 std::vector<double> eps_grid,
                                                 const TreeParams& p) {
    if (locations.empty() || eps_grid.empty()) throw ValidationError("empty norm sweep request");
    for (double e : eps_grid)
        if (!(e > 0.0) || !(e < 1.0)) throw DomainError("epsilon grid must lie in (0, 1)");
    std::sort(locations.begin(), locations.end());
    locations.erase(std::unique(locations.begin(), locations.end(),
                                [](const Location& a, const Location& b) { return a == b; }),
                    locations.end());
    std::sort(eps_grid.begin(), eps_grid.end(), std::greater<double>());

    std::vector<NormSweepRow> rows(locations.size() * eps_grid.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        const Location& loc = locations[i / eps_grid.size()];
        double eps = eps_grid[i % eps_grid.size()];
        DamageSpec d;
        d.where = loc;
        d.epsilon = eps;
        HinfResult hr = hinf_norm(delta_for(d, p), p);
        rows[i] = {loc, eps, hr.norm, hr.argmax_omega};
    });
    return rows;
}

} // namespace fractree
