#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fractree/assignment.hpp"
#include "fractree/roots.hpp"
#include "fractree/tree.hpp"

namespace fractree {

enum class RootKind { zero, pole };

struct ZeroPoleSet {
    std::vector<Complex> zeros; // root locations in the w-plane (the -z_j)
    std::vector<Complex> poles; // the -p_j
    double params_c = 0.0;

    double conjugation_defect_max() const {
        return std::max(conjugation_defect(zeros), conjugation_defect(poles));
    }
    // left-half-plane monitor (observed property, not an enforced invariant)
    bool left_half_plane(double tol = 1e-8) const {
        for (const auto& r : zeros)
            if (r.real() > tol) return false;
        for (const auto& r : poles)
            if (r.real() > tol) return false;
        return true;
    }
};

inline ZeroPoleSet zero_pole_set(const Rational& delta, const TreeParams& p) {
    if (delta.num == delta.den)
        throw DegenerateAllRootsEqual(
            "disturbance is identically 1; by convention all roots sit at -sqrt(k/b)");
    if (delta.num.degree() != delta.den.degree())
        throw ValidationError("disturbance must have equal numerator/denominator degree");
    double c = p.c();
    ZeroPoleSet out;
    out.params_c = c;

    double rem = 0.0;
    Polynomial cofactor = poly_deflate(delta.num, -c, &rem);
    if (std::abs(rem) <= 1e-9 * std::max(1.0, delta.num.max_abs_coeff())) {
        out.zeros = cofactor.degree() >= 1 ? roots(cofactor) : std::vector<Complex>{};
        out.zeros.push_back(Complex(-c, 0.0));
    } else {
        out.zeros = roots(delta.num);
    }
    out.poles = roots(delta.den);
    sort_canonical(out.zeros);
    sort_canonical(out.poles);
    return out;
}

struct LocusTable {
    Location location;
    double params_c = 0.0;
    std::vector<double> eps_samples;                 // strictly decreasing
    std::vector<std::vector<Complex>> zero_traj;     // [slot][sample]
    std::vector<std::vector<Complex>> pole_traj;
};

inline std::vector<double> default_eps_schedule(std::size_t n = 400, double hi = 1.0 - 1e-3,
                                                double lo = 1e-3) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo) || hi >= 1.0)
        throw ValidationError("bad epsilon schedule bounds");
    std::vector<double> out(n);
    double la = std::log(hi), lb = std::log(lo);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = hi;
    out.back() = lo;
    return out;
}

namespace detail {

struct MatchOutcome {
    std::vector<Complex> aligned;
    std::vector<double> displacement;
};

inline MatchOutcome match_roots(const std::vector<Complex>& prev,
                                const std::vector<Complex>& next) {
    std::size_t n = prev.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i][j] = std::abs(prev[i] - next[j]);
    std::vector<int> assign = min_cost_assignment(cost);
    MatchOutcome out;
    out.aligned.resize(n);
    out.displacement.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.aligned[i] = next[assign[i]];
        out.displacement[i] = cost[i][assign[i]];
    }
    return out;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace detail

// Traces every half-order zero/pole trajectory over the epsilon schedule.
// Roots of consecutive samples are matched by minimum-total-displacement
// assignment; steps whose matched displacement exceeds the adaptive continuity
// bound max(0.2 c, 3 x median step displacement) are bisected up to 12 levels,
// inserting the midpoints as extra samples.
inline LocusTable trace_locus(const Location& loc, const TreeParams& p,
                              const std::vector<double>& schedule) {
    loc.validate();
    if (schedule.size() < 2) throw ValidationError("epsilon schedule needs at least 2 samples");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        double e = schedule[i];
        if (!(e > 0.0) || e >= 1.0) throw ValidationError("epsilon schedule must lie in (0, 1)");
        if (i > 0 && e >= schedule[i - 1])
            throw ValidationError("epsilon schedule must be strictly decreasing");
    }
    if (schedule.back() < 1e-3 - 1e-15)
        throw ValidationError("epsilon schedule must end at or above 1e-3");

    double c = p.c();
    auto solve = [&](double eps) {
        DamageSpec d;
        d.where = loc;
        d.epsilon = eps;
        return zero_pole_set(delta_for(d, p), p);
    };

    // independent root solves in parallel, then sequential matching
    std::vector<ZeroPoleSet> sets(schedule.size());
    parallel_for(schedule.size(), [&](std::size_t i) { sets[i] = solve(schedule[i]); });

    std::size_t slots = sets[0].zeros.size();
    LocusTable table;
    table.location = loc;
    table.params_c = c;
    table.eps_samples.push_back(schedule[0]);
    table.zero_traj.assign(slots, {});
    table.pole_traj.assign(slots, {});
    for (std::size_t j = 0; j < slots; ++j) {
        table.zero_traj[j].push_back(sets[0].zeros[j]);
        table.pole_traj[j].push_back(sets[0].poles[j]);
    }

    std::vector<Complex> prev_z = sets[0].zeros;
    std::vector<Complex> prev_p = sets[0].poles;
    double prev_eps = schedule[0];

    auto append = [&](double eps, const std::vector<Complex>& zs, const std::vector<Complex>& ps) {
        table.eps_samples.push_back(eps);
        for (std::size_t j = 0; j < slots; ++j) {
            table.zero_traj[j].push_back(zs[j]);
            table.pole_traj[j].push_back(ps[j]);
        }
        prev_z = zs;
        prev_p = ps;
        prev_eps = eps;
    };

    std::function<void(double, const ZeroPoleSet*, int)> advance =
        [&](double target, const ZeroPoleSet* precomputed, int level) {
            ZeroPoleSet cur = precomputed ? *precomputed : solve(target);
            auto mz = detail::match_roots(prev_z, cur.zeros);
            auto mp = detail::match_roots(prev_p, cur.poles);
            std::vector<double> pooled = mz.displacement;
            pooled.insert(pooled.end(), mp.displacement.begin(), mp.displacement.end());
            double worst = *std::max_element(pooled.begin(), pooled.end());
            double bound = std::max(0.2 * c, 3.0 * detail::median(pooled));
            if (worst <= bound) {
                append(target, mz.aligned, mp.aligned);
                return;
            }
            if (level >= 12)
                throw ContinuityFailure("locus continuity not restored after 12 bisections in [" +
                                        std::to_string(target) + ", " + std::to_string(prev_eps) +
                                        "]");
            double mid = 0.5 * (prev_eps + target);
            advance(mid, nullptr, level + 1);
            advance(target, precomputed, level + 1);
        };

    for (std::size_t i = 1; i < schedule.size(); ++i) advance(schedule[i], &sets[i], 0);
    return table;
}

struct TrajectoryFit {
    RootKind kind = RootKind::zero;
    int slot = 0;
    std::vector<double> re_coeffs; // ascending powers of epsilon
    std::vector<double> im_coeffs;
    double residual = 0.0; // max abs error over in-validity samples
    double validity_lo = 0.0;
    double validity_hi = 0.0;
    int partner = -1; // global trajectory index of the conjugate partner
};

struct LocusFit {
    Location location;
    double params_c = 0.0;
    int degree = 0;
    std::vector<TrajectoryFit> trajectories; // zeros first, then poles
    double validity_lo = 0.0;                // intersection over trajectories
    double validity_hi = 0.0;
};

namespace detail {

inline std::vector<double> ols_poly(const std::vector<double>& xs, const std::vector<double>& ys,
                                    int degree) {
    Eigen::MatrixXd V(xs.size(), degree + 1);
    Eigen::VectorXd y(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double pw = 1.0;
        for (int j = 0; j <= degree; ++j) {
            V(i, j) = pw;
            pw *= xs[i];
        }
        y(i) = ys[i];
    }
    Eigen::VectorXd sol = V.colPivHouseholderQr().solve(y);
    std::vector<double> out(degree + 1);
    for (int j = 0; j <= degree; ++j) {
        if (!std::isfinite(sol(j))) throw IllConditioned("least-squares fit produced non-finite coefficients");
        out[j] = sol(j);
    }
    return out;
}

inline double eval_coeffs(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

struct TrajectoryData {
    std::vector<double> eps;
    std::vector<double> re, im;
    std::vector<double> mag;
};

// fit one trajectory: OLS, then a 2-fold interleaved cross-validation pass
// marks samples whose predicted-vs-actual distance exceeds
// 2e-3 * max(c, |root|); the fit keeps the longest contiguous good run as its
// validity interval and is refit inside it. When no run is long enough for
// the requested degree the whole sample range is kept and the (large)
// residual reports the misfit.
inline void fit_one(const TrajectoryData& d, int degree, double c, TrajectoryFit& out) {
    std::size_t m = d.eps.size();
    std::vector<std::size_t> even, odd;
    for (std::size_t i = 0; i < m; ++i) (i % 2 ? odd : even).push_back(i);

    auto gather = [&](const std::vector<std::size_t>& idx, const std::vector<double>& src) {
        std::vector<double> out_v(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) out_v[i] = src[idx[i]];
        return out_v;
    };
    auto xs_e = gather(even, d.eps), xs_o = gather(odd, d.eps);
    auto re_e = ols_poly(xs_e, gather(even, d.re), degree);
    auto im_e = ols_poly(xs_e, gather(even, d.im), degree);
    auto re_o = ols_poly(xs_o, gather(odd, d.re), degree);
    auto im_o = ols_poly(xs_o, gather(odd, d.im), degree);

    std::vector<char> good(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& rc = (i % 2) ? re_e : re_o; // predict with the other half
        const auto& ic = (i % 2) ? im_e : im_o;
        double dre = eval_coeffs(rc, d.eps[i]) - d.re[i];
        double dim = eval_coeffs(ic, d.eps[i]) - d.im[i];
        double err = std::hypot(dre, dim);
        good[i] = err <= 2e-3 * std::max(c, d.mag[i]) ? 1 : 0;
    }

    std::size_t best_lo = 0, best_len = 0, run_lo = 0, run_len = 0;
    for (std::size_t i = 0; i <= m; ++i) {
        if (i < m && good[i]) {
            if (run_len == 0) run_lo = i;
            ++run_len;
        } else {
            if (run_len > best_len) {
                best_len = run_len;
                best_lo = run_lo;
            }
            run_len = 0;
        }
    }
    if (best_len < 2 * static_cast<std::size_t>(degree + 1)) {
        best_lo = 0;
        best_len = m;
    }

    std::vector<double> xs(d.eps.begin() + best_lo, d.eps.begin() + best_lo + best_len);
    std::vector<double> re(d.re.begin() + best_lo, d.re.begin() + best_lo + best_len);
    std::vector<double> im(d.im.begin() + best_lo, d.im.begin() + best_lo + best_len);
    out.re_coeffs = ols_poly(xs, re, degree);
    out.im_coeffs = ols_poly(xs, im, degree);
    out.validity_lo = xs.back(); // eps runs high to low
    out.validity_hi = xs.front();
    out.residual = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dre = eval_coeffs(out.re_coeffs, xs[i]) - re[i];
        double dim = eval_coeffs(out.im_coeffs, xs[i]) - im[i];
        out.residual = std::max(out.residual, std::hypot(dre, dim));
    }
}

} // namespace detail

inline LocusFit fit_locus(const LocusTable& table, int degree) {
    if (degree < 0 || degree > 17) throw ValidationError("fit degree must lie in [0, 17]");
    std::size_t m = table.eps_samples.size();
    if (m < 2 * static_cast<std::size_t>(degree + 1))
        throw ValidationError("need at least 2*(degree+1) samples");

    double c = table.params_c;
    std::size_t slots = table.zero_traj.size();
    auto traj_at = [&](std::size_t g) -> const std::vector<Complex>& {
        return g < slots ? table.zero_traj[g] : table.pole_traj[g - slots];
    };
    std::size_t total = 2 * slots;

    LocusFit fit;
    fit.location = table.location;
    fit.params_c = c;
    fit.degree = degree;
    fit.trajectories.resize(total);

    for (std::size_t g = 0; g < total; ++g) {
        const auto& y = traj_at(g);
        TrajectoryFit& tf = fit.trajectories[g];
        tf.kind = g < slots ? RootKind::zero : RootKind::pole;
        tf.slot = static_cast<int>(g < slots ? g : g - slots);

        // conjugate partner within the same kind (first match wins)
        std::size_t base = g < slots ? 0 : slots;
        double scale = c;
        for (const auto& v : y) scale = std::max(scale, std::abs(v));
        for (std::size_t h = base; h < base + slots; ++h) {
            const auto& z = traj_at(h);
            double worst = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                worst = std::max(worst, std::abs(std::conj(y[i]) - z[i]));
            if (worst <= 1e-6 * scale) {
                tf.partner = static_cast<int>(h);
                break;
            }
        }

        // divergent trajectories are fit on the clipped domain eps >= 0.01
        detail::TrajectoryData d;
        bool divergent = false;
        for (const auto& v : y)
            if (std::abs(v) > 10.0 * c) divergent = true;
        for (std::size_t i = 0; i < m; ++i) {
            if (divergent && table.eps_samples[i] < 0.01) continue;
            d.eps.push_back(table.eps_samples[i]);
            d.re.push_back(y[i].real());
            d.im.push_back(y[i].imag());
            d.mag.push_back(std::abs(y[i]));
        }
        if (d.eps.size() < 2 * static_cast<std::size_t>(degree + 1))
            throw IllConditioned("too few samples after divergence clipping");
        detail::fit_one(d, degree, c, tf);
    }

    fit.validity_lo = 0.0;
    fit.validity_hi = 1.0;
    for (const auto& tf : fit.trajectories) {
        fit.validity_lo = std::max(fit.validity_lo, tf.validity_lo);
        fit.validity_hi = std::min(fit.validity_hi, tf.validity_hi);
    }
    if (!(fit.validity_lo < fit.validity_hi))
        throw IllConditioned("empty validity intersection across trajectories");
    return fit;
}

inline ZeroPoleSet eval_fit(const LocusFit& fit, double eps) {
    if (eps < fit.validity_lo - 1e-12 || eps > fit.validity_hi + 1e-12)
        throw OutOfValidity("epsilon outside the fit validity interval");
    std::size_t total = fit.trajectories.size();
    std::vector<Complex> vals(total);
    for (std::size_t g = 0; g < total; ++g)
        vals[g] = Complex(detail::eval_coeffs(fit.trajectories[g].re_coeffs, eps),
                          detail::eval_coeffs(fit.trajectories[g].im_coeffs, eps));

    // conjugate symmetry re-enforced by averaging mirrored pairs
    for (std::size_t g = 0; g < total; ++g) {
        int h = fit.trajectories[g].partner;
        if (h < 0 || static_cast<std::size_t>(h) < g) continue;
        if (static_cast<std::size_t>(h) == g) {
            vals[g] = Complex(vals[g].real(), 0.0);
        } else {
            Complex avg = 0.5 * (vals[g] + std::conj(vals[h]));
            vals[g] = avg;
            vals[h] = std::conj(avg);
        }
    }

    ZeroPoleSet out;
    out.params_c = fit.params_c;
    std::size_t slots = total / 2;
    out.zeros.assign(vals.begin(), vals.begin() + slots);
    out.poles.assign(vals.begin() + slots, vals.end());
    return out;
}

} // namespace fractree
