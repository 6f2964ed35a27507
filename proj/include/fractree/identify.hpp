#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fractree/analysis.hpp"
#include "fractree/locus.hpp"
#include "fractree/optimize.hpp"
#include "fractree/tree.hpp"

namespace fractree {

struct IdentificationTarget {
    FrequencyResponse response; // samples of the disturbance itself
    int assumed_generation = 1;
    TreeParams params;

    void validate() const {
        response.validate();
        if (assumed_generation < 1) throw ValidationError("assumed generation must be >= 1");
    }
};

// sum over the grid of pointwise relative complex errors
inline double relative_error(const FrequencyResponse& candidate, const FrequencyResponse& target) {
    if (!(candidate.grid == target.grid)) throw GridMismatch("responses live on different grids");
    if (candidate.values.size() != target.values.size())
        throw GridMismatch("responses have different lengths");
    double acc = 0.0;
    for (std::size_t i = 0; i < target.values.size(); ++i) {
        double t = std::abs(target.values[i]);
        if (t < 1e-300) throw ZeroTarget("target response vanishes at a grid point");
        acc += std::abs(candidate.values[i] - target.values[i]) / t;
    }
    return acc;
}

inline FrequencyGrid default_identify_grid() { return log_grid(1e-3, 1e3, 200); }

enum class IdentifyMode { unstructured, structured };
enum class StructuredSource { exact, locus_fit };

struct CandidateResult {
    Location location;
    double epsilon_hat = 0.0;
    double error = 0.0;
};

struct IdentificationResult {
    IdentifyMode mode = IdentifyMode::structured;
    Location location;
    double epsilon_hat = 0.0;
    std::vector<Complex> zeros;
    std::vector<Complex> poles;
    double error = 0.0;
    long iterations = 0;
    bool converged = false;
    std::vector<CandidateResult> candidates;
    std::uint64_t seed = 0;
};

struct UnstructuredConfig {
    int starts = 16;
    double perturb_scale = 0.5; // in units of c, around the undamaged root -c
    long max_iter = 2000;
    double ftol = 1e-10;
    std::uint64_t seed = 0;
};

namespace detail {

// parameter layout for generation g (dimension 4g - 1):
//   g-1 zero conjugate pairs as (t, im) with z = t^2 +/- j im,
//   1 free real zero as t with z = t^2,
//   g pole conjugate pairs as (t, im).
// z_1 = sqrt(k/b) is pinned and not a parameter; squared slacks keep
// Re(z), Re(p) >= 0.
struct UnstructuredModel {
    int g;
    double c;
    std::vector<Complex> w; // evaluation points

    std::size_t dim() const { return 4 * static_cast<std::size_t>(g) - 1; }

    static void mul_pair(std::vector<double>& poly, double re, double im) {
        // multiply by (w^2 + 2 re w + re^2 + im^2)
        std::vector<double> factor{re * re + im * im, 2.0 * re, 1.0};
        std::vector<double> out(poly.size() + 2, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i)
            for (std::size_t j = 0; j < 3; ++j) out[i + j] += poly[i] * factor[j];
        poly.swap(out);
    }
    static void mul_real(std::vector<double>& poly, double r) {
        // multiply by (w + r)
        std::vector<double> out(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            out[i] += poly[i] * r;
            out[i + 1] += poly[i];
        }
        poly.swap(out);
    }

    void build(const std::vector<double>& x, std::vector<double>& num,
               std::vector<double>& den) const {
        num.assign(1, 1.0);
        den.assign(1, 1.0);
        std::size_t at = 0;
        mul_real(num, c);
        for (int i = 0; i < g - 1; ++i) {
            double t = x[at++], im = x[at++];
            mul_pair(num, t * t, im);
        }
        double tf = x[at++];
        mul_real(num, tf * tf);
        for (int i = 0; i < g; ++i) {
            double t = x[at++], im = x[at++];
            mul_pair(den, t * t, im);
        }
    }

    double objective(const std::vector<double>& x, const FrequencyResponse& target) const {
        std::vector<double> num, den;
        build(x, num, den);
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            Complex nv(0.0, 0.0), dv(0.0, 0.0);
            for (std::size_t j = num.size(); j-- > 0;) nv = nv * w[i] + num[j];
            for (std::size_t j = den.size(); j-- > 0;) dv = dv * w[i] + den[j];
            if (std::abs(dv) < 1e-300) return 1e30;
            double t = std::abs(target.values[i]);
            acc += std::abs(nv / dv - target.values[i]) / t;
        }
        return acc;
    }

    void roots_from(const std::vector<double>& x, std::vector<Complex>& zeros,
                    std::vector<Complex>& poles) const {
        zeros.clear();
        poles.clear();
        zeros.push_back(Complex(-c, 0.0));
        std::size_t at = 0;
        for (int i = 0; i < g - 1; ++i) {
            double t = x[at++], im = x[at++];
            zeros.push_back(Complex(-t * t, im));
            zeros.push_back(Complex(-t * t, -im));
        }
        double tf = x[at++];
        zeros.push_back(Complex(-tf * tf, 0.0));
        for (int i = 0; i < g; ++i) {
            double t = x[at++], im = x[at++];
            poles.push_back(Complex(-t * t, im));
            poles.push_back(Complex(-t * t, -im));
        }
        sort_canonical(zeros);
        sort_canonical(poles);
    }
};

} // namespace detail

inline IdentificationResult identify_unstructured(const IdentificationTarget& target,
                                                  UnstructuredConfig cfg = {}) {
    target.validate();
    const auto& om = target.response.grid.omegas;
    if (om.back() / om.front() < 1e3 * (1.0 - 1e-12))
        throw ValidationError("target grid must span at least 3 decades");
    for (const auto& v : target.response.values)
        if (std::abs(v) < 1e-300) throw ZeroTarget("target response vanishes at a grid point");

    int g = target.assumed_generation;
    double c = target.params.c();
    detail::UnstructuredModel model;
    model.g = g;
    model.c = c;
    model.w.resize(om.size());
    for (std::size_t i = 0; i < om.size(); ++i) model.w[i] = half_order_var(Complex(0.0, om[i]));

    FrequencyResponse ones;
    ones.grid = target.response.grid;
    ones.values.assign(om.size(), Complex(1.0, 0.0));
    double baseline = relative_error(ones, target.response);

    auto objective = [&](const std::vector<double>& x) {
        return model.objective(x, target.response);
    };

    std::vector<NelderMeadResult> runs(cfg.starts);
    parallel_for(static_cast<std::size_t>(cfg.starts), [&](std::size_t idx) {
        RngStream rng = RngStream::substream(cfg.seed, idx);
        std::vector<double> x0(model.dim());
        std::size_t at = 0;
        auto slack_near_c = [&]() {
            return std::sqrt(std::abs(c + cfg.perturb_scale * c * rng.normal()));
        };
        for (int i = 0; i < g - 1; ++i) {
            x0[at++] = slack_near_c();
            x0[at++] = cfg.perturb_scale * c * rng.normal();
        }
        x0[at++] = slack_near_c();
        for (int i = 0; i < g; ++i) {
            x0[at++] = slack_near_c();
            x0[at++] = cfg.perturb_scale * c * rng.normal();
        }
        runs[idx] = nelder_mead(objective, x0, 0.1 * std::sqrt(c), cfg.max_iter, cfg.ftol);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].value < runs[best].value) best = i;
    if (baseline > 1e-9 && !(runs[best].value < baseline))
        throw NoImprovement("no start improved on the undamaged baseline");

    IdentificationResult res;
    res.mode = IdentifyMode::unstructured;
    res.error = runs[best].value;
    res.iterations = runs[best].iterations;
    res.converged = runs[best].converged;
    res.seed = cfg.seed;
    model.roots_from(runs[best].x, res.zeros, res.poles);
    return res;
}

struct StructuredConfig {
    int coarse_points = 64;
    double eps_lo = 1e-3;
    double eps_hi = 1.0 - 1e-3;
    double xtol = 1e-6;
};

namespace detail {

inline Rational rational_from_roots(const ZeroPoleSet& zp) {
    auto expand = [](const std::vector<Complex>& rs) {
        std::vector<Complex> poly{Complex(1.0, 0.0)};
        for (const auto& r : rs) {
            std::vector<Complex> out(poly.size() + 1, Complex(0.0, 0.0));
            for (std::size_t i = 0; i < poly.size(); ++i) {
                out[i] -= poly[i] * r;
                out[i + 1] += poly[i];
            }
            poly.swap(out);
        }
        std::vector<double> re(poly.size());
        for (std::size_t i = 0; i < poly.size(); ++i) re[i] = poly[i].real();
        return Polynomial(std::move(re));
    };
    return Rational(expand(zp.zeros), expand(zp.poles));
}

} // namespace detail

// single-scalar search per candidate location: 64-point coarse scan of the
// epsilon range, then golden-section refinement around the best bracket
inline IdentificationResult identify_structured(const IdentificationTarget& target,
                                                const std::vector<Location>& candidates,
                                                StructuredSource source,
                                                const std::vector<LocusFit>& fits = {},
                                                StructuredConfig cfg = {}) {
    target.validate();
    if (candidates.empty()) throw ValidationError("candidate list is empty");
    if (source == StructuredSource::locus_fit && fits.size() != candidates.size())
        throw ValidationError("locus-fit source needs one fit per candidate");
    for (const auto& v : target.response.values)
        if (std::abs(v) < 1e-300) throw ZeroTarget("target response vanishes at a grid point");

    long evals = 0;
    IdentificationResult res;
    res.mode = IdentifyMode::structured;
    res.candidates.resize(candidates.size());

    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const Location& loc = candidates[ci];
        loc.validate();
        double lo = cfg.eps_lo, hi = cfg.eps_hi;
        if (source == StructuredSource::locus_fit) {
            lo = std::max(lo, fits[ci].validity_lo);
            hi = std::min(hi, fits[ci].validity_hi);
        }
        if (!(lo < hi)) throw ValidationError("empty epsilon search range for a candidate");

        auto objective = [&](double eps) {
            ++evals;
            Rational delta;
            if (source == StructuredSource::exact) {
                DamageSpec d;
                d.where = loc;
                d.epsilon = eps;
                delta = delta_for(d, target.params);
            } else {
                delta = detail::rational_from_roots(eval_fit(fits[ci], eps));
            }
            FrequencyResponse cand = sample_rational(delta, target.response.grid);
            return relative_error(cand, target.response);
        };

        int n = cfg.coarse_points;
        std::vector<double> scan(n), val(n);
        double la = std::log(lo), lb = std::log(hi);
        for (int i = 0; i < n; ++i)
            scan[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
        scan.front() = lo;
        scan.back() = hi;
        for (int i = 0; i < n; ++i) val[i] = objective(scan[i]);
        int bi = 0;
        for (int i = 1; i < n; ++i)
            if (val[i] < val[bi]) bi = i;
        double a = scan[std::max(0, bi - 1)];
        double b = scan[std::min(n - 1, bi + 1)];
        double eps_hat = golden_min(objective, a, b, cfg.xtol);
        res.candidates[ci] = {loc, eps_hat, objective(eps_hat)};
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < res.candidates.size(); ++i)
        if (res.candidates[i].error < res.candidates[best].error) best = i;
    res.location = res.candidates[best].location;
    res.epsilon_hat = res.candidates[best].epsilon_hat;
    res.error = res.candidates[best].error;
    res.iterations = evals;
    res.converged = true;
    return res;
}

// (epsilon, error) rows with exact-constructed candidates, for plotting
inline std::vector<std::pair<double, double>> error_curve(const Location& loc,
                                                          const IdentificationTarget& target,
                                                          const std::vector<double>& eps_grid) {
    target.validate();
    loc.validate();
    if (eps_grid.empty()) throw ValidationError("empty epsilon grid");
    for (double e : eps_grid)
        if (!(e > 0.0) || !(e < 1.0)) throw DomainError("epsilon grid must lie in (0, 1)");
    std::vector<std::pair<double, double>> rows(eps_grid.size());
    parallel_for(eps_grid.size(), [&](std::size_t i) {
        DamageSpec d;
        d.where = loc;
        d.epsilon = eps_grid[i];
        FrequencyResponse cand = sample_rational(delta_for(d, target.params), target.response.grid);
        rows[i] = {eps_grid[i], relative_error(cand, target.response)};
    });
    return rows;
}

} // namespace fractree
