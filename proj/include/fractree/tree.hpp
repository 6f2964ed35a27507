#pragma once

#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fractree/parallel.hpp"
#include "fractree/rational.hpp"

namespace fractree {

struct TreeParams {
    double k = 2.0;
    double b = 1.0;

    TreeParams() = default;
    TreeParams(double k_, double b_) : k(k_), b(b_) {
        if (!(k > 0.0) || !(b > 0.0)) throw DomainError("tree constants must be positive");
    }
    double c() const { return std::sqrt(k / b); }
};

enum class Kind { spring, damper };

inline const char* kind_name(Kind kd) { return kd == Kind::spring ? "spring" : "damper"; }

// component address: generation g holds 2^(g-1) springs and 2^(g-1) dampers,
// indices 1..2^(g-1); 1..2^(g-2) sit in the upper subtree, the rest in the lower
struct Location {
    int generation = 1;
    int index = 1;
    Kind kind = Kind::spring;

    void validate() const {
        if (generation < 1) throw DomainError("generation must be >= 1");
        if (generation > 30) throw DomainError("generation out of supported range");
        long long count = 1LL << (generation - 1);
        if (index < 1 || index > count) throw DomainError("index out of range for generation");
    }
    bool operator==(const Location& o) const {
        return generation == o.generation && index == o.index && kind == o.kind;
    }
    bool operator<(const Location& o) const {
        return std::tie(generation, index, kind) < std::tie(o.generation, o.index, o.kind);
    }
};

inline std::string location_name(const Location& l) {
    return std::string(l.kind == Kind::spring ? "k" : "b") + "_" +
           std::to_string(l.generation) + "," + std::to_string(l.index);
}

struct DamageSpec {
    Location where;
    double epsilon = 1.0;

    void validate() const {
        where.validate();
        if (!(epsilon > 0.0) || epsilon > 1.0) throw DomainError("epsilon must lie in (0, 1]");
    }
};

// sparse per-component constants for the finite-tree oracle
struct ConstantsOverride {
    std::map<std::pair<int, int>, double> spring;
    std::map<std::pair<int, int>, double> damper;

    void set(const Location& l, double value) {
        if (!(value > 0.0)) throw DomainError("component constant must be positive");
        l.validate();
        auto key = std::make_pair(l.generation, l.index);
        (l.kind == Kind::spring ? spring : damper)[key] = value;
    }
    bool empty() const { return spring.empty() && damper.empty(); }
};

enum class TerminationMode { tail, rigid };

inline Complex undamaged_response(const TreeParams& p, Complex s) {
    if (s == Complex(0.0, 0.0)) throw ZeroFrequency("response unbounded at s = 0");
    Complex w = half_order_var(s);
    return 1.0 / (std::sqrt(p.k * p.b) * w);
}

inline Complex recurrence_step(Complex gu, Complex gl, double kt, double bt, Complex s) {
    Complex za = 1.0 / kt + gu;
    Complex zb = 1.0 / (bt * s) + gl;
    if (std::abs(za) < 1e-300 || std::abs(zb) < 1e-300)
        throw DegenerateBranch("branch impedance vanishes");
    Complex y = 1.0 / za + 1.0 / zb;
    if (std::abs(y) < 1e-300) throw DegenerateBranch("total admittance vanishes");
    return 1.0 / y;
}

// generation-1 disturbance, expanded coefficients; epsilon = 1 collapses to 1/1
inline Rational base_case_delta(Kind kind, double eps, const TreeParams& p) {
    if (!(eps > 0.0) || eps > 1.0) throw DomainError("epsilon must lie in (0, 1]");
    if (eps == 1.0) return Rational::one();
    double c = p.c();
    double c2 = c * c;
    if (kind == Kind::spring) {
        Polynomial num{eps * c2, (1.0 + eps) * c, 1.0};
        Polynomial den{eps * c2, 2.0 * eps * c, 1.0};
        return Rational(num, den);
    }
    Polynomial num{c2 / eps, (1.0 + 1.0 / eps) * c, 1.0};
    Polynomial den{c2 / eps, 2.0 * c, 1.0};
    return Rational(num, den);
}

namespace detail {

inline Polynomial step_den(const Polynomial& N, const Polynomial& D, double c) {
    // w^2 D + c w (N + D) + c^2 D
    Polynomial t = poly_shift(poly_shift(D));
    t = poly_add(t, poly_scale(poly_shift(poly_add(N, D)), c));
    return poly_add(t, poly_scale(D, c * c));
}

} // namespace detail

// damage in the upper half: num' = (w + c)(w D + c N), den' shared with step_lower
inline Rational step_upper(const Rational& delta, const TreeParams& p) {
    double c = p.c();
    Polynomial wc{c, 1.0};
    Polynomial num = poly_mul(wc, poly_add(poly_shift(delta.den), poly_scale(delta.num, c)));
    return normalize(Rational(num, detail::step_den(delta.num, delta.den, c)));
}

// damage in the lower half: num' = (w + c)(w N + c D), same denominator
inline Rational step_lower(const Rational& delta, const TreeParams& p) {
    double c = p.c();
    Polynomial wc{c, 1.0};
    Polynomial num = poly_mul(wc, poly_add(poly_shift(delta.num), poly_scale(delta.den, c)));
    return normalize(Rational(num, detail::step_den(delta.num, delta.den, c)));
}

inline Rational delta_for(const DamageSpec& damage, const TreeParams& p) {
    damage.validate();
    if (damage.epsilon == 1.0) return Rational::one();
    int g = damage.where.generation;
    int n = damage.where.index;
    if (g == 1) return base_case_delta(damage.where.kind, damage.epsilon, p);
    int half = 1 << (g - 2);
    DamageSpec inner = damage;
    inner.where.generation = g - 1;
    if (n <= half) {
        return step_upper(delta_for(inner, p), p);
    }
    inner.where.index = n - half;
    return step_lower(delta_for(inner, p), p);
}

struct FrequencyGrid {
    std::vector<double> omegas;

    FrequencyGrid() = default;
    explicit FrequencyGrid(std::vector<double> om) : omegas(std::move(om)) { validate(); }

    void validate() const {
        if (omegas.empty()) throw ValidationError("frequency grid is empty");
        double prev = 0.0;
        for (double w : omegas) {
            if (!std::isfinite(w) || w <= prev)
                throw ValidationError("frequency grid must be strictly increasing and positive");
            prev = w;
        }
    }
    std::size_t size() const { return omegas.size(); }
    bool operator==(const FrequencyGrid& o) const { return omegas == o.omegas; }
};

inline FrequencyGrid log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ValidationError("bad log grid bounds");
    std::vector<double> om(n);
    double la = std::log(lo), lb = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        om[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
    om.front() = lo;
    om.back() = hi;
    return FrequencyGrid(std::move(om));
}

struct FrequencyResponse {
    FrequencyGrid grid;
    std::vector<Complex> values;

    void validate() const {
        grid.validate();
        if (values.size() != grid.size()) throw ValidationError("response/grid length mismatch");
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NonFinite("response value is not finite");
    }
};

namespace detail {

struct FiniteTreeEval {
    const ConstantsOverride& ov;
    TerminationMode mode;
    const TreeParams& p;
    int depth;
    Complex s;
    Complex leaf;
    std::vector<Complex> clean; // response of an override-free subtree by height

    FiniteTreeEval(const ConstantsOverride& ov_, TerminationMode mode_, const TreeParams& p_,
                   int depth_, Complex s_)
        : ov(ov_), mode(mode_), p(p_), depth(depth_), s(s_) {
        leaf = mode == TerminationMode::tail ? undamaged_response(p, s) : Complex(0.0, 0.0);
        clean.resize(depth + 1);
        clean[0] = leaf;
        for (int h = 1; h <= depth; ++h)
            clean[h] = recurrence_step(clean[h - 1], clean[h - 1], p.k, p.b, s);
    }

    bool subtree_has_override(int g, int n) const {
        auto hit = [&](const std::map<std::pair<int, int>, double>& m) {
            for (const auto& [key, value] : m) {
                (void)value;
                int gg = key.first, nn = key.second;
                if (gg < g || gg > depth) continue;
                if (((nn - 1) >> (gg - g)) == n - 1) return true;
            }
            return false;
        };
        return hit(ov.spring) || hit(ov.damper);
    }

    Complex node(int g, int n) const {
        if (g > depth) return leaf;
        if (!subtree_has_override(g, n)) return clean[depth - g + 1];
        auto key = std::make_pair(g, n);
        auto it_k = ov.spring.find(key);
        auto it_b = ov.damper.find(key);
        double kk = it_k != ov.spring.end() ? it_k->second : p.k;
        double bb = it_b != ov.damper.end() ? it_b->second : p.b;
        return recurrence_step(node(g + 1, 2 * n - 1), node(g + 1, 2 * n), kk, bb, s);
    }
};

} // namespace detail

inline FrequencyResponse finite_tree_response(int depth, const ConstantsOverride& ov,
                                              TerminationMode mode, const TreeParams& p,
                                              const FrequencyGrid& grid) {
    if (depth < 1 || depth > 24) throw DepthLimit("depth must lie in [1, 24]");
    grid.validate();
    FrequencyResponse out;
    out.grid = grid;
    out.values.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        Complex s(0.0, grid.omegas[i]);
        detail::FiniteTreeEval ev(ov, mode, p, depth, s);
        out.values[i] = ev.node(1, 1);
    });
    return out;
}

} // namespace fractree
