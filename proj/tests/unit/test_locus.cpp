#include <algorithm>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace fractree;
using testutil::worst_nearest_distance;

namespace {

ZeroPoleSet exact_set(const Location& loc, double eps, const TreeParams& p) {
    DamageSpec d{loc, eps};
    return zero_pole_set(delta_for(d, p), p);
}

std::vector<Complex> closed_form_all(Kind kind, double eps, const TreeParams& p, bool zeros) {
    auto cf = testutil::base_case_roots(kind, eps, p);
    return zeros ? cf.zeros : cf.poles;
}

} // namespace

TEST_CASE("minimum-cost assignment") {
    SECTION("two by two") {
        REQUIRE(min_cost_assignment({{1.0, 100.0}, {100.0, 1.0}}) == std::vector<int>{0, 1});
        REQUIRE(min_cost_assignment({{100.0, 1.0}, {1.0, 100.0}}) == std::vector<int>{1, 0});
    }
    SECTION("greedy would fail here") {
        // row-wise greedy picks (0,0) cost 1 then forces (1,1) cost 10; the
        // optimum is the anti-diagonal with total 4
        REQUIRE(min_cost_assignment({{1.0, 2.0}, {2.0, 10.0}}) == std::vector<int>{1, 0});
    }
    SECTION("four by four permutation") {
        std::vector<std::vector<double>> cost(4, std::vector<double>(4, 5.0));
        cost[0][2] = 0.0;
        cost[1][0] = 0.0;
        cost[2][3] = 0.0;
        cost[3][1] = 0.0;
        REQUIRE(min_cost_assignment(cost) == std::vector<int>{2, 0, 3, 1});
    }
}

TEST_CASE("zero and pole extraction") {
    TreeParams p(2.0, 1.0);
    double c = p.c();
    SECTION("undamaged input is degenerate") {
        DamageSpec d{{1, 1, Kind::spring}, 1.0};
        REQUIRE_THROWS_AS(zero_pole_set(delta_for(d, p), p), DegenerateAllRootsEqual);
    }
    SECTION("generation one matches the quadratic formulas") {
        for (auto kind : {Kind::spring, Kind::damper}) {
            for (double eps : {0.9, 0.5, 0.1, 0.01}) {
                ZeroPoleSet zp = exact_set({1, 1, kind}, eps, p);
                REQUIRE(zp.zeros.size() == 2);
                REQUIRE(zp.poles.size() == 2);
                REQUIRE(worst_nearest_distance(closed_form_all(kind, eps, p, true), zp.zeros) <=
                        1e-9);
                REQUIRE(worst_nearest_distance(closed_form_all(kind, eps, p, false), zp.poles) <=
                        1e-9);
                REQUIRE(zp.conjugation_defect_max() <= 1e-9);
                REQUIRE(zp.left_half_plane());
            }
        }
    }
    SECTION("structural zero is reported exactly") {
        ZeroPoleSet zp = exact_set({2, 1, Kind::spring}, 0.35, p);
        REQUIRE(std::find(zp.zeros.begin(), zp.zeros.end(), Complex(-c, 0.0)) != zp.zeros.end());
    }
    SECTION("small damper damage pushes one zero far out") {
        double eps = 0.01;
        ZeroPoleSet zp = exact_set({1, 1, Kind::damper}, eps, p);
        double far = 0.0;
        for (const auto& z : zp.zeros) far = std::max(far, std::abs(z));
        REQUIRE_THAT(far, Catch::Matchers::WithinRel(c / eps, 1e-9));
        for (const auto& q : zp.poles) REQUIRE(std::abs(q) <= 11.0 * c);
    }
    SECTION("small spring damage keeps every root bounded") {
        ZeroPoleSet zp = exact_set({1, 1, Kind::spring}, 0.01, p);
        for (const auto& z : zp.zeros) REQUIRE(std::abs(z) <= 2.0 * c);
        for (const auto& q : zp.poles) REQUIRE(std::abs(q) <= 2.0 * c);
    }
}

TEST_CASE("epsilon schedule") {
    auto sched = default_eps_schedule();
    REQUIRE(sched.size() == 400);
    REQUIRE(sched.front() == 1.0 - 1e-3);
    REQUIRE(sched.back() == 1e-3);
    for (std::size_t i = 1; i < sched.size(); ++i) REQUIRE(sched[i] < sched[i - 1]);

    TreeParams p(2.0, 1.0);
    Location loc{1, 1, Kind::spring};
    REQUIRE_THROWS_AS(trace_locus(loc, p, {0.5, 0.5}), ValidationError);
    REQUIRE_THROWS_AS(trace_locus(loc, p, {0.5, 0.9}), ValidationError);
    REQUIRE_THROWS_AS(trace_locus(loc, p, {0.9, 1e-4}), ValidationError);
    REQUIRE_THROWS_AS(trace_locus(loc, p, {1.0, 0.5}), ValidationError);
    REQUIRE_THROWS_AS(trace_locus(loc, p, {0.5}), ValidationError);
}

TEST_CASE("traced loci at generation one follow the closed forms") {
    TreeParams p(2.0, 1.0);
    LocusTable table = trace_locus({1, 1, Kind::spring}, p, default_eps_schedule());
    REQUIRE(table.eps_samples.size() >= 400);
    for (std::size_t i = 0; i < table.eps_samples.size(); i += 7) {
        double eps = table.eps_samples[i];
        std::vector<Complex> zs{table.zero_traj[0][i], table.zero_traj[1][i]};
        std::vector<Complex> ps{table.pole_traj[0][i], table.pole_traj[1][i]};
        REQUIRE(worst_nearest_distance(closed_form_all(Kind::spring, eps, p, true), zs) <= 1e-8);
        REQUIRE(worst_nearest_distance(closed_form_all(Kind::spring, eps, p, false), ps) <= 1e-8);
    }
}

TEST_CASE("trajectory continuity and slot identity") {
    TreeParams p(2.0, 1.0);
    double c = p.c();
    LocusTable table = trace_locus({1, 1, Kind::damper}, p, default_eps_schedule());
    std::size_t m = table.eps_samples.size();

    SECTION("moving zero follows minus c over epsilon monotonically") {
        std::size_t slot =
            std::abs(table.zero_traj[0][m - 1]) > std::abs(table.zero_traj[1][m - 1]) ? 0 : 1;
        double prev_mag = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            Complex z = table.zero_traj[slot][i];
            REQUIRE_THAT(std::abs(z - Complex(-c / table.eps_samples[i], 0.0)),
                         Catch::Matchers::WithinAbs(0.0, 1e-8 * std::abs(z)));
            REQUIRE(std::abs(z) > prev_mag);
            prev_mag = std::abs(z);
        }
    }
    SECTION("each step respects the continuity bound") {
        for (std::size_t j = 0; j < table.zero_traj.size(); ++j) {
            for (std::size_t i = 1; i < m; ++i) {
                REQUIRE(std::abs(table.zero_traj[j][i] - table.zero_traj[j][i - 1]) <= 2.0 * c);
                REQUIRE(std::abs(table.pole_traj[j][i] - table.pole_traj[j][i - 1]) <= 2.0 * c);
            }
        }
    }
}

TEST_CASE("traced samples are a permutation of the direct solve") {
    TreeParams p(2.0, 1.0);
    Location loc{2, 1, Kind::spring};
    LocusTable table = trace_locus(loc, p, default_eps_schedule());
    std::size_t m = table.eps_samples.size();
    for (std::size_t i : {std::size_t{0}, m / 3, m - 1}) {
        ZeroPoleSet direct = exact_set(loc, table.eps_samples[i], p);
        std::vector<Complex> zs, ps;
        for (std::size_t j = 0; j < table.zero_traj.size(); ++j) {
            zs.push_back(table.zero_traj[j][i]);
            ps.push_back(table.pole_traj[j][i]);
        }
        sort_canonical(zs);
        sort_canonical(ps);
        REQUIRE(zs == direct.zeros);
        REQUIRE(ps == direct.poles);
    }
}

TEST_CASE("roots emanate from the confluent point") {
    TreeParams p(2.0, 1.0);
    double c = p.c();
    for (auto kind : {Kind::spring, Kind::damper}) {
        ZeroPoleSet zp = exact_set({2, 1, kind}, 1.0 - 1e-3, p);
        for (const auto& z : zp.zeros) REQUIRE(std::abs(z + c) <= 0.5 * c);
        for (const auto& q : zp.poles) REQUIRE(std::abs(q + c) <= 0.5 * c);
    }
}

TEST_CASE("mirror locations share pole trajectories") {
    TreeParams p(2.0, 1.0);
    for (double eps : {0.9, 0.5, 0.2, 0.05, 0.002}) {
        ZeroPoleSet a = exact_set({2, 1, Kind::spring}, eps, p);
        ZeroPoleSet b = exact_set({2, 2, Kind::spring}, eps, p);
        REQUIRE(worst_nearest_distance(a.poles, b.poles) <= 1e-9);
        REQUIRE(worst_nearest_distance(a.zeros, b.zeros) > 1e-3 * p.c());
    }
}

TEST_CASE("polynomial fits of the trajectories") {
    TreeParams p(2.0, 1.0);
    double c = p.c();
    LocusTable table = trace_locus({2, 1, Kind::spring}, p, default_eps_schedule());
    LocusFit fit = fit_locus(table, 17);

    SECTION("fixed zero fits as a constant") {
        bool found = false;
        for (const auto& tf : fit.trajectories) {
            if (tf.kind != RootKind::zero) continue;
            double at_mid = detail::eval_coeffs(tf.re_coeffs, 0.5);
            if (std::abs(at_mid + c) > 1e-3) continue;
            found = true;
            REQUIRE(tf.residual <= 1e-9);
            for (double eps : {0.9, 0.5, 0.1, 0.01}) {
                REQUIRE_THAT(detail::eval_coeffs(tf.re_coeffs, eps),
                             Catch::Matchers::WithinAbs(-c, 1e-9));
                REQUIRE_THAT(detail::eval_coeffs(tf.im_coeffs, eps),
                             Catch::Matchers::WithinAbs(0.0, 1e-9));
            }
        }
        REQUIRE(found);
    }
    SECTION("validity interval is a strict sub-range ending before one") {
        REQUIRE(fit.validity_lo < fit.validity_hi);
        REQUIRE(fit.validity_hi < 0.999);
        REQUIRE(fit.validity_lo <= 0.01);
    }
    SECTION("evaluation at an in-range sample stays within the residual") {
        double worst_res = 0.0;
        for (const auto& tf : fit.trajectories) worst_res = std::max(worst_res, tf.residual);
        std::size_t i = table.eps_samples.size() / 2;
        double eps = table.eps_samples[i];
        REQUIRE(eps > fit.validity_lo);
        REQUIRE(eps < fit.validity_hi);
        ZeroPoleSet predicted = eval_fit(fit, eps);
        ZeroPoleSet exact = exact_set({2, 1, Kind::spring}, eps, p);
        REQUIRE(worst_nearest_distance(predicted.zeros, exact.zeros) <= worst_res + 1e-10);
        REQUIRE(worst_nearest_distance(predicted.poles, exact.poles) <= worst_res + 1e-10);
    }
    SECTION("holdout accuracy inside the validity interval") {
        double lo = std::max(fit.validity_lo, 1.05e-3);
        double hi = fit.validity_hi * 0.999;
        for (int t = 0; t < 50; ++t) {
            double eps = lo * std::exp(std::log(hi / lo) * (t + 0.5) / 50.0);
            ZeroPoleSet predicted = eval_fit(fit, eps);
            ZeroPoleSet exact = exact_set({2, 1, Kind::spring}, eps, p);
            REQUIRE(worst_nearest_distance(predicted.zeros, exact.zeros) <= 1e-3 * c);
            REQUIRE(worst_nearest_distance(predicted.poles, exact.poles) <= 1e-2 * c);
        }
    }
    SECTION("small epsilon evaluation supports identification") {
        ZeroPoleSet predicted = eval_fit(fit, 0.01);
        ZeroPoleSet exact = exact_set({2, 1, Kind::spring}, 0.01, p);
        REQUIRE(worst_nearest_distance(predicted.zeros, exact.zeros) <= 1e-2 * c);
        REQUIRE(worst_nearest_distance(predicted.poles, exact.poles) <= 1e-2 * c);
    }
    SECTION("evaluation outside the interval is refused") {
        REQUIRE_THROWS_AS(eval_fit(fit, 0.999), OutOfValidity);
        REQUIRE_THROWS_AS(eval_fit(fit, 0.5 * fit.validity_lo), OutOfValidity);
    }
    SECTION("near-confluent roots sit well away from the limit point") {
        // the root spread at eps = 0.999 decays like a fractional power of
        // 1 - eps, far too slow for a polynomial in eps to track to 1e-2 c
        ZeroPoleSet zp = exact_set({2, 1, Kind::spring}, 0.999, p);
        double lo_d = HUGE_VAL, hi_d = 0.0;
        auto scan = [&](const std::vector<Complex>& rs) {
            for (const auto& r : rs) {
                double d = std::abs(r + c);
                if (d <= 1e-3 * c) continue; // the pinned structural zero
                lo_d = std::min(lo_d, d);
                hi_d = std::max(hi_d, d);
            }
        };
        scan(zp.zeros);
        scan(zp.poles);
        REQUIRE(lo_d >= 0.02 * c);
        REQUIRE(hi_d <= 0.5 * c);
        REQUIRE(hi_d >= 0.1 * c);
    }
    SECTION("conjugate partners are symmetric") {
        for (std::size_t g = 0; g < fit.trajectories.size(); ++g) {
            int h = fit.trajectories[g].partner;
            if (h < 0) continue;
            REQUIRE(fit.trajectories[h].partner == static_cast<int>(g));
        }
    }
}

TEST_CASE("divergent damper trajectories are clipped before fitting") {
    TreeParams p(2.0, 1.0);
    double c = p.c();
    LocusTable table = trace_locus({1, 1, Kind::damper}, p, default_eps_schedule());
    LocusFit fit = fit_locus(table, 17);

    // the table reaches eps = 1e-3 where the poles sit near 31 c, but the
    // divergent trajectories are only fit from 0.01 upward
    REQUIRE(fit.validity_lo >= 0.009);
    REQUIRE(fit.validity_lo < fit.validity_hi);
    REQUIRE_THROWS_AS(eval_fit(fit, 0.005), OutOfValidity);

    // residuals are recorded, not asserted small: the 1/eps zero is not a
    // polynomial and its misfit must show up honestly
    double fixed_zero_residual = HUGE_VAL;
    double worst_residual = 0.0;
    for (const auto& tf : fit.trajectories) {
        REQUIRE(std::isfinite(tf.residual));
        for (double v : tf.re_coeffs) REQUIRE(std::isfinite(v));
        for (double v : tf.im_coeffs) REQUIRE(std::isfinite(v));
        worst_residual = std::max(worst_residual, tf.residual);
        if (tf.kind == RootKind::zero)
            fixed_zero_residual = std::min(fixed_zero_residual, tf.residual);
    }
    REQUIRE(fixed_zero_residual <= 1e-10);
    REQUIRE(worst_residual > 1e-10);
    (void)c;
}

TEST_CASE("fit input validation") {
    TreeParams p(2.0, 1.0);
    LocusTable table = trace_locus({1, 1, Kind::spring}, p, default_eps_schedule(40));
    REQUIRE_THROWS_AS(fit_locus(table, 18), ValidationError);
    REQUIRE_THROWS_AS(fit_locus(table, -1), ValidationError);
    REQUIRE_THROWS_AS(fit_locus(table, 30), ValidationError);
    LocusTable tiny = trace_locus({1, 1, Kind::spring}, p, default_eps_schedule(10));
    REQUIRE_THROWS_AS(fit_locus(tiny, 17), ValidationError);
}

TEST_CASE("straight trajectory is recovered by a linear fit") {
    TreeParams p(2.0, 1.0);
    double c = p.c();
    LocusTable table = trace_locus({1, 1, Kind::spring}, p, default_eps_schedule());
    // pole real parts of the generation-one spring case follow -eps c exactly
    std::vector<double> xs = table.eps_samples;
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = table.pole_traj[0][i].real();
    auto coeffs = detail::ols_poly(xs, ys, 1);
    REQUIRE_THAT(coeffs[0], Catch::Matchers::WithinAbs(0.0, 1e-10));
    REQUIRE_THAT(coeffs[1], Catch::Matchers::WithinAbs(-c, 1e-10));
}
