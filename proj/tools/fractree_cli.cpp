// Command-line surface: constructs disturbances, traces and fits loci, emits
// Bode and norm-sweep data, compares against the finite-tree oracle, and runs
// damage identification.  All file outputs are written atomically and use full
// double precision, so identical flags and seed give byte-identical artifacts.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fractree/fractree.hpp"

namespace {

using namespace fractree;

struct GridSpec {
    double lo = 1e-4;
    double hi = 1e4;
    std::size_t n = 400;
};

GridSpec parse_triplet(const std::string& s, const char* what) {
    GridSpec g;
    std::size_t p1 = s.find(':');
    std::size_t p2 = p1 == std::string::npos ? std::string::npos : s.find(':', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw ValidationError(std::string(what) + " must be lo:hi:count, got '" + s + "'");
    try {
        g.lo = std::stod(s.substr(0, p1));
        g.hi = std::stod(s.substr(p1 + 1, p2 - p1 - 1));
        g.n = static_cast<std::size_t>(std::stoul(s.substr(p2 + 1)));
    } catch (const std::exception&) {
        throw ValidationError(std::string(what) + " must be lo:hi:count, got '" + s + "'");
    }
    return g;
}

std::vector<double> linspace(const GridSpec& g) {
    if (g.n < 2) throw ValidationError("need at least 2 grid points");
    std::vector<double> out(g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        out[i] = g.lo + (g.hi - g.lo) * static_cast<double>(i) / static_cast<double>(g.n - 1);
    return out;
}

std::vector<Location> parse_location_set(const std::string& s) {
    std::vector<Location> out;
    if (s.rfind("g<=", 0) == 0) {
        int gmax = std::stoi(s.substr(3));
        if (gmax < 1 || gmax > 8) throw ValidationError("location set bound must be 1..8");
        for (int g = 1; g <= gmax; ++g)
            for (int n = 1; n <= (1 << (g - 1)); ++n)
                for (Kind kd : {Kind::spring, Kind::damper}) out.push_back({g, n, kd});
        return out;
    }
    std::size_t at = 0;
    while (at < s.size()) {
        std::size_t comma = s.find(',', at);
        std::size_t end = comma == std::string::npos ? s.size() : comma;
        out.push_back(parse_location(s.substr(at, end - at)));
        at = end + 1;
    }
    if (out.empty()) throw ValidationError("empty location set");
    return out;
}

// parse "g:n:kind:eps" used by --target-from
DamageSpec parse_damage(const std::string& s) {
    std::size_t last = s.rfind(':');
    if (last == std::string::npos) throw ValidationError("expected g:n:kind:epsilon");
    DamageSpec d;
    d.where = parse_location(s.substr(0, last));
    try {
        d.epsilon = std::stod(s.substr(last + 1));
    } catch (const std::exception&) {
        throw ValidationError("bad epsilon in '" + s + "'");
    }
    d.validate();
    return d;
}

struct Common {
    double k = 2.0;
    double b = 1.0;
    TreeParams params() const { return TreeParams(k, b); }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--k", c.k, "spring constant (default 2)");
    cmd->add_option("--b", c.b, "damper constant (default 1)");
}

void print_roots(const char* label, const std::vector<Complex>& rs) {
    std::printf("%s:", label);
    for (const auto& r : rs) std::printf(" (%.6g%+.6gj)", r.real(), r.imag());
    std::printf("\n");
}

FrequencyResponse load_target(const std::string& target_path, const std::string& target_from,
                              bool divide_out, const TreeParams& params) {
    FrequencyResponse fr;
    if (!target_from.empty()) {
        DamageSpec d = parse_damage(target_from);
        fr = sample_rational(delta_for(d, params), default_identify_grid());
    } else {
        fr = target_from_csv(read_file(target_path));
    }
    if (divide_out) {
        for (std::size_t i = 0; i < fr.values.size(); ++i) {
            Complex g = undamaged_response(params, Complex(0.0, fr.grid.omegas[i]));
            fr.values[i] /= g;
        }
    }
    return fr;
}

int run(int argc, char** argv) {
    CLI::App app{"fractional-order spring-damper tree toolbox"};
    app.require_subcommand(1);

    // delta
    auto* cmd_delta = app.add_subcommand("delta", "construct the disturbance for one damage");
    Common del_c;
    std::string del_loc, del_out;
    double del_eps = 0.5;
    add_common(cmd_delta, del_c);
    cmd_delta->add_option("--location", del_loc, "damage address g:n:spring|damper")->required();
    cmd_delta->add_option("--epsilon", del_eps, "damage amount in (0, 1]")->required();
    cmd_delta->add_option("--out", del_out, "output JSON path")->required();
    cmd_delta->callback([&] {
        TreeParams p = del_c.params();
        DamageSpec d;
        d.where = parse_location(del_loc);
        d.epsilon = del_eps;
        d.validate();
        Rational delta = delta_for(d, p);
        atomic_write(del_out, delta_json(delta, d, p));
        std::printf("wrote %s (degree %d / %d)\n", del_out.c_str(), delta.num.degree(),
                    delta.den.degree());
        if (d.epsilon < 1.0) {
            ZeroPoleSet zp = zero_pole_set(delta, p);
            print_roots("zeros", zp.zeros);
            print_roots("poles", zp.poles);
        } else {
            std::printf("undamaged: disturbance is identically 1\n");
        }
    });

    // locus
    auto* cmd_locus = app.add_subcommand("locus", "trace root trajectories over epsilon");
    Common loc_c;
    std::string loc_loc, loc_out;
    std::size_t loc_samples = 400;
    double loc_start = 1.0 - 1e-3, loc_end = 1e-3;
    add_common(cmd_locus, loc_c);
    cmd_locus->add_option("--location", loc_loc)->required();
    cmd_locus->add_option("--samples", loc_samples, "schedule length (default 400)");
    cmd_locus->add_option("--eps-start", loc_start, "schedule start (default 0.999)");
    cmd_locus->add_option("--eps-end", loc_end, "schedule end (default 0.001)");
    cmd_locus->add_option("--out", loc_out, "output CSV path")->required();
    cmd_locus->callback([&] {
        TreeParams p = loc_c.params();
        LocusTable t =
            trace_locus(parse_location(loc_loc), p, default_eps_schedule(loc_samples, loc_start, loc_end));
        atomic_write(loc_out, locus_csv(t));
        std::printf("wrote %s (%zu samples, %zu+%zu trajectories)\n", loc_out.c_str(),
                    t.eps_samples.size(), t.zero_traj.size(), t.pole_traj.size());
    });

    // fit
    auto* cmd_fit = app.add_subcommand("fit", "polynomial-in-epsilon fit of the traced locus");
    Common fit_c;
    std::string fit_loc, fit_out;
    std::size_t fit_samples = 400;
    int fit_degree = 17;
    add_common(cmd_fit, fit_c);
    cmd_fit->add_option("--location", fit_loc)->required();
    cmd_fit->add_option("--degree", fit_degree, "fit degree <= 17 (default 17)");
    cmd_fit->add_option("--samples", fit_samples, "schedule length (default 400)");
    cmd_fit->add_option("--out", fit_out, "output JSON path")->required();
    cmd_fit->callback([&] {
        TreeParams p = fit_c.params();
        LocusTable t = trace_locus(parse_location(fit_loc), p, default_eps_schedule(fit_samples));
        LocusFit f = fit_locus(t, fit_degree);
        atomic_write(fit_out, locus_fit_json(f));
        double worst = 0.0;
        for (const auto& tr : f.trajectories) worst = std::max(worst, tr.residual);
        std::printf("wrote %s (validity [%.6g, %.6g], worst residual %.3e)\n", fit_out.c_str(),
                    f.validity_lo, f.validity_hi, worst);
    });

    // bode
    auto* cmd_bode = app.add_subcommand("bode", "Bode data for a disturbance or tree response");
    Common bod_c;
    std::string bod_loc, bod_out, bod_grid = "1e-4:1e4:400", bod_transfer = "delta";
    double bod_eps = 0.5;
    add_common(cmd_bode, bod_c);
    cmd_bode->add_option("--location", bod_loc)->required();
    cmd_bode->add_option("--epsilon", bod_eps)->required();
    cmd_bode->add_option("--grid", bod_grid, "omega grid lo:hi:count, log-spaced");
    cmd_bode->add_option("--transfer", bod_transfer, "delta | damaged | ginf (default delta)");
    cmd_bode->add_option("--out", bod_out)->required();
    cmd_bode->callback([&] {
        TreeParams p = bod_c.params();
        GridSpec gs = parse_triplet(bod_grid, "--grid");
        FrequencyGrid grid = log_grid(gs.lo, gs.hi, gs.n);
        DamageSpec d;
        d.where = parse_location(bod_loc);
        d.epsilon = bod_eps;
        d.validate();
        FrequencyResponse fr;
        if (bod_transfer == "delta") {
            fr = sample_rational(delta_for(d, p), grid);
        } else if (bod_transfer == "damaged") {
            Rational delta = delta_for(d, p);
            fr = sample_response(
                [&](Complex s) { return undamaged_response(p, s) * evaluate(delta, s); }, grid);
        } else if (bod_transfer == "ginf") {
            fr = sample_response([&](Complex s) { return undamaged_response(p, s); }, grid);
        } else {
            throw ValidationError("--transfer must be delta, damaged, or ginf");
        }
        atomic_write(bod_out, bode_csv(bode(fr)));
        std::printf("wrote %s (%zu rows)\n", bod_out.c_str(), grid.size());
    });

    // hinf
    auto* cmd_hinf = app.add_subcommand("hinf", "H-infinity norm of one disturbance");
    Common hin_c;
    std::string hin_loc, hin_out;
    double hin_eps = 0.5;
    add_common(cmd_hinf, hin_c);
    cmd_hinf->add_option("--location", hin_loc)->required();
    cmd_hinf->add_option("--epsilon", hin_eps)->required();
    cmd_hinf->add_option("--out", hin_out, "optional JSON output path");
    cmd_hinf->callback([&] {
        TreeParams p = hin_c.params();
        DamageSpec d;
        d.where = parse_location(hin_loc);
        d.epsilon = hin_eps;
        d.validate();
        HinfResult r = hinf_norm(delta_for(d, p), p);
        std::string text = std::string("{\n  \"hinf\": ") + g17(r.norm) +
                           ",\n  \"argmax_omega\": " + g17(r.argmax_omega) + "\n}\n";
        if (!hin_out.empty()) atomic_write(hin_out, text);
        std::printf("%s", text.c_str());
    });

    // norm-sweep
    auto* cmd_sweep = app.add_subcommand("norm-sweep", "H-infinity norms over locations x epsilon");
    Common swp_c;
    std::string swp_locs = "g<=2", swp_eps = "0.05:0.95:10", swp_out;
    add_common(cmd_sweep, swp_c);
    cmd_sweep->add_option("--locations", swp_locs, "g<=N or comma list of g:n:kind");
    cmd_sweep->add_option("--eps", swp_eps, "epsilon grid lo:hi:count, linear");
    cmd_sweep->add_option("--out", swp_out)->required();
    cmd_sweep->callback([&] {
        TreeParams p = swp_c.params();
        std::vector<NormSweepRow> rows = norm_vs_epsilon(
            parse_location_set(swp_locs), linspace(parse_triplet(swp_eps, "--eps")), p);
        atomic_write(swp_out, norm_sweep_csv(rows));
        std::printf("wrote %s (%zu rows)\n", swp_out.c_str(), rows.size());
    });

    // identify
    auto* cmd_ident = app.add_subcommand("identify", "damage identification from a response");
    Common idf_c;
    std::string idf_mode = "structured", idf_target, idf_from, idf_cands = "g<=2";
    std::string idf_source = "exact", idf_out;
    int idf_gen = 1, idf_fit_degree = 17;
    std::uint64_t idf_seed = 0;
    bool idf_divide = false;
    add_common(cmd_ident, idf_c);
    cmd_ident->add_option("--mode", idf_mode, "structured | unstructured");
    cmd_ident->add_option("--target", idf_target, "target CSV (omega_rad_s,re,im)");
    cmd_ident->add_option("--target-from", idf_from,
                          "synthesize the target from g:n:kind:epsilon instead of a file");
    cmd_ident->add_flag("--divide-out-ginf", idf_divide,
                        "target holds the full tree response; divide out the undamaged part");
    cmd_ident->add_option("--candidates", idf_cands, "structured: g<=N or comma list");
    cmd_ident->add_option("--source", idf_source, "structured: exact | locus-fit");
    cmd_ident->add_option("--fit-degree", idf_fit_degree, "locus-fit source: fit degree");
    cmd_ident->add_option("--generation", idf_gen, "unstructured: assumed generation");
    cmd_ident->add_option("--seed", idf_seed, "unstructured: RNG seed");
    cmd_ident->add_option("--out", idf_out)->required();
    cmd_ident->callback([&] {
        TreeParams p = idf_c.params();
        if (idf_target.empty() == idf_from.empty())
            throw ValidationError("give exactly one of --target or --target-from");
        IdentificationTarget target;
        target.params = p;
        target.response = load_target(idf_target, idf_from, idf_divide, p);

        IdentificationResult res;
        if (idf_mode == "unstructured") {
            target.assumed_generation = idf_gen;
            UnstructuredConfig cfg;
            cfg.seed = idf_seed;
            res = identify_unstructured(target, cfg);
        } else if (idf_mode == "structured") {
            target.assumed_generation = idf_gen;
            std::vector<Location> cands = parse_location_set(idf_cands);
            if (idf_source == "exact") {
                res = identify_structured(target, cands, StructuredSource::exact);
            } else if (idf_source == "locus-fit") {
                std::vector<LocusFit> fits;
                fits.reserve(cands.size());
                for (const auto& cand : cands)
                    fits.push_back(
                        fit_locus(trace_locus(cand, p, default_eps_schedule()), idf_fit_degree));
                res = identify_structured(target, cands, StructuredSource::locus_fit, fits);
            } else {
                throw ValidationError("--source must be exact or locus-fit");
            }
        } else {
            throw ValidationError("--mode must be structured or unstructured");
        }
        atomic_write(idf_out, identification_json(res));
        if (res.mode == IdentifyMode::structured)
            std::printf("identified %s epsilon=%.6g (error %.6e)\n",
                        location_name(res.location).c_str(), res.epsilon_hat, res.error);
        else
            std::printf("unstructured fit error %.6e after %ld iterations\n", res.error,
                        res.iterations);
        std::printf("wrote %s\n", idf_out.c_str());
    });

    // oracle
    auto* cmd_oracle = app.add_subcommand("oracle", "finite-tree recursion vs the closed form");
    Common orc_c;
    std::string orc_loc = "none", orc_term = "tail", orc_grid = "1e-3:1e3:25", orc_out;
    int orc_depth = 8;
    double orc_eps = 0.5;
    add_common(cmd_oracle, orc_c);
    cmd_oracle->add_option("--depth", orc_depth, "recursion depth 1..24")->required();
    cmd_oracle->add_option("--termination", orc_term, "tail | rigid");
    cmd_oracle->add_option("--location", orc_loc, "damaged component or 'none'");
    cmd_oracle->add_option("--epsilon", orc_eps, "damage amount when a location is given");
    cmd_oracle->add_option("--grid", orc_grid, "omega grid lo:hi:count, log-spaced");
    cmd_oracle->add_option("--out", orc_out)->required();
    cmd_oracle->callback([&] {
        TreeParams p = orc_c.params();
        GridSpec gs = parse_triplet(orc_grid, "--grid");
        FrequencyGrid grid = log_grid(gs.lo, gs.hi, gs.n);
        TerminationMode mode;
        if (orc_term == "tail")
            mode = TerminationMode::tail;
        else if (orc_term == "rigid")
            mode = TerminationMode::rigid;
        else
            throw ValidationError("--termination must be tail or rigid");

        ConstantsOverride ov;
        Rational delta = Rational::one();
        if (orc_loc != "none") {
            DamageSpec d;
            d.where = parse_location(orc_loc);
            d.epsilon = orc_eps;
            d.validate();
            ov.set(d.where, (d.where.kind == Kind::spring ? p.k : p.b) * d.epsilon);
            delta = delta_for(d, p);
        }
        FrequencyResponse finite = finite_tree_response(orc_depth, ov, mode, p, grid);
        std::ostringstream out;
        out << "omega_rad_s,analytic_re,analytic_im,finite_re,finite_im,rel_err\n";
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            Complex s(0.0, grid.omegas[i]);
            Complex exact = undamaged_response(p, s) * evaluate(delta, s);
            Complex got = finite.values[i];
            double rel = std::abs(got - exact) / std::abs(exact);
            worst = std::max(worst, rel);
            out << g17(grid.omegas[i]) << ',' << g17(exact.real()) << ',' << g17(exact.imag())
                << ',' << g17(got.real()) << ',' << g17(got.imag()) << ',' << g17(rel) << '\n';
        }
        atomic_write(orc_out, out.str());
        std::printf("wrote %s (worst relative error %.3e)\n", orc_out.c_str(), worst);
    });

    // error-curve
    auto* cmd_curve = app.add_subcommand("error-curve", "identification error versus epsilon");
    Common crv_c;
    std::string crv_loc, crv_target, crv_from, crv_eps = "0.005:0.995:199", crv_out;
    bool crv_divide = false;
    add_common(cmd_curve, crv_c);
    cmd_curve->add_option("--location", crv_loc, "candidate damage location")->required();
    cmd_curve->add_option("--target", crv_target, "target CSV (omega_rad_s,re,im)");
    cmd_curve->add_option("--target-from", crv_from, "synthesize target from g:n:kind:epsilon");
    cmd_curve->add_flag("--divide-out-ginf", crv_divide);
    cmd_curve->add_option("--eps", crv_eps, "epsilon grid lo:hi:count, linear");
    cmd_curve->add_option("--out", crv_out)->required();
    cmd_curve->callback([&] {
        TreeParams p = crv_c.params();
        if (crv_target.empty() == crv_from.empty())
            throw ValidationError("give exactly one of --target or --target-from");
        IdentificationTarget target;
        target.params = p;
        target.response = load_target(crv_target, crv_from, crv_divide, p);
        auto rows = error_curve(parse_location(crv_loc), target,
                                linspace(parse_triplet(crv_eps, "--eps")));
        atomic_write(crv_out, error_curve_csv(rows));
        std::printf("wrote %s (%zu rows)\n", crv_out.c_str(), rows.size());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
