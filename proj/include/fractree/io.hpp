#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fractree/analysis.hpp"
#include "fractree/identify.hpp"
#include "fractree/locus.hpp"
#include "fractree/tree.hpp"

namespace fractree {

using json = nlohmann::ordered_json;

// full double precision so regenerated figures carry no quantization drift
inline std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// write via a temp file in the same directory, then rename into place
inline void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp + " for writing");
        out << content;
        if (!out.flush()) throw Error("write to " + tmp + " failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot rename " + tmp + " to " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Kind parse_kind(const std::string& s) {
    if (s == "spring") return Kind::spring;
    if (s == "damper") return Kind::damper;
    throw ValidationError("kind must be 'spring' or 'damper', got '" + s + "'");
}

// location grammar g:n:kind, mirroring the component subscripts
inline Location parse_location(const std::string& s) {
    std::size_t p1 = s.find(':');
    std::size_t p2 = p1 == std::string::npos ? std::string::npos : s.find(':', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw ValidationError("location must be g:n:spring|damper, got '" + s + "'");
    Location loc;
    try {
        loc.generation = std::stoi(s.substr(0, p1));
        loc.index = std::stoi(s.substr(p1 + 1, p2 - p1 - 1));
    } catch (const std::exception&) {
        throw ValidationError("location must be g:n:spring|damper, got '" + s + "'");
    }
    loc.kind = parse_kind(s.substr(p2 + 1));
    loc.validate();
    return loc;
}

inline json location_json(const Location& l) {
    return json{{"generation", l.generation},
                {"index", l.index},
                {"kind", kind_name(l.kind)}};
}

inline Location location_from_json(const json& j) {
    Location l;
    l.generation = j.at("generation").get<int>();
    l.index = j.at("index").get<int>();
    l.kind = parse_kind(j.at("kind").get<std::string>());
    l.validate();
    return l;
}

inline std::string delta_json(const Rational& delta, const DamageSpec& damage,
                              const TreeParams& p) {
    json j;
    j["k"] = p.k;
    j["b"] = p.b;
    j["damage"] = location_json(damage.where);
    j["damage"]["epsilon"] = damage.epsilon;
    j["num"] = delta.num.coeffs();
    j["den"] = delta.den.coeffs();
    return j.dump(2) + "\n";
}

struct DeltaFile {
    Rational delta;
    DamageSpec damage;
    TreeParams params;
};

inline DeltaFile delta_from_json(const std::string& text) {
    json j = json::parse(text);
    DeltaFile out;
    out.params = TreeParams(j.at("k").get<double>(), j.at("b").get<double>());
    out.damage.where = location_from_json(j.at("damage"));
    out.damage.epsilon = j.at("damage").at("epsilon").get<double>();
    out.damage.validate();
    out.delta = Rational(Polynomial(j.at("num").get<std::vector<double>>()),
                         Polynomial(j.at("den").get<std::vector<double>>()));
    return out;
}

inline std::string locus_csv(const LocusTable& t) {
    std::ostringstream out;
    out << "epsilon,root_kind,slot_index,re,im\n";
    for (std::size_t i = 0; i < t.eps_samples.size(); ++i) {
        for (std::size_t j = 0; j < t.zero_traj.size(); ++j)
            out << g17(t.eps_samples[i]) << ",zero," << j << ','
                << g17(t.zero_traj[j][i].real()) << ',' << g17(t.zero_traj[j][i].imag()) << '\n';
        for (std::size_t j = 0; j < t.pole_traj.size(); ++j)
            out << g17(t.eps_samples[i]) << ",pole," << j << ','
                << g17(t.pole_traj[j][i].real()) << ',' << g17(t.pole_traj[j][i].imag()) << '\n';
    }
    return out.str();
}

inline std::string locus_fit_json(const LocusFit& f) {
    json j;
    j["location"] = location_json(f.location);
    j["degree"] = f.degree;
    j["validity"] = {f.validity_lo, f.validity_hi};
    j["trajectories"] = json::array();
    for (const auto& t : f.trajectories) {
        json tj;
        tj["kind"] = t.kind == RootKind::zero ? "zero" : "pole";
        tj["slot"] = t.slot;
        tj["re_coeffs"] = t.re_coeffs;
        tj["im_coeffs"] = t.im_coeffs;
        tj["residual"] = t.residual;
        tj["validity"] = {t.validity_lo, t.validity_hi};
        tj["partner"] = t.partner;
        j["trajectories"].push_back(tj);
    }
    return j.dump(2) + "\n";
}

inline LocusFit locus_fit_from_json(const std::string& text, double params_c) {
    json j = json::parse(text);
    LocusFit f;
    f.location = location_from_json(j.at("location"));
    f.params_c = params_c;
    f.degree = j.at("degree").get<int>();
    f.validity_lo = j.at("validity")[0].get<double>();
    f.validity_hi = j.at("validity")[1].get<double>();
    for (const auto& tj : j.at("trajectories")) {
        TrajectoryFit t;
        t.kind = tj.at("kind").get<std::string>() == "zero" ? RootKind::zero : RootKind::pole;
        t.slot = tj.at("slot").get<int>();
        t.re_coeffs = tj.at("re_coeffs").get<std::vector<double>>();
        t.im_coeffs = tj.at("im_coeffs").get<std::vector<double>>();
        t.residual = tj.at("residual").get<double>();
        t.validity_lo = tj.at("validity")[0].get<double>();
        t.validity_hi = tj.at("validity")[1].get<double>();
        t.partner = tj.at("partner").get<int>();
        f.trajectories.push_back(std::move(t));
    }
    return f;
}

inline std::string bode_csv(const std::vector<BodeRow>& rows) {
    std::ostringstream out;
    out << "omega_rad_s,mag_db,phase_deg\n";
    for (const auto& r : rows)
        out << g17(r.omega) << ',' << g17(r.mag_db) << ',' << g17(r.phase_deg) << '\n';
    return out.str();
}

inline std::string norm_sweep_csv(const std::vector<NormSweepRow>& rows) {
    std::ostringstream out;
    out << "generation,index,kind,epsilon,hinf,argmax_omega\n";
    for (const auto& r : rows)
        out << r.location.generation << ',' << r.location.index << ',' << kind_name(r.location.kind)
            << ',' << g17(r.epsilon) << ',' << g17(r.hinf) << ',' << g17(r.argmax_omega) << '\n';
    return out.str();
}

inline std::string target_csv(const FrequencyResponse& fr) {
    std::ostringstream out;
    out << "omega_rad_s,re,im\n";
    for (std::size_t i = 0; i < fr.values.size(); ++i)
        out << g17(fr.grid.omegas[i]) << ',' << g17(fr.values[i].real()) << ','
            << g17(fr.values[i].imag()) << '\n';
    return out.str();
}

inline FrequencyResponse target_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty target file");
    FrequencyResponse fr;
    std::vector<double> omegas;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
            throw ValidationError("target row must be omega,re,im: '" + line + "'");
        try {
            omegas.push_back(std::stod(a));
            fr.values.push_back(Complex(std::stod(b), std::stod(c)));
        } catch (const std::exception&) {
            throw ValidationError("unparsable target row: '" + line + "'");
        }
    }
    fr.grid = FrequencyGrid(std::move(omegas));
    fr.validate();
    return fr;
}

inline std::string error_curve_csv(const std::vector<std::pair<double, double>>& rows) {
    std::ostringstream out;
    out << "epsilon,error\n";
    for (const auto& [eps, err] : rows) out << g17(eps) << ',' << g17(err) << '\n';
    return out.str();
}

inline std::string identification_json(const IdentificationResult& r) {
    json j;
    j["mode"] = r.mode == IdentifyMode::structured ? "structured" : "unstructured";
    if (r.mode == IdentifyMode::structured) {
        j["location"] = location_json(r.location);
        j["epsilon_hat"] = r.epsilon_hat;
    } else {
        auto clist = [](const std::vector<Complex>& v) {
            json arr = json::array();
            for (const auto& z : v) arr.push_back({z.real(), z.imag()});
            return arr;
        };
        j["zeros"] = clist(r.zeros);
        j["poles"] = clist(r.poles);
        j["seed"] = r.seed;
    }
    j["error"] = r.error;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    if (!r.candidates.empty()) {
        j["candidates"] = json::array();
        for (const auto& c : r.candidates) {
            json cj;
            cj["location"] = location_json(c.location);
            cj["epsilon_hat"] = c.epsilon_hat;
            cj["error"] = c.error;
            j["candidates"].push_back(cj);
        }
    }
    return j.dump(2) + "\n";
}

} // namespace fractree
