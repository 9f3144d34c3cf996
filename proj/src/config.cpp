#include "slender/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace slender {

StericParams SimConfig::steric_params() const {
    StericParams sp;
    sp.a = fil.a;
    sp.delta = fil.a;
    sp.E0 = steric_E0 > 0 ? steric_E0 : steric_B * step.kBT;
    sp.Ndelta = steric_Ndelta;
    sp.Nseg = steric_Nseg;
    return sp;
}

SimConfig preset_config(const std::string& name) {
    SimConfig c;
    c.preset = name;
    c.fil.L = 2.0;
    c.fil.kappa = 1.0;
    c.fil.mu = 1.0;
    if (name == "equilibrium") {
        c.fil.a = 2e-2; // epshat ~ 1e-2
        c.fil.N = 12;
        c.nfibers = 5;
        c.mob.mode = MobilityMode::LocalOnly;
        c.step.scheme = Scheme::Brownian;
        c.step.kBT = c.fil.kappa / c.fil.L; // persistence length L
        c.step.drift = DriftMode::RFD;
        c.dt_fund = 1e-3;
        c.t_final_fund = 10.0;
        c.output_every = 100;
    } else if (name == "sedimentation") {
        c.fil.a = 2e-3;
        c.fil.N = 16;
        c.nfibers = 2;
        c.mob.mode = MobilityMode::FatCorrected;
        c.mob.Nu = 100;
        c.step.scheme = Scheme::DeterministicLagged;
        c.gravity = 500.0 * c.fil.kappa / std::pow(c.fil.L, 3); // beta = 500
        c.step.dt = 2.5e-4 * c.tbar() / c.gravity;
        c.t_final = 0.1 * c.tbar() / c.gravity;
        c.output_every = 10;
    } else if (name == "bundling") {
        c.fil.a = 2e-2;
        c.fil.N = 12;
        c.nfibers = 8;
        c.domain.periodic = true;
        c.domain.Ld = 2.0;
        c.mob.mode = MobilityMode::LocalOnly;
        c.step.scheme = Scheme::Brownian;
        c.step.kBT = 0.1;
        c.dt_fund = 5e-4;
        c.t_final_fund = 2.0;
        c.sterics_on = true;
        c.steric_B = 1.0;
        c.crosslinks_on = true;
        c.cl.Ncl = 13;
        c.cl.Kc = 10.0;
        c.cl.ell_c = 0.1;
        c.cl.kon = 5.0;
        c.cl.koff = 1.0;
        c.cl.kon_s = 20.0;
        c.cl.koff_s = 1.0;
        c.cl.kBT = c.step.kBT;
        c.output_every = 50;
    } else {
        throw std::runtime_error("unknown preset: " + name);
    }
    return c;
}

namespace {

MobilityMode parse_mode(const std::string& v) {
    if (v == "local") return MobilityMode::LocalOnly;
    if (v == "oversampled") return MobilityMode::Oversampled;
    if (v == "fat") return MobilityMode::FatCorrected;
    if (v == "first") return MobilityMode::FirstKind;
    throw std::runtime_error("unknown mobility mode: " + v);
}

std::string mode_name(MobilityMode m) {
    switch (m) {
    case MobilityMode::LocalOnly: return "local";
    case MobilityMode::Oversampled: return "oversampled";
    case MobilityMode::FatCorrected: return "fat";
    case MobilityMode::FirstKind: return "first";
    }
    return "local";
}

Scheme parse_scheme(const std::string& v) {
    if (v == "full") return Scheme::DeterministicFull;
    if (v == "lagged") return Scheme::DeterministicLagged;
    if (v == "brownian") return Scheme::Brownian;
    throw std::runtime_error("unknown scheme: " + v);
}

std::string scheme_name(Scheme s) {
    switch (s) {
    case Scheme::DeterministicFull: return "full";
    case Scheme::DeterministicLagged: return "lagged";
    case Scheme::Brownian: return "brownian";
    }
    return "full";
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

SimConfig parse_config(const std::string& text) {
    SimConfig c;
    bool preset_seen = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    // two passes: the preset key (if present) seeds the defaults
    std::vector<std::pair<std::string, std::string>> kv;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key == "preset") {
            c = preset_config(val);
            preset_seen = true;
        } else {
            kv.push_back({key, val});
        }
    }
    (void)preset_seen;

    using Set = std::function<void(const std::string&)>;
    auto dbl = [](double& ref) { return Set([&ref](const std::string& v) { ref = std::stod(v); }); };
    auto intg = [](int& ref) { return Set([&ref](const std::string& v) { ref = std::stoi(v); }); };
    auto lng = [](long& ref) { return Set([&ref](const std::string& v) { ref = std::stol(v); }); };
    auto bl = [](bool& ref) {
        return Set([&ref](const std::string& v) {
            if (v == "1" || v == "true") ref = true;
            else if (v == "0" || v == "false") ref = false;
            else throw std::runtime_error("expected boolean, got: " + v);
        });
    };

    std::map<std::string, Set> keys = {
        {"L", dbl(c.fil.L)},
        {"a", dbl(c.fil.a)},
        {"kappa", dbl(c.fil.kappa)},
        {"mu", dbl(c.fil.mu)},
        {"N", intg(c.fil.N)},
        {"nfibers", intg(c.nfibers)},
        {"mobility", Set([&c](const std::string& v) { c.mob.mode = parse_mode(v); })},
        {"Nu", intg(c.mob.Nu)},
        {"epshat_star", dbl(c.mob.epshat_star)},
        {"lambda_star", dbl(c.mob.lambda_star)},
        {"scheme", Set([&c](const std::string& v) { c.step.scheme = parse_scheme(v); })},
        {"dt", dbl(c.step.dt)},
        {"dt_fund", dbl(c.dt_fund)},
        {"t_final", dbl(c.t_final)},
        {"t_final_fund", dbl(c.t_final_fund)},
        {"nsteps", lng(c.nsteps)},
        {"output_every", intg(c.output_every)},
        {"kBT", dbl(c.step.kBT)},
        {"seed", Set([&c](const std::string& v) { c.step.seed = std::stoull(v); })},
        {"drift", Set([&c](const std::string& v) {
             if (v == "rfd") c.step.drift = DriftMode::RFD;
             else if (v == "dense") c.step.drift = DriftMode::Dense;
             else throw std::runtime_error("unknown drift mode: " + v);
         })},
        {"gmres_tol", dbl(c.step.gmres_tol)},
        {"gmres_max_iters", intg(c.step.gmres_max_iters)},
        {"lagged_cap", intg(c.step.lagged_cap)},
        {"rfd_delta", dbl(c.step.rfd_delta)},
        {"periodic", bl(c.domain.periodic)},
        {"Ld", dbl(c.domain.Ld)},
        {"gravity", dbl(c.gravity)},
        {"init_separation", dbl(c.init_separation)},
        {"sterics", bl(c.sterics_on)},
        {"steric_B", dbl(c.steric_B)},
        {"steric_E0", dbl(c.steric_E0)},
        {"steric_Ndelta", intg(c.steric_Ndelta)},
        {"steric_Nseg", intg(c.steric_Nseg)},
        {"crosslinks", bl(c.crosslinks_on)},
        {"cl_Ncl", intg(c.cl.Ncl)},
        {"cl_Kc", dbl(c.cl.Kc)},
        {"cl_ellc", dbl(c.cl.ell_c)},
        {"cl_kon", dbl(c.cl.kon)},
        {"cl_koff", dbl(c.cl.koff)},
        {"cl_kons", dbl(c.cl.kon_s)},
        {"cl_koffs", dbl(c.cl.koff_s)},
        {"cl_kBT", dbl(c.cl.kBT)},
    };

    for (const auto& [key, val] : kv) {
        auto it = keys.find(key);
        if (it == keys.end()) throw std::runtime_error("unknown config key: " + key);
        it->second(val);
    }
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const SimConfig& c) {
    std::ostringstream o;
    o.precision(17);
    o << "preset = " << c.preset << "\n";
    o << "L = " << c.fil.L << "\na = " << c.fil.a << "\nkappa = " << c.fil.kappa
      << "\nmu = " << c.fil.mu << "\nN = " << c.fil.N << "\nnfibers = " << c.nfibers << "\n";
    o << "mobility = " << mode_name(c.mob.mode) << "\nNu = " << c.mob.Nu
      << "\nepshat_star = " << c.mob.epshat_star << "\nlambda_star = " << c.mob.lambda_star
      << "\n";
    o << "scheme = " << scheme_name(c.step.scheme) << "\ndt = " << c.step.dt
      << "\ndt_fund = " << c.dt_fund << "\nt_final = " << c.t_final
      << "\nt_final_fund = " << c.t_final_fund << "\nnsteps = " << c.nsteps
      << "\noutput_every = " << c.output_every << "\n";
    o << "kBT = " << c.step.kBT << "\nseed = " << c.step.seed << "\ndrift = "
      << (c.step.drift == DriftMode::RFD ? "rfd" : "dense")
      << "\ngmres_tol = " << c.step.gmres_tol << "\ngmres_max_iters = " << c.step.gmres_max_iters
      << "\nlagged_cap = " << c.step.lagged_cap << "\nrfd_delta = " << c.step.rfd_delta << "\n";
    o << "periodic = " << (c.domain.periodic ? 1 : 0) << "\nLd = " << c.domain.Ld
      << "\ngravity = " << c.gravity << "\ninit_separation = " << c.init_separation << "\n";
    o << "sterics = " << (c.sterics_on ? 1 : 0) << "\nsteric_B = " << c.steric_B
      << "\nsteric_E0 = " << c.steric_E0 << "\nsteric_Ndelta = " << c.steric_Ndelta
      << "\nsteric_Nseg = " << c.steric_Nseg << "\n";
    o << "crosslinks = " << (c.crosslinks_on ? 1 : 0) << "\ncl_Ncl = " << c.cl.Ncl
      << "\ncl_Kc = " << c.cl.Kc << "\ncl_ellc = " << c.cl.ell_c << "\ncl_kon = " << c.cl.kon
      << "\ncl_koff = " << c.cl.koff << "\ncl_kons = " << c.cl.kon_s
      << "\ncl_koffs = " << c.cl.koff_s << "\ncl_kBT = " << c.cl.kBT << "\n";
    return o.str();
}

} // namespace slender
