#include "bec/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bec/collision.hpp"
#include "bec/continuum.hpp"
#include "bec/evolution.hpp"
#include "bec/quasifree.hpp"
#include "bec/studies.hpp"
#include "bec/wick.hpp"

#ifndef BEC_KINETICS_VERSION
#define BEC_KINETICS_VERSION "0.0.0"
#endif

namespace bec {

const char* code_version() { return BEC_KINETICS_VERSION; }

namespace {

using Files = std::map<std::string, std::string>;
const std::string& fd(double x) {
    static thread_local std::string s;
    s = format_double(x);
    return s;
}

RadialProfile profile_of(const PhysicsConfig& p) {
    if (p.profile == "zero") return RadialProfile::zero();
    return RadialProfile::gaussian_bump(p.profile_a, p.profile_sigma);
}

VecFn observable_of(const ObservableConfig& o) {
    const double s = o.scale;
    if (o.kind == "energy") return [](const Vec3& p) { return 0.5 * norm2(p); };
    if (o.kind == "momentum_x") return [](const Vec3& p) { return p[0]; };
    if (o.kind == "momentum_y") return [](const Vec3& p) { return p[1]; };
    if (o.kind == "momentum_z") return [](const Vec3& p) { return p[2]; };
    if (o.kind == "unit") return [](const Vec3&) { return 1.0; };
    return [s](const Vec3& p) { return std::exp(-norm2(p) / s); };
}

struct Setup {
    MomentumLattice lat;
    DispersionContext ctx;
    KineticParams par;
    Field f0;
    TestFunction J;

    explicit Setup(const RunConfig& c) : lat(c.physics.L, c.physics.cutoffM) {
        ctx.vhat = profile_of(c.physics);
        ctx.lambda = c.physics.lambda;
        par.lambda = c.physics.lambda;
        par.bigN = c.physics.bigN;
        par.T = c.physics.T;
        par.sGridCount = c.numerics.sGridCount;
        par.validate();
        f0 = bose_field(GeneratorK(c.physics.beta, c.physics.mu, lat), lat);
        J = sample(lat, observable_of(c.observable));
    }
};

void row(std::ostringstream& o, const std::string& name, double v) { o << name << "," << fd(v) << "\n"; }

Files run_evolve(const RunConfig& c) {
    Setup s(c);
    EvolutionOptions opt;
    opt.picard_depth = c.numerics.picard_depth;
    opt.with_subleading = c.numerics.with_subleading;
    EvolutionState st = evolve_F(s.lat, s.ctx, s.par, s.f0, opt);
    std::ostringstream o;
    o << "T,q_index_x,q_index_y,q_index_z,F,Psi_re,Psi_im\n";
    for (std::size_t m = 0; m < st.snapshots.size(); ++m) {
        const auto& snap = st.snapshots[m];
        const cplx psi = st.Psi_path[m];
        for (std::size_t i = 0; i < s.lat.size(); ++i) {
            const auto z = s.lat.z(i);
            o << fd(snap.S) << "," << z[0] << "," << z[1] << "," << z[2] << "," << fd(snap.F[i]) << ",";
            o << fd(psi.real()) << ",";
            o << fd(psi.imag()) << "\n";
        }
    }
    return {{"evolution.csv", o.str()}};
}

Files run_collision(const RunConfig& c) {
    Setup s(c);
    const double l = s.par.lambda;
    std::ostringstream o;
    o << "quantity,value\n";
    row(o, "q_mollified_d_S0", q_mollified_d(s.lat, s.ctx, s.par, s.f0, s.J, 0.0));
    row(o, "q_mollified_d_time_integral", q_mollified_d_time_integral(s.lat, s.ctx, s.par, s.f0, s.J));
    const double c0 = cBd0_integrated(s.lat, s.ctx, s.par, s.f0, s.J);
    const double c1 = cBd1_integrated(s.lat, s.ctx, s.par, s.f0, s.J);
    const double c2 = cBd2_integrated(s.lat, s.ctx, s.par, s.f0, s.J);
    row(o, "cBd0_integrated", c0);
    row(o, "cBd1_integrated", c1);
    row(o, "cBd2_integrated", c2);
    row(o, "cBd1_integrated_printed", cBd1_integrated(s.lat, s.ctx, s.par, s.f0, s.J, OperatorForm::Printed));
    row(o, "cBd2_integrated_printed", cBd2_integrated(s.lat, s.ctx, s.par, s.f0, s.J, OperatorForm::Printed));
    row(o, "assembly", (c0 + l * c1 + l * l * c2) / s.par.bigN);
    return {{"collision.csv", o.str()}};
}

Files run_continuum(const RunConfig& c) {
    const auto& p = c.physics;
    DispersionContext ctx{profile_of(p), p.lambda};
    KineticParams par;
    par.lambda = p.lambda;
    par.bigN = p.bigN;
    par.T = p.T;
    par.sGridCount = c.numerics.sGridCount;
    par.validate();
    const double beta = p.beta, mu = p.mu;
    RadialFn f = [beta, mu](double r) { return 1.0 / std::expm1(beta * (0.5 * r * r - mu)); };
    VecFn J = observable_of(c.observable);

    ContinuumQuadrature cq;
    cq.radial_nodes = c.numerics.radial_nodes;
    cq.angular_nodes = c.numerics.angular_nodes;
    cq.R = default_cutoff_radius(p.profile_sigma, beta);
    HypersurfaceQuadrature hq = HypersurfaceQuadrature::defaults(p.profile_sigma, beta);
    hq.radial_nodes = hq.inplane_nodes = c.numerics.hypersurface_nodes;
    hq.angular_nodes = c.numerics.angular_nodes;

    std::ostringstream o;
    o << "quantity,value\n";
    row(o, "q_mollified_c_S0", q_mollified_c(ctx, par, f, J, 0.0, cq));
    SharpValue sh = q_energy_conserving(ctx.vhat, f, J, hq);
    row(o, "q_energy_conserving", sh.value);
    row(o, "gain_scale", sh.gain_scale);
    MollifiedVsSharp ms = q_mollified_vs_sharp(ctx, par, f, J, cq);
    row(o, "mollified_time_integral", ms.mollified);
    row(o, "sharp_times_T", ms.sharp);
    row(o, "gap", ms.gap);
    return {{"continuum.csv", o.str()}};
}

Files run_moments(const RunConfig& c) {
    MomentumLattice lat(c.physics.L, c.physics.cutoffM);
    GeneratorK K(c.physics.beta, c.physics.mu, lat);
    std::ostringstream o;
    o << "n,cumulant,number_moment\n";
    for (int n = 1; n <= c.study.moments_max; ++n)
        o << n << "," << fd(cumulant(K, lat, n)) << "," << fd(number_moment(K, lat, n)) << "\n";
    return {{"moments.csv", o.str()}};
}

Files run_disc_study(const RunConfig& c) {
    const auto& st = c.study;
    RadialChi chi = st.chi == "c2_bump" ? RadialChi::c2_bump(st.chi_width) : RadialChi::gaussian(st.chi_width);
    PoissonScan ps = poisson_error_scan(chi, st.L_list, st.poisson_r);
    std::ostringstream a;
    a << "L,lattice,continuum,error,reference_err\n";
    for (const auto& r : ps.rows)
        a << fd(r.L) << "," << fd(r.lattice) << "," << fd(r.continuum) << "," << fd(r.error) << ","
          << fd(r.reference_err) << "\n";

    DispersionContext ctx{profile_of(c.physics), c.physics.lambda};
    auto rows = oscillatory_disc_error(PairKernel::gaussian(), parse_phase_selector(st.selector), ctx, c.physics.T,
                                       st.L_list);
    std::ostringstream b;
    b << "L,lattice_re,lattice_im,continuum_re,continuum_im,eps,reference_err\n";
    for (const auto& r : rows) {
        b << fd(r.L) << "," << fd(r.lattice.real()) << "," << fd(r.lattice.imag()) << ",";
        b << fd(r.continuum.real()) << "," << fd(r.continuum.imag()) << ",";
        b << fd(r.eps) << "," << fd(r.reference_err) << "\n";
    }
    return {{"poisson.csv", a.str()}, {"oscillatory.csv", b.str()}};
}

Files run_talbot(const RunConfig& c) {
    Setup s(c);
    std::vector<double> grid;
    for (int k = 1; k <= c.study.talbot_count; ++k) grid.push_back(c.study.talbot_T_max * k / c.study.talbot_count);
    TalbotScan ts = talbot_scan(s.lat, s.ctx, s.par, grid, s.J, s.f0);
    std::ostringstream o;
    o << "T,q_moll_scaled,sin2_sum\n";
    for (const auto& r : ts.rows) o << fd(r.T) << "," << fd(r.q_moll_scaled) << "," << fd(r.sin2_sum) << "\n";
    return {{"talbot.csv", o.str()}};
}

Files run_wick_verify(const RunConfig& c) {
    Setup s(c);
    const double l = s.par.lambda, N = s.par.bigN;
    DuhamelF d = duhamel_f_second_order(s.lat, s.ctx, s.par, s.f0, s.J);
    std::ostringstream o;
    o << "quantity,value\n";
    row(o, "oracle_total", d.total);
    row(o, "oracle_boltzmann", d.boltzmann);
    row(o, "oracle_condensate", d.condensate);
    row(o, "oracle_other", d.other);
    row(o, "oracle_max_imag", d.max_imag);
    row(o, "commutator_shortcut", duhamel_f_commutator_shortcut(s.lat, s.ctx, s.par, s.f0, s.J));
    const double a[3] = {cBd0_integrated(s.lat, s.ctx, s.par, s.f0, s.J) / N,
                         l * cBd1_integrated(s.lat, s.ctx, s.par, s.f0, s.J) / N,
                         l * l * cBd2_integrated(s.lat, s.ctx, s.par, s.f0, s.J) / N};
    for (int g = 0; g < 3; ++g) {
        row(o, "oracle_boltzmann_grade" + std::to_string(g), d.boltzmann_graded[g].real());
        row(o, "assembly_grade" + std::to_string(g), a[g]);
    }
    row(o, "assembly_printed_grade1", l * cBd1_integrated(s.lat, s.ctx, s.par, s.f0, s.J, OperatorForm::Printed) / N);
    row(o, "assembly_printed_grade2",
        l * l * cBd2_integrated(s.lat, s.ctx, s.par, s.f0, s.J, OperatorForm::Printed) / N);
    row(o, "residual", d.boltzmann - (a[0] + a[1] + a[2]));
    return {{"wick.csv", o.str()}};
}

void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + p.string() + "'");
    out << body;
    if (!out) throw ValidationError("write failed for '" + p.string() + "'");
}

}  // namespace

Files run_subcommand(const RunConfig& c) {
    c.validate();
    Files out;
    if (c.subcommand == "evolve") out = run_evolve(c);
    else if (c.subcommand == "collision") out = run_collision(c);
    else if (c.subcommand == "continuum") out = run_continuum(c);
    else if (c.subcommand == "moments") out = run_moments(c);
    else if (c.subcommand == "disc-study") out = run_disc_study(c);
    else if (c.subcommand == "talbot") out = run_talbot(c);
    else out = run_wick_verify(c);
    out["manifest.toml"] = c.manifest(code_version());
    return out;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"bec-kinetics: fluctuation kinetics around a Bose-Einstein condensate"};
    app.set_version_flag("--version", std::string(code_version()));
    app.require_subcommand(1);
    std::string config_path, out_dir;
    const std::map<std::string, std::string> help = {
        {"evolve", "Picard evolution of F and Psi"},
        {"collision", "lattice collision operators on f0"},
        {"continuum", "continuum mollified and energy-conserving operators"},
        {"moments", "cumulants and number moments of the initial state"},
        {"disc-study", "Poisson and oscillatory discretization errors"},
        {"talbot", "Talbot scan over macroscopic time"},
        {"wick-verify", "Wick expansion against the operator assembly"}};
    for (const auto& name : kSubcommands) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config_path, "TOML config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = RunConfig::from_table(parse_config_file(config_path), sub);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        Files files = run_subcommand(cfg);
        std::filesystem::path dir(cfg.output_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
        for (const auto& [name, body] : files) {
            write_file(dir / name, body);
            std::cout << (dir / name).string() << "\n";
        }
        return kExitOk;
    } catch (const ConfigParseError& e) {
        spdlog::error("parse error: {}", e.what());
        return kExitParse;
    } catch (const ValidationError& e) {
        spdlog::error("validation error: {}", e.what());
        return kExitValidation;
    } catch (const NumericalGuard& e) {
        spdlog::error("numerical guard: {}", e.what());
        return kExitNumerical;
    }
}

}  // namespace bec
