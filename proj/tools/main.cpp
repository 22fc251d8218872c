// Command-line front end: single runs, epsilon sweeps, profile extraction
// from stored trajectories, and the standalone invariant suite.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bipep/bipep.hpp"

namespace {

struct CommonOptions {
    int dim = 1;
    int n = 128;
    double t_end = 8.0;
    double sample_interval = 0.05;
    double cfl = 0.4;
    int sobolev_order = 2;
    double gamma_i = 2.0;
    double gamma_e = 2.0;
    double k_i = 1.0;
    double k_e = 1.0;
    double delta0 = 0.05;
    std::string out = "run";
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--d", opt.dim, "spatial dimension (1-3)")->check(CLI::Range(1, 3));
    cmd->add_option("--n", opt.n, "grid points per axis (even, >= 8)");
    cmd->add_option("--t-end", opt.t_end, "final time");
    cmd->add_option("--sample-interval", opt.sample_interval, "sample spacing");
    cmd->add_option("--cfl", opt.cfl, "CFL number in (0,1]");
    cmd->add_option("--s", opt.sobolev_order, "Sobolev order s (needs s > d/2 + 1)");
    cmd->add_option("--gamma-i", opt.gamma_i, "ion adiabatic exponent");
    cmd->add_option("--gamma-e", opt.gamma_e, "electron adiabatic exponent");
    cmd->add_option("--K-i", opt.k_i, "ion pressure coefficient");
    cmd->add_option("--K-e", opt.k_e, "electron pressure coefficient");
    cmd->add_option("--delta0", opt.delta0, "family amplitude (<= 0.1)");
    cmd->add_option("--out", opt.out, "output prefix");
}

bipep::SweepConfig build_config(const CommonOptions& opt) {
    bipep::SweepConfig cfg;
    cfg.grid = bipep::make_grid(opt.dim, opt.n);
    cfg.family = bipep::default_family(cfg.grid, opt.delta0);
    cfg.ion_law = {opt.k_i, opt.gamma_i};
    cfg.electron_law = {opt.k_e, opt.gamma_e};
    cfg.sobolev_order = opt.sobolev_order;
    cfg.policy = {opt.cfl, opt.t_end, opt.sample_interval, 0.1};
    return cfg;
}

std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> eps;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) eps.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return eps;
}

int cmd_simulate(const CommonOptions& opt, double eps, const std::string& system,
                 const std::string& save_fields) {
    const bipep::SweepConfig cfg = build_config(opt);

    if (system == "uep") {
        const bipep::UepCache cache = bipep::make_uep_cache(cfg);
        if (!save_fields.empty()) {
            bipep::write_snapshot(save_fields, bipep::snapshot_uep(cache.traj));
            std::printf("wrote %s.json / %s.bin (%zu samples)\n", save_fields.c_str(),
                        save_fields.c_str(), cache.traj.samples.size());
        }
        std::ofstream csv(opt.out + ".csv");
        csv << "t,norm_rho_e_minus_1,norm_u_e,mass_electron\n" << std::setprecision(17);
        for (const auto& s : cache.traj.samples) {
            bipep::ScalarField ne = s.state.rho_e;
            ne += -1.0;
            csv << s.t << ',' << bipep::sobolev_norm(ne, cfg.sobolev_order) << ','
                << bipep::sobolev_norm(s.state.u_e, cfg.sobolev_order) << ','
                << bipep::integral(s.state.rho_e) << '\n';
        }
        std::printf("wrote %s.csv\n", opt.out.c_str());
        return 0;
    }

    const bipep::UepCache cache = bipep::make_uep_cache(cfg);
    const bipep::RunRecord rec = bipep::run_case(eps, cfg, cache);
    bipep::write_run_csv(opt.out + ".csv", rec);
    bipep::write_json(opt.out + ".json", bipep::run_summary_json(rec));
    if (!save_fields.empty())
        bipep::write_snapshot(save_fields, bipep::snapshot_uep(cache.traj));
    std::printf("wrote %s.csv and %s.json (%zu samples)\n", opt.out.c_str(),
                opt.out.c_str(), rec.t.size());
    return 0;
}

int cmd_sweep(const CommonOptions& opt, const std::string& eps_list, bool emit_plots) {
    bipep::SweepConfig cfg = build_config(opt);
    if (!eps_list.empty()) cfg.epsilons = parse_eps_list(eps_list);
    const bipep::SweepReport rep = bipep::run_sweep(cfg);

    for (const auto& rec : rep.records) {
        std::ostringstream name;
        name << opt.out << "_eps" << rec.eps;
        bipep::write_run_csv(name.str() + ".csv", rec);
    }
    bipep::write_json(opt.out + "_summary.json", bipep::sweep_summary_json(rep));
    if (emit_plots) bipep::write_rate_plot(opt.out, rep);

    std::printf("sweep: %zu/%zu cases ok%s\n", rep.records.size(), rep.statuses.size(),
                rep.partial ? " (partial)" : "");
    for (const auto& [name, fit] : rep.fits)
        std::printf("  %-22s slope=%7.4f r2=%.4f\n", name.c_str(), fit.slope,
                    fit.r_squared);
    if (rep.uep_decay_available)
        std::printf("  %-22s slope=%7.4f r2=%.4f\n", "uep_decay(t)", rep.uep_decay.slope,
                    rep.uep_decay.r_squared);
    std::printf("wrote %s_summary.json\n", opt.out.c_str());
    return rep.partial ? 1 : 0;
}

int cmd_profiles(const std::string& traj_prefix, const std::string& out_prefix,
                 int sobolev_order) {
    const bipep::Snapshot snap = bipep::read_snapshot(traj_prefix);
    if (snap.fields.empty() || snap.fields.front().name != "rho_e")
        throw bipep::ConfigError("snapshot does not carry a rho_e series");
    if (snap.times.size() < 2)
        throw bipep::InsufficientDataError("stored trajectory has fewer than 2 samples");

    const bipep::GridPtr grid = bipep::make_grid(snap.dim, snap.n);
    const double dt = snap.times[1] - snap.times[0];

    // electric field of each stored sample drives the limiting ion velocity
    std::vector<bipep::VectorField> forcing;
    for (const auto& nodal : snap.fields.front().samples) {
        bipep::ScalarField rho(grid, nodal.front());
        forcing.push_back(bipep::uep_electric_field(rho).grad_phi);
    }

    const bipep::WellPreparedFamily fam = bipep::default_family(grid);
    const auto ubar = bipep::solve_ubar_i(forcing, fam.b_i, dt);
    const auto rho1 = bipep::solve_rho_i1(ubar, fam.a_i, dt);

    bipep::Snapshot out;
    out.dim = snap.dim;
    out.n = snap.n;
    out.sample_interval = dt;
    out.times = snap.times;
    out.fields.push_back(bipep::snapshot_vector_series("u_bar_i", ubar));
    out.fields.push_back(bipep::snapshot_scalar_series("rho_bar_i1", rho1));
    bipep::write_snapshot(out_prefix, out);

    std::ofstream csv(out_prefix + ".csv");
    csv << "t,norm_u_bar_i,norm_div_u_bar_i,norm_rho_bar_i1\n" << std::setprecision(17);
    for (std::size_t m = 0; m < ubar.size(); ++m)
        csv << snap.times[m] << ',' << bipep::sobolev_norm(ubar[m], sobolev_order) << ','
            << bipep::sobolev_norm(bipep::divergence(ubar[m]), sobolev_order - 1) << ','
            << bipep::sobolev_norm(rho1[m], sobolev_order - 1) << '\n';

    std::printf("wrote %s.{json,bin,csv} (%zu samples)\n", out_prefix.c_str(),
                ubar.size());
    return 0;
}

int cmd_check() {
    const auto results = bipep::run_selfchecks();
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %-32s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all = all && r.passed;
    }
    std::printf("%s\n", all ? "all checks passed" : "CHECKS FAILED");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic two-species / electron-only Euler-Poisson simulator"};
    app.require_subcommand(1);
    // key=value file with one [subcommand] section per subcommand; command
    // line flags take precedence
    app.set_config("--config", "", "plain-text key=value config file; flags override");

    CommonOptions sim_opt;
    double eps = 0.2;
    std::string system = "bep";
    std::string save_fields;
    CLI::App* sim = app.add_subcommand("simulate", "one run, full diagnostics");
    add_common(sim, sim_opt);
    sim->add_option("--eps", eps, "mass-ratio parameter in (0,1]");
    sim->add_option("--system", system, "bep (two-species) or uep (electron-only)")
        ->check(CLI::IsMember({"bep", "uep"}));
    sim->add_option("--save-fields", save_fields,
                    "also write the electron-only trajectory snapshot to this prefix");

    CommonOptions sweep_opt;
    sweep_opt.out = "sweep";
    std::string eps_list;
    bool emit_plots = false;
    CLI::App* sweep = app.add_subcommand("sweep", "epsilon sweep with rate fits");
    add_common(sweep, sweep_opt);
    sweep->add_option("--eps-list", eps_list, "comma-separated descending eps values");
    sweep->add_flag("--emit-plots", emit_plots, "write gnuplot script + data files");

    std::string traj_prefix, prof_out = "profiles";
    int prof_order = 2;
    CLI::App* profiles = app.add_subcommand(
        "profiles", "solve and dump the limiting profiles from a stored trajectory");
    profiles->add_option("--traj", traj_prefix, "snapshot prefix written by simulate")
        ->required();
    profiles->add_option("--out", prof_out, "output prefix");
    profiles->add_option("--s", prof_order, "Sobolev order for the reported norms");

    CLI::App* check = app.add_subcommand("check", "run the invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_opt, eps, system, save_fields);
        if (sweep->parsed()) return cmd_sweep(sweep_opt, eps_list, emit_plots);
        if (profiles->parsed()) return cmd_profiles(traj_prefix, prof_out, prof_order);
        if (check->parsed()) return cmd_check();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
