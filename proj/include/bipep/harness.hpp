#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bipep/errors.hpp"
#include "bipep/functionals.hpp"
#include "bipep/limits.hpp"
#include "bipep/models.hpp"
#include "bipep/rate_fit.hpp"
#include "bipep/timestep.hpp"

namespace bipep {

/// Pass/fail thresholds of the verification suite, pinned once.
namespace thresholds {
constexpr double mass_drift_rel = 1e-12;
constexpr double charge_abs = 1e-12;
constexpr double uniform_bound_ratio = 10.0;   ///< sup_t E / E(0) across the sweep
constexpr double uniform_bound_trend = 2.0;    ///< smallest-eps ratio vs largest-eps ratio
constexpr double rate_slope_error = 0.9;       ///< sup_t error norms ~ eps
constexpr double rate_slope_ion_velocity = 1.8;  ///< sup_t ||u_i|| ~ eps^2
constexpr double rate_slope_error_int = 1.8;     ///< int ||err||^2 ~ eps^2
constexpr double rate_slope_ion_velocity_int = 3.6;  ///< int ||u_i||^2 ~ eps^4
constexpr double rate_r2 = 0.98;
constexpr double uep_decay_r2 = 0.95;
constexpr double ion_smallness_factor = 2.0;   ///< sup ||u_i|| <= 2 eps^2 ||b_i||
constexpr double stream_div_defect = 1e-10;    ///< ||div psi + z|| at every sample
}  // namespace thresholds

struct SweepConfig {
    std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};  ///< descending
    GridPtr grid;
    PressureLaw ion_law{1.0, 2.0};
    PressureLaw electron_law{1.0, 2.0};
    int sobolev_order = 2;
    WellPreparedFamily family;
    StepPolicy policy{0.4, 8.0, 0.05, 0.1};

    /// The stock desk-scale configuration: d=1, n=128, s=2, gamma=2 both
    /// species, delta0 = 0.05, eps in {0.4, 0.2, 0.1, 0.05}, t_end 8.
    static SweepConfig defaults(int dim = 1, int n = 128, double delta0 = 0.05) {
        SweepConfig cfg;
        cfg.grid = make_grid(dim, n);
        cfg.family = default_family(cfg.grid, delta0);
        if (dim > 1) cfg.sobolev_order = 3;
        return cfg;
    }

    void validate(bool for_rate_fit) const {
        if (!grid) throw ConfigError("sweep config has no grid");
        policy.validate();
        family.validate();
        ion_law.validate();
        electron_law.validate();
        if (epsilons.empty()) throw ConfigError("no epsilon values");
        for (const double e : epsilons)
            if (!(e > 0.0 && e <= 1.0)) throw ConfigError("epsilon values must lie in (0,1]");
        for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
            if (!(epsilons[i] > epsilons[i + 1]))
                throw ConfigError("epsilon values must be strictly descending");
        if (for_rate_fit && epsilons.size() < 3)
            throw ConfigError("rate fits need at least 3 distinct epsilon values");
    }
};

/// Everything measured on one run at one eps. Norm series are H^{s-1} norms
/// of the error fields; interval series (residuals) hold the value for
/// [t_m, t_{m+1}] at index m.
struct RunRecord {
    double eps = 0.0;
    std::vector<double> t;

    std::vector<double> energy_total, energy_dissip;
    std::vector<double> entropy_energy, entropy_dissip;
    std::vector<double> err_dissipation;
    std::vector<double> norm_err_rho_i, norm_err_rho_e, norm_err_u_e, norm_err_grad_phi;
    std::vector<double> norm_u_i;
    std::vector<double> mass_i, mass_e, charge;

    std::vector<double> entropy_residual;
    std::vector<double> stream_res_ion, stream_res_electron;

    // summaries (suprema are exact maxima over the emitted samples)
    double sup_energy_total = 0.0;
    double energy_ratio = 0.0;  ///< sup_t E / E(0), 0 when E(0) = 0
    double sup_err_rho_i = 0.0, sup_err_rho_e = 0.0, sup_err_u_e = 0.0,
           sup_err_grad_phi = 0.0, sup_u_i = 0.0;
    double int_sq_err_rho_i = 0.0, int_sq_err_rho_e = 0.0, int_sq_err_u_e = 0.0,
           int_sq_err_grad_phi = 0.0, int_sq_u_i = 0.0;
    double mass_drift_i = 0.0, mass_drift_e = 0.0;  ///< relative to t = 0
    double max_abs_charge = 0.0;
    double max_entropy_residual = 0.0;
    double max_entropy_uptick = 0.0;  ///< largest positive increment of entropy_E
    double max_stream_res_ion = 0.0, max_stream_res_electron = 0.0;
    double max_stream_div_defect = 0.0;  ///< max ||div psi + z||, both species
    double ion_smallness_bound = 0.0;    ///< 2 eps^2 ||b_i||_{s-1}
};

/// The eps-independent half of a sweep: the limit-system trajectory and the
/// profiles solved from it, shared by every case.
struct UepCache {
    UepTrajectory traj;
    std::vector<ProfileState> profiles;
};

inline UepCache make_uep_cache(const SweepConfig& cfg) {
    cfg.family.validate();
    UepState initial = equilibrium_uep(cfg.grid);
    initial.rho_e.add_scaled(cfg.family.a_e, cfg.family.delta0);
    initial.u_e.add_scaled(cfg.family.v_e, cfg.family.delta0);

    UepCache cache;
    cache.traj = integrate(initial, cfg.electron_law, cfg.policy);

    std::vector<VectorField> forcing;
    forcing.reserve(cache.traj.samples.size());
    for (const auto& s : cache.traj.samples) forcing.push_back(s.grad_phi);

    if (cache.traj.samples.size() >= 2) {
        const double dt = cfg.policy.sample_interval;
        const auto ubar = solve_ubar_i(forcing, cfg.family.b_i, dt);
        const auto rho1 = solve_rho_i1(ubar, cfg.family.a_i, dt);
        for (std::size_t m = 0; m < ubar.size(); ++m)
            cache.profiles.push_back(ProfileState{ubar[m], rho1[m]});
    } else {
        cache.profiles.push_back(ProfileState{cfg.family.b_i, cfg.family.a_i});
    }
    return cache;
}

namespace detail {

inline double trapezoid_of_squares(const std::vector<double>& v, double dt) {
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < v.size(); ++m)
        acc += 0.5 * dt * (v[m] * v[m] + v[m + 1] * v[m + 1]);
    return acc;
}

inline double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, x);
    return m;
}

}  // namespace detail

/// One case of the sweep: integrate the two-species system at eps, line it up
/// against the cached limit trajectory and profiles, and record every
/// diagnostic at every sample.
inline RunRecord run_case(double eps, const SweepConfig& cfg, const UepCache& cache) {
    const PlasmaParams params{eps, cfg.ion_law, cfg.electron_law, cfg.sobolev_order};
    params.validate(cfg.grid->dim());
    const WellPreparedData data = well_prepared_data(cfg.family, eps, cfg.sobolev_order);

    BepTrajectory bep;
    try {
        bep = integrate(data.bep, params, cfg.policy);
    } catch (const DensityFloorError& e) {
        throw DensityFloorError("eps=" + std::to_string(eps) + ": " + e.what());
    } catch (const CompatibilityError& e) {
        throw CompatibilityError("eps=" + std::to_string(eps) + ": " + e.what());
    } catch (const UnstableStateError& e) {
        throw UnstableStateError("eps=" + std::to_string(eps) + ": " + e.what());
    }

    const std::size_t count = bep.samples.size();
    if (cache.traj.samples.size() != count || cache.profiles.size() != count)
        throw ConfigError("cached limit trajectory does not match the sample grid");

    RunRecord rec;
    rec.eps = eps;
    const int err_order = cfg.sobolev_order - 1;
    const double e2 = eps * eps;

    for (std::size_t m = 0; m < count; ++m) {
        const BepSample& bs = bep.samples[m];
        const UepSample& us = cache.traj.samples[m];
        const ProfileState& prof = cache.profiles[m];

        rec.t.push_back(bs.t);

        const EnergyReport er = energy_report(bs.state, params, bs.grad_phi);
        rec.energy_total.push_back(er.E_total);
        rec.energy_dissip.push_back(er.D_dissip);
        rec.entropy_energy.push_back(er.entropy_E);
        rec.entropy_dissip.push_back(er.entropy_D);
        rec.mass_i.push_back(er.mass_i);
        rec.mass_e.push_back(er.mass_e);
        rec.charge.push_back(er.charge);

        const ErrorVars err = error_vars(bs, us, prof, eps);
        rec.norm_err_rho_i.push_back(sobolev_norm(err.N_i, err_order));
        rec.norm_err_rho_e.push_back(sobolev_norm(err.N_e, err_order));
        rec.norm_err_u_e.push_back(sobolev_norm(err.w_e, err_order));
        rec.norm_err_grad_phi.push_back(sobolev_norm(err.F, err_order));
        rec.norm_u_i.push_back(sobolev_norm(bs.state.u_i, err_order));
        rec.err_dissipation.push_back(error_dissipation(err, err_order));

        ScalarField z_ion = err.N_i;
        z_ion.add_scaled(prof.rho_bar_i1, -e2);
        const StreamDiag diag_i = stream_diag(z_ion);
        const StreamDiag diag_e = stream_diag(err.N_e);
        rec.max_stream_div_defect = std::max(
            rec.max_stream_div_defect,
            std::max(diag_i.residual_div_norm, diag_e.residual_div_norm));

        if (m > 0) {
            const BepSample& prev = bep.samples[m - 1];
            const UepSample& uprev = cache.traj.samples[m - 1];
            const ProfileState& pprev = cache.profiles[m - 1];
            rec.stream_res_ion.push_back(
                stream_residual(prev, bs, uprev, us, pprev, prof, eps, Species::ion));
            rec.stream_res_electron.push_back(
                stream_residual(prev, bs, uprev, us, pprev, prof, eps, Species::electron));
        }
    }

    if (count >= 2) rec.entropy_residual = entropy_balance_residual(bep, params);

    // summaries
    const double dt = cfg.policy.sample_interval;
    rec.sup_energy_total = detail::max_of(rec.energy_total);
    rec.energy_ratio =
        rec.energy_total.front() > 0.0 ? rec.sup_energy_total / rec.energy_total.front()
                                       : 0.0;
    rec.sup_err_rho_i = detail::max_of(rec.norm_err_rho_i);
    rec.sup_err_rho_e = detail::max_of(rec.norm_err_rho_e);
    rec.sup_err_u_e = detail::max_of(rec.norm_err_u_e);
    rec.sup_err_grad_phi = detail::max_of(rec.norm_err_grad_phi);
    rec.sup_u_i = detail::max_of(rec.norm_u_i);
    rec.int_sq_err_rho_i = detail::trapezoid_of_squares(rec.norm_err_rho_i, dt);
    rec.int_sq_err_rho_e = detail::trapezoid_of_squares(rec.norm_err_rho_e, dt);
    rec.int_sq_err_u_e = detail::trapezoid_of_squares(rec.norm_err_u_e, dt);
    rec.int_sq_err_grad_phi = detail::trapezoid_of_squares(rec.norm_err_grad_phi, dt);
    rec.int_sq_u_i = detail::trapezoid_of_squares(rec.norm_u_i, dt);

    for (std::size_t m = 0; m < count; ++m) {
        rec.mass_drift_i = std::max(
            rec.mass_drift_i, std::abs(rec.mass_i[m] - rec.mass_i[0]) / std::abs(rec.mass_i[0]));
        rec.mass_drift_e = std::max(
            rec.mass_drift_e, std::abs(rec.mass_e[m] - rec.mass_e[0]) / std::abs(rec.mass_e[0]));
        rec.max_abs_charge = std::max(rec.max_abs_charge, std::abs(rec.charge[m]));
        if (m > 0)
            rec.max_entropy_uptick = std::max(
                rec.max_entropy_uptick, rec.entropy_energy[m] - rec.entropy_energy[m - 1]);
    }
    for (const double r : rec.entropy_residual)
        rec.max_entropy_residual = std::max(rec.max_entropy_residual, std::abs(r));
    rec.max_stream_res_ion = detail::max_of(rec.stream_res_ion);
    rec.max_stream_res_electron = detail::max_of(rec.stream_res_electron);
    rec.ion_smallness_bound = thresholds::ion_smallness_factor * e2 *
                              sobolev_norm(cfg.family.b_i, err_order);
    return rec;
}

inline RunRecord run_case(double eps, const SweepConfig& cfg) {
    return run_case(eps, cfg, make_uep_cache(cfg));
}

struct CaseStatus {
    double eps = 0.0;
    bool ok = false;
    std::string error;
};

struct SweepReport {
    std::vector<RunRecord> records;   ///< successful cases, in sweep order
    std::vector<CaseStatus> statuses; ///< one per requested eps
    bool partial = false;             ///< some case failed
    bool fits_skipped_all_zero = false;
    std::map<std::string, RateFit> fits;
    RateFit uep_decay;            ///< log perturbation norm vs t on [2, t_end]
    bool uep_decay_available = false;

    bool pass_conservation = false;
    bool pass_uniform_bound = false;
    bool pass_rates = false;
    bool pass_uep_decay = false;
    bool pass_ion_smallness = false;
    bool pass_stream_defect = false;
};

namespace detail {

inline void fit_sweep_rates(const std::vector<RunRecord>& records, SweepReport& report) {
    const std::vector<std::pair<std::string, double RunRecord::*>> quantities = {
        {"sup_err_rho_i", &RunRecord::sup_err_rho_i},
        {"sup_err_rho_e", &RunRecord::sup_err_rho_e},
        {"sup_err_u_e", &RunRecord::sup_err_u_e},
        {"sup_err_grad_phi", &RunRecord::sup_err_grad_phi},
        {"sup_u_i", &RunRecord::sup_u_i},
        {"int_sq_err_rho_i", &RunRecord::int_sq_err_rho_i},
        {"int_sq_err_rho_e", &RunRecord::int_sq_err_rho_e},
        {"int_sq_err_u_e", &RunRecord::int_sq_err_u_e},
        {"int_sq_err_grad_phi", &RunRecord::int_sq_err_grad_phi},
        {"int_sq_u_i", &RunRecord::int_sq_u_i},
    };
    bool any_zero = false;
    for (const auto& [name, member] : quantities)
        for (const auto& rec : records)
            if (!(rec.*member > 1e-300)) any_zero = true;
    if (any_zero) {
        report.fits_skipped_all_zero = true;
        return;
    }
    for (const auto& [name, member] : quantities) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& rec : records) pts.emplace_back(rec.eps, rec.*member);
        report.fits[name] = fit_rate(pts);
    }
}

inline void fit_uep_decay(const UepCache& cache, const SweepConfig& cfg,
                          SweepReport& report) {
    std::vector<double> ts, logs;
    for (const auto& s : cache.traj.samples) {
        if (s.t < 2.0) continue;
        ScalarField ne = s.state.rho_e;
        ne += -1.0;
        const double v = sobolev_norm(ne, cfg.sobolev_order) +
                         sobolev_norm(s.state.u_e, cfg.sobolev_order);
        if (!(v > 0.0)) return;
        ts.push_back(s.t);
        logs.push_back(std::log(v));
    }
    if (ts.size() < 3) return;
    report.uep_decay = detail::linear_fit(ts, logs);
    report.uep_decay_available = true;
}

}  // namespace detail

/// Runs every case of the sweep against one shared limit-system cache, fits
/// the decay rates, and evaluates the pass/fail flags. Failed cases mark the
/// sweep partial; the survivors are still fitted when at least three remain.
inline SweepReport run_sweep(const SweepConfig& cfg) {
    cfg.validate(true);
    const UepCache cache = make_uep_cache(cfg);

    SweepReport report;
    for (const double eps : cfg.epsilons) {
        CaseStatus status;
        status.eps = eps;
        try {
            report.records.push_back(run_case(eps, cfg, cache));
            status.ok = true;
        } catch (const Error& e) {
            status.error = e.what();
            report.partial = true;
        }
        report.statuses.push_back(std::move(status));
    }

    if (report.records.size() >= 3) detail::fit_sweep_rates(report.records, report);
    detail::fit_uep_decay(cache, cfg, report);

    // flags
    report.pass_conservation = !report.records.empty();
    report.pass_ion_smallness = !report.records.empty();
    report.pass_stream_defect = !report.records.empty();
    for (const auto& rec : report.records) {
        report.pass_conservation = report.pass_conservation &&
                                   rec.mass_drift_i < thresholds::mass_drift_rel &&
                                   rec.mass_drift_e < thresholds::mass_drift_rel &&
                                   rec.max_abs_charge < thresholds::charge_abs;
        report.pass_ion_smallness =
            report.pass_ion_smallness && rec.sup_u_i <= rec.ion_smallness_bound;
        report.pass_stream_defect = report.pass_stream_defect &&
                                    rec.max_stream_div_defect < thresholds::stream_div_defect;
    }

    if (!report.records.empty()) {
        double max_ratio = 0.0;
        for (const auto& rec : report.records) max_ratio = std::max(max_ratio, rec.energy_ratio);
        const double first_ratio = report.records.front().energy_ratio;  // largest eps
        const double last_ratio = report.records.back().energy_ratio;    // smallest eps
        report.pass_uniform_bound =
            max_ratio <= thresholds::uniform_bound_ratio &&
            (first_ratio <= 0.0 ||
             last_ratio <= thresholds::uniform_bound_trend * first_ratio);
    }

    if (!report.fits.empty()) {
        const auto ok = [&](const char* name, double min_slope) {
            const RateFit& f = report.fits.at(name);
            return f.slope >= min_slope && f.r_squared >= thresholds::rate_r2;
        };
        report.pass_rates = ok("sup_err_rho_i", thresholds::rate_slope_error) &&
                            ok("sup_err_rho_e", thresholds::rate_slope_error) &&
                            ok("sup_err_u_e", thresholds::rate_slope_error) &&
                            ok("sup_err_grad_phi", thresholds::rate_slope_error) &&
                            ok("sup_u_i", thresholds::rate_slope_ion_velocity) &&
                            ok("int_sq_err_rho_i", thresholds::rate_slope_error_int) &&
                            ok("int_sq_err_rho_e", thresholds::rate_slope_error_int) &&
                            ok("int_sq_err_u_e", thresholds::rate_slope_error_int) &&
                            ok("int_sq_err_grad_phi", thresholds::rate_slope_error_int) &&
                            ok("int_sq_u_i", thresholds::rate_slope_ion_velocity_int);
    }

    report.pass_uep_decay = report.uep_decay_available && report.uep_decay.slope < 0.0 &&
                            report.uep_decay.r_squared >= thresholds::uep_decay_r2;
    return report;
}

}  // namespace bipep
