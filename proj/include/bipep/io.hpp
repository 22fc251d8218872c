#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bipep/errors.hpp"
#include "bipep/harness.hpp"

namespace bipep {

namespace detail {

inline void require_stream(const std::ios& s, const std::string& path) {
    if (!s) throw ConfigError("cannot open " + path);
}

}  // namespace detail

/// Per-sample CSV, one row per sample, full double precision. Interval
/// quantities (the residual columns) describe [t_{m-1}, t_m] and are written
/// on row m; row 0 carries nan for them.
inline void write_run_csv(const std::string& path, const RunRecord& rec) {
    std::ofstream out(path);
    detail::require_stream(out, path);
    out << "t,energy_total,energy_dissipative,entropy_energy,entropy_dissipation,"
           "error_dissipation,norm_err_rho_i,norm_err_rho_e,norm_err_u_e,"
           "norm_err_grad_phi,norm_u_i,mass_ion,mass_electron,charge,"
           "entropy_residual,stream_residual_ion,stream_residual_electron\n";
    out << std::setprecision(17);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t m = 0; m < rec.t.size(); ++m) {
        const auto interval = [&](const std::vector<double>& v) {
            return m == 0 ? nan : v[m - 1];
        };
        out << rec.t[m] << ',' << rec.energy_total[m] << ',' << rec.energy_dissip[m]
            << ',' << rec.entropy_energy[m] << ',' << rec.entropy_dissip[m] << ','
            << rec.err_dissipation[m] << ',' << rec.norm_err_rho_i[m] << ','
            << rec.norm_err_rho_e[m] << ',' << rec.norm_err_u_e[m] << ','
            << rec.norm_err_grad_phi[m] << ',' << rec.norm_u_i[m] << ','
            << rec.mass_i[m] << ',' << rec.mass_e[m] << ',' << rec.charge[m] << ','
            << interval(rec.entropy_residual) << ',' << interval(rec.stream_res_ion)
            << ',' << interval(rec.stream_res_electron) << '\n';
    }
}

inline nlohmann::json fit_json(const RateFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

inline nlohmann::json run_summary_json(const RunRecord& rec) {
    nlohmann::json j;
    j["epsilon"] = rec.eps;
    j["samples"] = rec.t.size();
    j["suprema"] = {{"energy_total", rec.sup_energy_total},
                    {"err_rho_i", rec.sup_err_rho_i},
                    {"err_rho_e", rec.sup_err_rho_e},
                    {"err_u_e", rec.sup_err_u_e},
                    {"err_grad_phi", rec.sup_err_grad_phi},
                    {"u_i", rec.sup_u_i}};
    j["time_integrals_of_squares"] = {{"err_rho_i", rec.int_sq_err_rho_i},
                                      {"err_rho_e", rec.int_sq_err_rho_e},
                                      {"err_u_e", rec.int_sq_err_u_e},
                                      {"err_grad_phi", rec.int_sq_err_grad_phi},
                                      {"u_i", rec.int_sq_u_i}};
    j["energy_ratio"] = rec.energy_ratio;
    j["conservation"] = {{"mass_drift_rel_ion", rec.mass_drift_i},
                         {"mass_drift_rel_electron", rec.mass_drift_e},
                         {"max_abs_charge", rec.max_abs_charge}};
    j["entropy"] = {{"max_residual", rec.max_entropy_residual},
                    {"max_uptick", rec.max_entropy_uptick}};
    j["stream"] = {{"max_residual_ion", rec.max_stream_res_ion},
                   {"max_residual_electron", rec.max_stream_res_electron},
                   {"max_div_defect", rec.max_stream_div_defect}};
    j["ion_smallness"] = {{"sup_u_i", rec.sup_u_i}, {"bound", rec.ion_smallness_bound}};
    return j;
}

inline nlohmann::json sweep_summary_json(const SweepReport& rep) {
    nlohmann::json j;
    j["partial"] = rep.partial;
    j["cases"] = nlohmann::json::array();
    for (const auto& st : rep.statuses)
        j["cases"].push_back({{"epsilon", st.eps}, {"ok", st.ok}, {"error", st.error}});
    j["runs"] = nlohmann::json::array();
    for (const auto& rec : rep.records) j["runs"].push_back(run_summary_json(rec));
    j["fits_skipped_all_zero"] = rep.fits_skipped_all_zero;
    j["fits"] = nlohmann::json::object();
    for (const auto& [name, fit] : rep.fits) j["fits"][name] = fit_json(fit);
    if (rep.uep_decay_available) j["uep_decay"] = fit_json(rep.uep_decay);
    j["pass"] = {{"conservation", rep.pass_conservation},
                 {"uniform_bound", rep.pass_uniform_bound},
                 {"rates", rep.pass_rates},
                 {"uep_decay", rep.pass_uep_decay},
                 {"ion_smallness", rep.pass_ion_smallness},
                 {"stream_div_defect", rep.pass_stream_defect}};
    return j;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    detail::require_stream(out, path);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Field snapshots: <prefix>.json sidecar + <prefix>.bin payload. The payload
// is little-endian float64, row-major over the grid (axis 0 slowest),
// sample-major: for each sample, fields in listed order, components
// consecutively.
// ---------------------------------------------------------------------------

struct SnapshotField {
    std::string name;
    int components = 1;
    /// samples[m][c] is one nodal array
    std::vector<std::vector<std::vector<double>>> samples;
};

struct Snapshot {
    int dim = 1;
    int n = 8;
    double sample_interval = 0.0;
    std::vector<double> times;
    std::vector<SnapshotField> fields;
};

inline SnapshotField snapshot_scalar_series(const std::string& name,
                                            const std::vector<ScalarField>& series) {
    SnapshotField f{name, 1, {}};
    for (const auto& s : series) f.samples.push_back({s.values()});
    return f;
}

inline SnapshotField snapshot_vector_series(const std::string& name,
                                            const std::vector<VectorField>& series) {
    SnapshotField f{name, series.empty() ? 1 : series.front().dim(), {}};
    for (const auto& v : series) {
        std::vector<std::vector<double>> comps;
        for (int c = 0; c < v.dim(); ++c) comps.push_back(v[c].values());
        f.samples.push_back(std::move(comps));
    }
    return f;
}

inline Snapshot snapshot_uep(const UepTrajectory& traj) {
    Snapshot snap;
    const GridPtr& g = traj.samples.front().state.grid();
    snap.dim = g->dim();
    snap.n = g->points_per_axis();
    snap.sample_interval = traj.sample_interval;
    std::vector<ScalarField> rho;
    std::vector<VectorField> u;
    for (const auto& s : traj.samples) {
        snap.times.push_back(s.t);
        rho.push_back(s.state.rho_e);
        u.push_back(s.state.u_e);
    }
    snap.fields.push_back(snapshot_scalar_series("rho_e", rho));
    snap.fields.push_back(snapshot_vector_series("u_e", u));
    return snap;
}

inline void write_snapshot(const std::string& prefix, const Snapshot& snap) {
    nlohmann::json meta;
    meta["format"] = "bipep-fields-v1";
    meta["dim"] = snap.dim;
    meta["n"] = snap.n;
    meta["sample_interval"] = snap.sample_interval;
    meta["times"] = snap.times;
    meta["scalar_type"] = "float64";
    meta["byte_order"] = "little-endian";
    meta["layout"] =
        "sample-major; per sample: fields in listed order, components "
        "consecutively, nodes row-major (axis 0 slowest)";
    meta["fields"] = nlohmann::json::array();
    for (const auto& f : snap.fields)
        meta["fields"].push_back({{"name", f.name}, {"components", f.components}});
    write_json(prefix + ".json", meta);

    std::ofstream bin(prefix + ".bin", std::ios::binary);
    detail::require_stream(bin, prefix + ".bin");
    for (std::size_t m = 0; m < snap.times.size(); ++m)
        for (const auto& f : snap.fields)
            for (int c = 0; c < f.components; ++c)
                bin.write(reinterpret_cast<const char*>(f.samples[m][static_cast<std::size_t>(c)].data()),
                          static_cast<std::streamsize>(f.samples[m][static_cast<std::size_t>(c)].size() *
                                                       sizeof(double)));
}

inline Snapshot read_snapshot(const std::string& prefix) {
    std::ifstream meta_in(prefix + ".json");
    detail::require_stream(meta_in, prefix + ".json");
    nlohmann::json meta;
    meta_in >> meta;
    if (meta.value("format", "") != "bipep-fields-v1")
        throw ConfigError(prefix + ".json: not a bipep-fields-v1 snapshot");

    Snapshot snap;
    snap.dim = meta.at("dim").get<int>();
    snap.n = meta.at("n").get<int>();
    snap.sample_interval = meta.value("sample_interval", 0.0);
    snap.times = meta.at("times").get<std::vector<double>>();
    std::size_t node_count = 1;
    for (int a = 0; a < snap.dim; ++a) node_count *= static_cast<std::size_t>(snap.n);

    for (const auto& f : meta.at("fields"))
        snap.fields.push_back(SnapshotField{f.at("name").get<std::string>(),
                                            f.at("components").get<int>(), {}});

    std::ifstream bin(prefix + ".bin", std::ios::binary);
    detail::require_stream(bin, prefix + ".bin");
    for (std::size_t m = 0; m < snap.times.size(); ++m) {
        for (auto& f : snap.fields) {
            std::vector<std::vector<double>> comps;
            for (int c = 0; c < f.components; ++c) {
                std::vector<double> nodal(node_count);
                bin.read(reinterpret_cast<char*>(nodal.data()),
                         static_cast<std::streamsize>(node_count * sizeof(double)));
                if (!bin) throw ConfigError(prefix + ".bin: truncated payload");
                comps.push_back(std::move(nodal));
            }
            f.samples.push_back(std::move(comps));
        }
    }
    return snap;
}

/// gnuplot script + data files for the log-log rate figure.
inline void write_rate_plot(const std::string& prefix, const SweepReport& rep) {
    const std::string dat = prefix + "_rates.dat";
    {
        std::ofstream out(dat);
        detail::require_stream(out, dat);
        out << "# eps sup_err_rho_i sup_err_rho_e sup_err_u_e sup_err_grad_phi sup_u_i\n";
        out << std::setprecision(17);
        for (const auto& rec : rep.records)
            out << rec.eps << ' ' << rec.sup_err_rho_i << ' ' << rec.sup_err_rho_e << ' '
                << rec.sup_err_u_e << ' ' << rec.sup_err_grad_phi << ' ' << rec.sup_u_i
                << '\n';
    }
    std::ostringstream gp;
    gp << "set logscale xy\nset xlabel 'eps'\nset ylabel 'sup_t norm'\nset key left top\n";
    gp << "plot ";
    const char* titles[] = {"err rho_i", "err rho_e", "err u_e", "err grad phi", "u_i"};
    const char* keys[] = {"sup_err_rho_i", "sup_err_rho_e", "sup_err_u_e",
                          "sup_err_grad_phi", "sup_u_i"};
    for (int c = 0; c < 5; ++c) {
        std::string title = titles[static_cast<std::size_t>(c)];
        const auto it = rep.fits.find(keys[static_cast<std::size_t>(c)]);
        if (it != rep.fits.end()) {
            std::ostringstream t;
            t << title << " (slope " << std::fixed << std::setprecision(2)
              << it->second.slope << ")";
            title = t.str();
        }
        gp << "'" << dat << "' using 1:" << c + 2 << " with linespoints title '" << title
           << "'";
        gp << (c < 4 ? ", " : "\n");
    }
    std::ofstream out(prefix + "_rates.gp");
    detail::require_stream(out, prefix + "_rates.gp");
    out << gp.str();
}

}  // namespace bipep
