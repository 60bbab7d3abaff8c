#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>

#include "metagrav/metagrav.hpp"

#ifndef METAGRAV_VERSION
#define METAGRAV_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace metagrav::app {

namespace {

const std::vector<std::string> commands{"estimate", "potential", "spectrum", "threshold", "evolve", "sweep"};

constexpr const char* analog_note =
    "1D analog: scalar coordinates x (body) and y (hidden partner) coupled by the 3D radial profile v(|x - y|)";

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Minimal CSV writer with full double precision.
class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
        out_ << std::setprecision(17);
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    template <typename... T>
    void row(const T&... values) {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << values), ...);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

std::size_t get_size(const KeyValueConfig& cfg, const std::string& key, long long fallback) {
    const auto v = cfg.get_int(key, fallback);
    if (v < 0) throw ConfigError("key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

bool has_scenario(const KeyValueConfig& cfg) {
    return cfg.contains("mass_g") && cfg.contains("radius_cm") && cfg.contains("width_cm");
}

/// kappa from the config, or from a physical scenario when only that is given.
double resolve_kappa(const KeyValueConfig& cfg) {
    if (auto k = cfg.get_double("kappa")) {
        if (!(*k > 0.0)) throw ConfigError("kappa must be positive");
        return *k;
    }
    if (has_scenario(cfg)) return scale(PhysicalScenario::from_config(cfg)).kappa;
    throw ConfigError("need 'kappa' or a physical scenario (mass_g, radius_cm, width_cm)");
}

json constants_json(const Constants& c) { return {{"G", c.G}, {"hbar", c.hbar}, {"k_B", c.k_B}}; }

// ---------------------------------------------------------------- estimate

json run_estimate(const KeyValueConfig& cfg, const fs::path&, std::ostream& log) {
    const auto s = PhysicalScenario::from_config(cfg);
    const double kappa_star = cfg.get_double("kappa_star", 1.0);
    const double density = cfg.get_double("density_g_cm3", 1.0);
    const auto r = estimate(s, kappa_star, density);
    const auto sc = scale(s);

    json j;
    j["scenario"] = {{"mass_g", s.mass_g},
                     {"radius_cm", s.radius_cm},
                     {"width_cm", s.width_cm},
                     {"constants", constants_json(s.constants)}};
    j["gaussian_convention"] = gaussian_width_convention;
    j["kappa"] = sc.kappa;
    j["K_bar_erg"] = r.K_bar;
    j["Lambda_cm"] = r.Lambda;
    j["log10_Lambda_cm"] = std::log10(r.Lambda);
    j["tau_loc_s"] = r.tau_loc;
    j["N_branches"] = r.N_branches;
    j["log10_N_branches"] = std::log10(r.N_branches);
    j["entropy_over_kB"] = r.entropy_over_kB;
    j["t_spread_s"] = r.t_spread;
    j["n_principal"] = r.n_principal;
    j["H_G_expect_erg"] = r.H_G_expect;
    j["H_G_std_erg"] = r.H_G_std;
    j["H_G_kinetic_erg"] = r.H_G_kinetic;
    j["H_G_potential_erg"] = r.H_G_potential;
    j["bound_dominance"] = std::abs(r.H_G_expect) / r.H_G_std;
    j["kappa_star"] = r.kappa_star;
    j["density_g_cm3"] = r.density_g_cm3;
    j["threshold_mass_g"] = r.threshold_mass_g;
    j["threshold_mass_proton_masses"] = r.threshold_mass_g / proton_mass_g;
    j["warnings"] = r.warnings;

    const auto samples = get_size(cfg, "mc_samples", 0);
    if (samples > 0) {
        const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
        const auto mc = sample_potential(s, samples, seed);
        j["sampled_potential"] = {{"samples", mc.samples},
                                  {"seed", seed},
                                  {"mean_erg", mc.mean_erg},
                                  {"std_error_erg", mc.std_error_erg},
                                  {"deviation_in_std_errors", (mc.mean_erg - r.H_G_potential) / mc.std_error_erg}};
    }

    log << std::left;
    auto line = [&](const char* name, double v, const char* unit) {
        log << "  " << std::setw(24) << name << std::setw(14) << std::setprecision(6) << v << unit << "\n";
    };
    log << "estimate (" << gaussian_width_convention << ")\n";
    line("kappa", sc.kappa, "");
    line("K_bar", r.K_bar, "erg");
    line("Lambda", r.Lambda, "cm");
    line("tau_loc", r.tau_loc, "s");
    line("N_branches", r.N_branches, "");
    line("S / k_B", r.entropy_over_kB, "");
    line("t_spread", r.t_spread, "s");
    line("n_principal", r.n_principal, "");
    line("<H_G>", r.H_G_expect, "erg");
    line("std H_G", r.H_G_std, "erg");
    line("threshold mass", r.threshold_mass_g, "g");
    for (const auto& w : r.warnings) log << "  warning: " << w << "\n";
    return j;
}

// ---------------------------------------------------------------- potential

json run_potential(const KeyValueConfig& cfg, const fs::path& out, std::ostream& log) {
    const double u_min = cfg.get_double("u_min", 0.0);
    const double u_max = cfg.get_double("u_max", 5.0);
    const auto points = get_size(cfg, "points", 501);
    const auto table = tabulate_potential(u_min, u_max, points);
    const bool physical = has_scenario(cfg);
    PhysicalScenario s;
    if (physical) s = PhysicalScenario::from_config(cfg);

    std::vector<std::string> header{"u", "v", "dv_du"};
    if (physical) {
        header.emplace_back("d_cm");
        header.emplace_back("V_erg");
    }
    Csv csv(out / "potential.csv", header);
    for (const auto& p : table) {
        if (physical) {
            const double d = p.u * s.radius_cm;
            csv.row(p.u, p.v, p.dv, d, V_physical(d, s));
        } else {
            csv.row(p.u, p.v, p.dv);
        }
    }
    log << "potential: " << points << " samples on [" << u_min << ", " << u_max << "]\n";
    json j;
    j["u_min"] = u_min;
    j["u_max"] = u_max;
    j["points"] = points;
    j["v_floor"] = v_floor();
    j["v_contact"] = v_contact();
    j["dv_contact"] = dv_scaled(contact_separation);
    j["files"] = {"potential.csv"};
    return j;
}

// ---------------------------------------------------------------- spectrum

json run_spectrum(const KeyValueConfig& cfg, const fs::path& out, std::ostream& log) {
    const double kappa = resolve_kappa(cfg);
    ShootOptions opts;
    opts.step = cfg.get_double("step", opts.step);
    opts.u_max = cfg.get_double("u_max", opts.u_max);
    const double e_top = cfg.get_double("e_top", -5e-3);
    const double e_bottom = cfg.get_double("e_bottom", v_floor());
    if (!(e_top < 0.0)) throw ConfigError("e_top must be negative");
    const auto spec = radial_shoot(kappa, e_bottom, e_top, opts);
    const auto cmp = hydrogenic_comparison(spec);

    Csv csv(out / "spectrum.csv",
            {"level", "nodes", "energy", "effective_n", "defect", "label", "hydrogenic", "rel_deviation"});
    for (std::size_t k = 0; k < cmp.size(); ++k) {
        const auto& h = cmp[k];
        csv.row(h.level, spec.nodes[k], h.energy, h.effective_n, h.defect, h.label, h.hydrogenic, h.rel_deviation);
    }

    int self_localized = 0;
    for (double e : spec.eigenvalues) self_localized += e < v_contact() ? 1 : 0;
    json j;
    j["kappa"] = kappa;
    j["u_max"] = spec.u_max;
    j["step"] = spec.step;
    j["energy_window"] = {e_bottom, e_top};
    j["level_count"] = spec.eigenvalues.size();
    j["self_localized_levels"] = self_localized;
    j["ground_energy"] = spec.eigenvalues.empty() ? json(nullptr) : json(spec.eigenvalues.front());
    if (!cmp.empty()) {
        j["quantum_defect"] = cmp.back().defect;
        j["hydrogenic_offset"] = cmp.back().label - cmp.back().level;
        for (const auto& h : cmp) {
            if (hydrogenic_radius(kappa, h.label) > 10.0) {
                j["first_tail_level"] = {{"level", h.level}, {"label", h.label}, {"rel_deviation", h.rel_deviation}};
                break;
            }
        }
    }
    j["files"] = {"spectrum.csv"};
    log << "spectrum: kappa " << kappa << ", " << spec.eigenvalues.size() << " levels below " << e_top << "\n";
    return j;
}

// ---------------------------------------------------------------- threshold

json run_threshold(const KeyValueConfig& cfg, const fs::path&, std::ostream& log) {
    ThresholdOptions opts;
    opts.binding_level = cfg.get_double("binding_level", opts.binding_level);
    opts.kappa_lo = cfg.get_double("kappa_lo", opts.kappa_lo);
    opts.kappa_hi = cfg.get_double("kappa_hi", opts.kappa_hi);
    opts.rel_tol = cfg.get_double("rel_tol", opts.rel_tol);
    opts.shoot.step = cfg.get_double("step", opts.shoot.step);
    const double density = cfg.get_double("density_g_cm3", 1.0);
    if (!(opts.kappa_lo > 0.0 && opts.kappa_hi > opts.kappa_lo)) throw ConfigError("need 0 < kappa_lo < kappa_hi");

    const double ks = threshold_kappa(opts);
    ThresholdOptions fine = opts;
    fine.shoot.step = 0.5 * opts.shoot.step;
    const double ks_fine = threshold_kappa(fine);
    const double mass = threshold_mass(density, ks);

    json j;
    j["criterion"] = "smallest kappa with an s-wave level below binding_level";
    j["binding_level"] = opts.binding_level;
    j["kappa_star"] = ks;
    j["kappa_star_refined"] = ks_fine;
    j["refinement_rel_change"] = std::abs(ks_fine / ks - 1.0);
    j["step"] = opts.shoot.step;
    j["density_g_cm3"] = density;
    j["threshold_mass_g"] = mass;
    j["threshold_mass_proton_masses"] = mass / proton_mass_g;
    log << "threshold: kappa* = " << std::setprecision(6) << ks << " (refined " << ks_fine << "), M = " << mass
        << " g = " << mass / proton_mass_g << " proton masses\n";
    return j;
}

// ---------------------------------------------------------------- evolve

struct Snapshot {
    double t = 0.0;
    double entropy = 0.0;
    double purity = 0.0;
    CoherenceResult coherence;
    double diagonal_width = 0.0;
    double energy = 0.0;
    double energy_std = 0.0;
    double norm = 0.0;
    double trace = 0.0;
    double hermiticity = 0.0;
    double min_eigenvalue = 0.0;
    bool valid = false;
    double swap = 0.0;
    double theta_growth = 0.0;
    std::vector<double> diagonal;
    std::vector<double> eigenvalues;
};

Snapshot diagnose(const Field2D& xi, double t, const EnergyStats& e) {
    Snapshot s;
    s.t = t;
    s.norm = xi.norm2();
    s.swap = swap_asymmetry(xi);
    const auto rho = partial_trace(xi);
    s.entropy = von_neumann_entropy(rho);
    s.purity = purity(rho);
    s.coherence = coherence_length(rho);
    s.diagonal_width = diagonal_width(rho);
    s.energy = e.expect;
    s.energy_std = e.std;
    s.trace = rho.trace();
    s.hermiticity = rho.hermiticity_error();
    s.min_eigenvalue = rho.min_eigenvalue();
    s.valid = rho.valid();
    s.diagonal = rho.diagonal();
    s.eigenvalues = rho.eigenvalues();
    return s;
}

json run_evolve(const KeyValueConfig& cfg, const fs::path& out, std::ostream& log) {
    const double kappa = resolve_kappa(cfg);
    double lambda0 = 0.0;
    if (auto l = cfg.get_double("lambda0")) lambda0 = *l;
    else if (has_scenario(cfg)) lambda0 = scale(PhysicalScenario::from_config(cfg)).width;
    else throw ConfigError("need 'lambda0' or a physical scenario");

    const auto points = get_size(cfg, "grid", 512);
    const double extent = cfg.get_double("extent", 100.0);
    const Grid grid(extent, points);
    PropagatorConfig pc;
    pc.dt = cfg.get_double("dt", 0.01);
    pc.mask_width = cfg.get_double("mask_width", 0.0);
    pc.mask_strength = cfg.get_double("mask_strength", 0.0);
    pc.validate();
    const double total = cfg.get_double("time", 40.0);
    if (!(total > 0.0)) throw ConfigError("time must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(total / pc.dt));
    if (steps == 0) throw ConfigError("time shorter than one step");
    const double every = cfg.get_double("snapshot_every", 1.0);
    if (!(every > 0.0)) throw ConfigError("snapshot_every must be positive");
    pc.steps_per_snapshot = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(every / pc.dt)));
    const auto method = cfg.get_string("method").value_or("factored");
    if (method != "factored" && method != "grid2d") throw ConfigError("method must be 'factored' or 'grid2d'");
    const auto branch_count = get_size(cfg, "branches", 4);

    fs::create_directories(out / "snapshots");
    Csv series(out / "entropy_vs_time.csv",
               {"step", "t", "entropy", "purity", "coherence_length", "coherence_decayed", "diagonal_width", "energy",
                "energy_std", "norm", "trace", "hermiticity", "min_eigenvalue", "valid", "swap_asymmetry",
                "theta_width_growth"});

    std::vector<Snapshot> snaps;
    std::size_t snap_index = 0;
    auto record = [&](std::size_t step, const Field2D& xi, const EnergyStats& e, double theta_growth,
                      const Field1D* relative) {
        auto s = diagnose(xi, static_cast<double>(step) * pc.dt, e);
        s.theta_growth = theta_growth;
        series.row(step, s.t, s.entropy, s.purity, s.coherence.length, s.coherence.decayed ? 1 : 0,
                   s.diagonal_width, s.energy, s.energy_std, s.norm, s.trace, s.hermiticity, s.min_eigenvalue,
                   s.valid ? 1 : 0, s.swap, s.theta_growth);
        std::ostringstream name;
        name << std::setw(4) << std::setfill('0') << snap_index;
        {
            Csv snap(out / "snapshots" / ("marginal_" + name.str() + ".csv"), {"x", "density"});
            for (std::size_t i = 0; i < grid.points(); ++i) snap.row(grid.coord(i), s.diagonal[i]);
        }
        if (relative) {
            const auto& rg = relative->grid();
            Csv rel(out / "snapshots" / ("relative_" + name.str() + ".csv"), {"d", "abs2", "phase"});
            for (std::size_t i = 0; i < rg.points(); ++i) {
                rel.row(rg.coord(i), std::norm((*relative)(i)), std::arg((*relative)(i)));
            }
        }
        ++snap_index;
        log << "  t = " << std::setw(8) << s.t << "  S = " << std::setw(10) << s.entropy
            << "  coherence = " << std::setw(10) << s.coherence.length << "\n";
        snaps.push_back(std::move(s));
    };

    log << "evolve (" << method << "): kappa " << kappa << ", lambda0 " << lambda0 << ", grid " << points << " x "
        << extent << ", dt " << pc.dt << ", " << steps << " steps\n";
    log << "  " << analog_note << "\n";

    std::vector<Branch> branches;
    if (method == "factored") {
        FactoredEvolution fe(lambda0, grid, kappa, pc);
        std::size_t done = 0;
        record(0, fe.reconstruct(), fe.meta_energy(), 0.0, &fe.relative());
        while (done < steps) {
            const auto n = std::min(pc.steps_per_snapshot, steps - done);
            fe.advance(n);
            done += n;
            record(done, fe.reconstruct(), fe.meta_energy(), fe.theta_width_growth(), &fe.relative());
        }
        branches = branch_widths(partial_trace(fe.reconstruct()), branch_count);
    } else {
        auto h = meta_hamiltonian(grid, kappa);
        SplitStepPropagator<2> prop(h, pc);
        auto xi = init_gaussian_meta(lambda0, grid);
        const FreeGaussian theta{lambda0, 1.0 / kappa};
        std::size_t done = 0;
        record(0, xi, h->energy(xi), 0.0, nullptr);
        while (done < steps) {
            const auto n = std::min(pc.steps_per_snapshot, steps - done);
            prop.advance(xi, n);
            done += n;
            const double t = static_cast<double>(done) * pc.dt;
            record(done, xi, h->energy(xi), theta.position_std(t) / theta.position_std(0.0) - 1.0, nullptr);
        }
        branches = branch_widths(partial_trace(xi), branch_count);
    }

    const auto& first = snaps.front();
    const auto& last = snaps.back();
    {
        Csv coh(out / "coherence_profile.csv", {"separation", "initial", "final"});
        for (std::size_t m = 0; m < first.coherence.profile.value.size(); ++m) {
            coh.row(first.coherence.profile.separation[m], first.coherence.profile.value[m],
                    last.coherence.profile.value[m]);
        }
        Csv diag(out / "rho_diagonal.csv", {"x", "initial", "final"});
        for (std::size_t i = 0; i < grid.points(); ++i) diag.row(grid.coord(i), first.diagonal[i], last.diagonal[i]);
        Csv eig(out / "rho_eigenvalues.csv", {"rank", "initial", "final"});
        const auto n = last.eigenvalues.size();
        for (std::size_t k = 0; k < n; ++k) eig.row(k, first.eigenvalues[n - 1 - k], last.eigenvalues[n - 1 - k]);
    }

    double max_entropy = 0.0, max_drift = 0.0, max_norm = 0.0, max_swap = 0.0;
    bool all_valid = true;
    for (const auto& s : snaps) {
        max_entropy = std::max(max_entropy, s.entropy);
        max_drift = std::max(max_drift, std::abs(s.energy / first.energy - 1.0));
        max_norm = std::max(max_norm, std::abs(s.norm - 1.0));
        max_swap = std::max(max_swap, s.swap);
        all_valid = all_valid && s.valid;
    }

    json j;
    j["model"] = analog_note;
    j["method"] = method;
    j["kappa"] = kappa;
    j["lambda0"] = lambda0;
    j["tau_loc_scaled"] = lambda0;
    j["grid"] = {{"points", points}, {"extent", extent}, {"spacing", grid.spacing()}};
    j["dt"] = pc.dt;
    j["steps"] = steps;
    j["time"] = static_cast<double>(steps) * pc.dt;
    j["mask"] = {{"width", pc.mask_width}, {"strength", pc.mask_strength}};
    j["snapshots"] = snaps.size();
    j["entropy_initial"] = first.entropy;
    j["entropy_final"] = last.entropy;
    j["entropy_max"] = max_entropy;
    j["coherence_length_initial"] = first.coherence.length;
    j["coherence_length_final"] = last.coherence.length;
    j["coherence_decayed_final"] = last.coherence.decayed;
    j["coherence_shrink_factor"] = first.coherence.length / last.coherence.length;
    j["diagonal_width_initial"] = first.diagonal_width;
    j["diagonal_width_final"] = last.diagonal_width;
    j["diagonal_shrink_factor"] = first.diagonal_width / last.diagonal_width;
    j["energy_initial"] = first.energy;
    j["energy_std_initial"] = first.energy_std;
    j["energy_rel_drift_max"] = max_drift;
    j["norm_drift_max"] = max_norm;
    j["swap_asymmetry_max"] = max_swap;
    j["density_matrix_valid"] = all_valid;
    j["theta_width_growth_final"] = last.theta_growth;
    json br = json::array();
    for (const auto& b : branches) br.push_back({{"weight", b.weight}, {"centre", b.centre}, {"width", b.width}});
    j["leading_branches"] = br;
    j["files"] = {"entropy_vs_time.csv", "coherence_profile.csv", "rho_diagonal.csv", "rho_eigenvalues.csv",
                  "snapshots/"};
    return j;
}

// ---------------------------------------------------------------- sweep

json run_sweep(const KeyValueConfig& cfg, const fs::path& out, std::ostream& log, int& exit_code);

using Handler = json (*)(const KeyValueConfig&, const fs::path&, std::ostream&);

Handler handler_for(const std::string& command) {
    if (command == "estimate") return run_estimate;
    if (command == "potential") return run_potential;
    if (command == "spectrum") return run_spectrum;
    if (command == "threshold") return run_threshold;
    if (command == "evolve") return run_evolve;
    return nullptr;
}

json library_versions() {
    std::ostringstream eigen;
    eigen << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
    std::ostringstream boost;
    boost << BOOST_VERSION / 100000 << "." << BOOST_VERSION / 100 % 1000 << "." << BOOST_VERSION % 100;
    std::ostringstream nl;
    nl << NLOHMANN_JSON_VERSION_MAJOR << "." << NLOHMANN_JSON_VERSION_MINOR << "." << NLOHMANN_JSON_VERSION_PATCH;
    return {{"eigen", eigen.str()},
            {"boost", boost.str()},
            {"fftw", std::string(fftw_version)},
            {"nlohmann_json", nl.str()},
            {"cli11", std::string(CLI11_VERSION)},
            {"compiler", std::string(__VERSION__)}};
}

} // namespace

std::string config_hash(const KeyValueConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : cfg.canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

RunResult execute(const RunRequest& req, std::ostream& log) {
    RunResult res;
    const auto started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();

    json manifest;
    manifest["tool"] = "metagrav";
    manifest["version"] = METAGRAV_VERSION;
    manifest["command"] = req.command;
    manifest["config_hash"] = config_hash(req.config);
    manifest["config"] = req.config.entries();
    manifest["libraries"] = library_versions();
    manifest["started_utc"] = started;

    try {
        fs::create_directories(req.out_dir);
    } catch (const std::exception& e) {
        res.exit_code = exit_config;
        res.error = std::string("cannot create output directory: ") + e.what();
        return res;
    }

    try {
        if (req.command == "sweep") {
            res.summary = run_sweep(req.config, req.out_dir, log, res.exit_code);
            if (res.exit_code != exit_ok) res.error = "one or more sweep runs failed";
        } else if (auto h = handler_for(req.command)) {
            res.summary = h(req.config, req.out_dir, log);
        } else {
            throw ConfigError("unknown command '" + req.command + "'");
        }
    } catch (const ConfigError& e) {
        res.exit_code = exit_config;
        res.error = e.what();
    } catch (const DomainError& e) {
        res.exit_code = exit_config;
        res.error = e.what();
    } catch (const std::exception& e) {
        res.exit_code = exit_numerical;
        res.error = e.what();
    }

    const bool failed = res.exit_code != exit_ok;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["finished_utc"] = utc_now();
    manifest["wall_seconds"] = wall;
    manifest["failed"] = failed;
    manifest["exit_code"] = res.exit_code;
    manifest["error"] = failed ? json(res.error) : json(nullptr);
    manifest["summary"] = res.summary;

    try {
        if (!res.summary.empty() || !failed) write_json(req.out_dir / "summary.json", res.summary);
        write_json(req.out_dir / "manifest.json", manifest);
    } catch (const std::exception& e) {
        if (!failed) {
            res.exit_code = exit_numerical;
            res.error = e.what();
        }
    }
    return res;
}

namespace {

json run_sweep(const KeyValueConfig& cfg, const fs::path& out, std::ostream& log, int& exit_code) {
    const auto command = cfg.get_string("sweep_command").value_or("");
    if (command == "sweep" || !handler_for(command)) {
        throw ConfigError("sweep_command must be one of estimate, potential, spectrum, threshold, evolve");
    }
    const auto key = cfg.get_string("sweep_key").value_or("");
    if (key.empty()) throw ConfigError("sweep needs 'sweep_key'");
    const auto raw = cfg.get_string("sweep_values").value_or("");
    std::vector<std::string> values;
    {
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b != std::string::npos) values.push_back(item.substr(b, e - b + 1));
        }
    }
    if (values.empty()) throw ConfigError("sweep needs a non-empty 'sweep_values' list");

    KeyValueConfig base;
    for (const auto& [k, v] : cfg.entries()) {
        if (k.rfind("sweep_", 0) != 0 && k != "workers") base.set(k, v);
    }
    const auto hw = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = std::clamp<std::size_t>(get_size(cfg, "workers", hw), 1, values.size());

    std::vector<RunResult> results(values.size());
    std::vector<std::string> logs(values.size());
    std::vector<std::string> dirs(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::ostringstream name;
        name << "run_" << std::setw(3) << std::setfill('0') << i;
        dirs[i] = name.str();
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            RunRequest sub;
            sub.command = command;
            sub.config = base;
            sub.config.set(key, values[i]);
            sub.out_dir = out / dirs[i];
            std::ostringstream sublog;
            results[i] = execute(sub, sublog);
            logs[i] = sublog.str();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json runs = json::array();
    exit_code = exit_ok;
    for (std::size_t i = 0; i < values.size(); ++i) {
        log << "[" << dirs[i] << "] " << key << " = " << values[i] << "\n" << logs[i];
        if (results[i].exit_code != exit_ok) {
            log << "  failed: " << results[i].error << "\n";
            if (exit_code == exit_ok || results[i].exit_code == exit_config) exit_code = results[i].exit_code;
        }
        runs.push_back({{"dir", dirs[i]},
                        {"value", values[i]},
                        {"exit_code", results[i].exit_code},
                        {"summary", results[i].summary}});
    }
    json j;
    j["sweep_command"] = command;
    j["sweep_key"] = key;
    j["workers"] = workers;
    j["runs"] = runs;
    return j;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Entropic localization toolkit for self-gravitating meta-states"};
    cli.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::map<std::string, std::string> overrides;
    const std::map<std::string, std::string> descriptions{
        {"estimate", "closed-form estimates for a physical scenario"},
        {"potential", "tabulate the scaled interpenetrating-sphere potential"},
        {"spectrum", "s-wave bound-state spectrum of the relative motion"},
        {"threshold", "self-localization threshold coupling and mass"},
        {"evolve", "desk-scale meta-state evolution with entropy diagnostics"},
        {"sweep", "fan out independent runs over a list of values"}};
    for (const auto& name : commands) {
        auto* sc = cli.add_subcommand(name, descriptions.at(name));
        sc->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
        sc->add_option("--out", out_dir, "output directory (default out/<command>)");
        for (const char* flag : {"seed", "kappa", "grid", "dt", "time"}) {
            const std::string key = flag;
            sc->add_option_function<std::string>(
                  std::string("--") + flag, [key, &overrides](const std::string& v) { overrides[key] = v; },
                  "override '" + key + "'")
                ->check(CLI::Number);
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        cli.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << cli.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }

    RunRequest req;
    req.command = cli.get_subcommands().front()->get_name();
    try {
        if (!config_path.empty()) req.config = KeyValueConfig::load(config_path);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
    for (const auto& [k, v] : overrides) req.config.set(k, v);
    req.out_dir = out_dir.empty() ? fs::path("out") / req.command : fs::path(out_dir);

    const auto res = execute(req, out);
    if (res.exit_code != exit_ok) err << "error: " << res.error << "\n";
    else out << "wrote " << (req.out_dir / "summary.json").string() << "\n";
    return res.exit_code;
}

} // namespace metagrav::app
