#pragma once

// Command-line front end: run configuration, the five subcommands and the
// argument/config-file plumbing shared by tools/blc_lab.cpp and the tests.

#include "blc/blc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace blc::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kToleranceViolated = 1, kInvalidConfig = 2, kIoError = 3 };

struct RunConfig {
    int delta = -1;
    int epsilon = 1;
    int r = 0;
    int s = 0;
    int tau = 1;
    std::optional<int> case_id;
    std::string grid = "-2:2:0.02,-2:2:0.02";
    std::vector<double> phis;
    std::string seed = "auto";
    std::vector<double> consts;  ///< integration constants; the first one belongs to the seed
    std::string out = "out";
    std::optional<double> tol_pde;
    std::optional<double> tol_bt;
    std::optional<double> tol_k;
    double guard = 1e-10;
    double p0_x1 = 0.0;
    double p0_x2 = 0.0;
    std::optional<double> alpha0;
    double perturb = 0.0;  ///< corrupts the seed seen by the residual check
    int substeps = 1;
    int depth = 0;  ///< 0 means all phis
    std::string level1 = "auto";
    std::string surface = "TimelikeK1";
    double transform_guard = 0.2;
    double metric_guard = 1e-2;
    bool ply = false;

    [[nodiscard]] CaseConfig case_config() const {
        return case_id ? case_from_id(*case_id, tau) : derive_case(delta, epsilon, r, s, tau);
    }
    [[nodiscard]] double c0() const { return consts.empty() ? 0.0 : consts.front(); }
};

/// Fills fields present in a JSON object; keys use the flag spellings with dashes or underscores.
inline void apply_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config file must hold a JSON object");
    for (const auto& [raw_key, v] : j.items()) {
        std::string key = raw_key;
        for (char& ch : key) ch = ch == '_' ? '-' : ch;
        try {
            if (key == "case-delta") cfg.delta = v.get<int>();
            else if (key == "case-epsilon") cfg.epsilon = v.get<int>();
            else if (key == "case-r") cfg.r = v.get<int>();
            else if (key == "case-s") cfg.s = v.get<int>();
            else if (key == "case") cfg.case_id = v.get<int>();
            else if (key == "tau") cfg.tau = v.get<int>();
            else if (key == "grid") cfg.grid = v.get<std::string>();
            else if (key == "phi") cfg.phis = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
            else if (key == "seed") cfg.seed = v.get<std::string>();
            else if (key == "c") cfg.consts = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
            else if (key == "out") cfg.out = v.get<std::string>();
            else if (key == "tol-pde") cfg.tol_pde = v.get<double>();
            else if (key == "tol-bt") cfg.tol_bt = v.get<double>();
            else if (key == "tol-k") cfg.tol_k = v.get<double>();
            else if (key == "guard") cfg.guard = v.get<double>();
            else if (key == "p0") {
                const auto p = v.get<std::vector<double>>();
                if (p.size() != 2) throw Error(ErrorKind::InvalidConfig, "p0 needs two coordinates");
                cfg.p0_x1 = p[0];
                cfg.p0_x2 = p[1];
            } else if (key == "alpha0") cfg.alpha0 = v.get<double>();
            else if (key == "perturb") cfg.perturb = v.get<double>();
            else if (key == "substeps") cfg.substeps = v.get<int>();
            else if (key == "depth") cfg.depth = v.get<int>();
            else if (key == "level1") cfg.level1 = v.get<std::string>();
            else if (key == "surface") cfg.surface = v.get<std::string>();
            else if (key == "transform-guard") cfg.transform_guard = v.get<double>();
            else if (key == "metric-guard") cfg.metric_guard = v.get<double>();
            else if (key == "ply") cfg.ply = v.get<bool>();
            else throw Error(ErrorKind::InvalidConfig, "unknown config key '" + raw_key + "'");
        } catch (const json::exception& e) {
            throw Error(ErrorKind::InvalidConfig, "bad value for '" + raw_key + "': " + e.what());
        }
    }
}

inline RunConfig load_config_file(const fs::path& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    apply_json(base, j);
    return base;
}

/// Outcome of one subcommand: exit status, machine-readable report, one-line summary.
struct CommandResult {
    int exit = kOk;
    json report = json::object();
    std::string summary;
};

namespace detail {

inline void write_json(const fs::path& path, const json& j) {
    write_atomically(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

inline json stats_json(const FieldStats& s) {
    return {{"max_abs", s.max_abs}, {"mean_abs", s.mean_abs}, {"nodes", s.count}};
}

/// Records a tolerance check in the report and returns whether it holds.
inline bool check(json& report, const std::string& name, double value, const std::optional<double>& tol) {
    report["checks"][name] = {{"value", value}};
    if (!tol) return true;
    const bool ok = std::isfinite(value) && value <= *tol;
    report["checks"][name]["tolerance"] = *tol;
    report["checks"][name]["pass"] = ok;
    return ok;
}

inline std::string resolve_seed_name(const RunConfig& cfg, bool prefer_kink) {
    if (cfg.seed != "auto") return cfg.seed;
    return prefer_kink && !cfg.phis.empty() ? "kink" : "zero";
}

/// Named seed as a closed form. The kink takes the case, first phi and first constant.
inline AnalyticSolution named_seed(const RunConfig& cfg, const std::string& name) {
    SeedSpec spec;
    spec.case_id = to_int(cfg.case_config().id);
    spec.tau = cfg.tau;
    spec.c = cfg.c0();
    spec.phi = cfg.phis.empty() ? 0.0 : cfg.phis.front();
    if (name == "zero") spec.kind = SeedKind::Zero;
    else if (name == "kink") spec.kind = SeedKind::Kink;
    else if (name == "example2") spec.kind = SeedKind::Example2Alpha;
    else if (name == "example4") spec.kind = SeedKind::Example4Alpha;
    else if (name == "example4-alpha1") spec.kind = SeedKind::Example4Alpha1;
    else if (name == "example4-alpha2") spec.kind = SeedKind::Example4Alpha2;
    else throw Error(ErrorKind::UnknownSpec, "unknown seed '" + name + "'");
    if ((spec.kind == SeedKind::Kink || spec.kind == SeedKind::Example2Alpha || spec.kind == SeedKind::Example4Alpha2) &&
        cfg.phis.empty()) {
        throw Error(ErrorKind::InvalidConfig, "seed '" + name + "' needs --phi");
    }
    return make_seed(spec);
}

inline ScalarField perturbed(ScalarField f, double amount) {
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (f.valid[k]) f.values[k] += amount;
    }
    return f;
}

}  // namespace detail

inline CommandResult cmd_seed(const RunConfig& cfg) {
    const Grid grid = parse_grid(cfg.grid);
    const std::string name = detail::resolve_seed_name(cfg, true);
    const ScalarField f = sample(detail::named_seed(cfg, name), grid);
    const fs::path file = fs::path(cfg.out) / "seed.csv";
    save_csv(file, f);
    CommandResult res;
    res.report = {{"command", "seed"}, {"seed", name}, {"file", file.string()}, {"valid_nodes", f.valid_count()},
                  {"nodes", f.values.size()}};
    res.summary = "seed '" + name + "' -> " + file.string();
    return res;
}

inline CommandResult cmd_transform(const RunConfig& cfg) {
    const Grid grid = parse_grid(cfg.grid);
    if (cfg.phis.empty()) throw Error(ErrorKind::InvalidConfig, "transform needs --phi");
    const CaseConfig c = cfg.case_config();
    const BTSystem sys = make_bt_system(c, cfg.phis.front());
    const std::string name = detail::resolve_seed_name(cfg, false);
    const AnalyticSolution alpha = detail::named_seed(cfg, name);
    const GridPoint p0{cfg.p0_x1, cfg.p0_x2};

    // closed-form reference for the transformed field, when one is known
    std::optional<AnalyticSolution> reference;
    if (name == "zero") reference = kink_seed(c, cfg.phis.front(), cfg.c0());
    if (name == "example4" && c.id == CaseId::Case6 && c.tau == 1 && cfg.phis.front() == 0.0) {
        SeedSpec s{SeedKind::Example4Alpha1};
        s.c = cfg.c0();
        reference = example_solution(s);
    }
    double a0 = 0.0;
    if (cfg.alpha0) a0 = *cfg.alpha0;
    else if (reference && reference->defined(p0.x1, p0.x2)) a0 = reference->eval(p0.x1, p0.x2);

    IntegrateOptions opt;
    opt.substeps = cfg.substeps;
    const ScalarField ap = integrate_bt(sys, alpha, grid, p0, a0, opt);
    const fs::path file = fs::path(cfg.out) / "alpha_prime.csv";
    save_csv(file, ap);

    CommandResult res;
    json& rep = res.report;
    rep = {{"command", "transform"}, {"seed", name}, {"case", to_int(c.id)}, {"phi", cfg.phis.front()},
           {"alpha_prime_0", a0}, {"file", file.string()}, {"valid_nodes", ap.valid_count()},
           {"masked_nodes", ap.values.size() - ap.valid_count()}};
    const FieldStats pde = stats(pde_residual(ap, c, 1));
    // a nonzero perturbation checks the result against a corrupted copy of the seed
    const BTResidual btr = cfg.perturb == 0.0 ? bt_residual(sys, alpha, ap)
                                              : bt_residual(sys, detail::perturbed(sample(alpha, grid), cfg.perturb), ap);
    rep["pde_residual"] = detail::stats_json(pde);
    rep["bt_residual"] = {{"first", detail::stats_json(stats(btr.first))}, {"second", detail::stats_json(stats(btr.second))}};
    bool ok = detail::check(rep, "pde_residual", pde.max_abs, cfg.tol_pde);
    ok = detail::check(rep, "bt_residual", btr.max_abs(), cfg.tol_bt) && ok;
    if (reference) rep["max_error_vs_closed_form"] = stats(difference(ap, sample(*reference, grid))).max_abs;
    res.exit = ok ? kOk : kToleranceViolated;
    res.summary = "transform: " + std::to_string(ap.valid_count()) + " valid nodes, max PDE residual " +
                  std::to_string(pde.max_abs) + ", max BT residual " + std::to_string(btr.max_abs());
    return res;
}

namespace detail {

/// Lattice over the configured seed and phis with the configured level-1 source.
inline Lattice build_lattice(const RunConfig& cfg, const Grid& grid, const std::vector<double>& phis, int depth,
                             const std::string& seed_name) {
    const CaseConfig c = cfg.case_config();
    const AnalyticSolution seed = named_seed(cfg, seed_name);
    std::string level1 = cfg.level1;
    if (level1 == "auto") level1 = seed_name == "zero" ? "kinks" : seed_name == "example4" ? "example4" : "integrate";
    Level1Provider provider;
    const std::vector<double>& consts = cfg.consts;
    if (level1 == "kinks") {
        if (seed_name != "zero") throw Error(ErrorKind::InvalidConfig, "closed-form kinks need the zero seed");
        provider = kink_level1(grid, consts);
    } else if (level1 == "example4") {
        if (seed_name != "example4" || c.id != CaseId::Case6 || c.tau != 1) {
            throw Error(ErrorKind::InvalidConfig, "example4 level 1 needs the example4 seed in case 6 with tau=1");
        }
        std::vector<AnalyticSolution> forms;
        for (std::size_t k = 0; k < phis.size(); ++k) {
            SeedSpec s;
            s.c = k < consts.size() ? consts[k] : 0.0;
            if (phis[k] == 0.0) {
                s.kind = SeedKind::Example4Alpha1;
            } else {
                s.kind = SeedKind::Example4Alpha2;
                s.phi = phis[k];
            }
            forms.push_back(example_solution(s));
        }
        provider = analytic_level1(std::move(forms), grid);
    } else if (level1 == "integrate") {
        IntegrateOptions opt;
        opt.substeps = cfg.substeps;
        std::vector<double> initial(phis.size(), cfg.alpha0.value_or(0.0));
        provider = integrated_level1(seed, grid, {cfg.p0_x1, cfg.p0_x2}, initial, opt);
    } else {
        throw Error(ErrorKind::InvalidConfig, "level1 must be auto, kinks, example4 or integrate");
    }
    SuperposeOptions sopt;
    sopt.guard = cfg.guard;
    return bianchi_lattice(c, sample(seed, grid), phis, depth, provider, sopt);
}

}  // namespace detail

inline CommandResult cmd_superpose(const RunConfig& cfg) {
    const Grid grid = parse_grid(cfg.grid);
    if (cfg.phis.empty()) throw Error(ErrorKind::InvalidConfig, "superpose needs at least one --phi");
    const int depth = cfg.depth > 0 ? cfg.depth : static_cast<int>(cfg.phis.size());
    const std::string seed_name = detail::resolve_seed_name(cfg, false);
    const Lattice lat = detail::build_lattice(cfg, grid, cfg.phis, depth, seed_name);

    CommandResult res;
    json nodes = json::array();
    bool ok = true;
    double worst = 0.0;
    for (std::size_t id = 1; id < lat.nodes.size(); ++id) {
        const LatticeNode& n = lat.nodes[id];
        const std::string label = n.label();
        const fs::path file = fs::path(cfg.out) / (label + ".csv");
        const fs::path mask_file = fs::path(cfg.out) / (label + "_mask.csv");
        save_csv(file, n.field);
        ScalarField mask(grid, 0.0, true);
        if (n.level >= 2) {
            const CaseConfig t = n.level % 2 == 0 ? lat.cfg : partner_case(lat.cfg);
            const SuperposeInput in{t, lat.nodes[*n.base].field, lat.nodes[n.parents[0]].field,
                                    lat.nodes[n.parents[1]].field, lat.phis[n.first], lat.phis[n.last]};
            const BoolField m = singularity_mask(superposition_margin(in), cfg.guard);
            for (std::size_t k = 0; k < m.values.size(); ++k) mask.values[k] = m.values[k];
        } else {
            for (std::size_t k = 0; k < mask.values.size(); ++k) mask.values[k] = n.field.valid[k];
        }
        save_csv(mask_file, mask);
        const FieldStats pde = stats(pde_residual(n.field, n.equation));
        worst = std::max(worst, pde.max_abs);
        std::vector<int> idx;
        std::vector<double> phis;
        for (std::size_t k = n.first; k <= n.last; ++k) {
            idx.push_back(static_cast<int>(k) + 1);
            phis.push_back(lat.phis[k]);
        }
        nodes.push_back({{"id", id}, {"label", label}, {"level", n.level}, {"phi_indices", idx}, {"phis", phis},
                         {"parents", n.parents}, {"base", n.base.value_or(-1)}, {"equation", n.equation.name()},
                         {"case", to_int(n.effective_case)}, {"file", file.string()}, {"mask_file", mask_file.string()},
                         {"valid_nodes", n.field.valid_count()}, {"pde_residual", detail::stats_json(pde)}});
    }
    json manifest = {{"command", "superpose"},
                     {"case", to_int(lat.cfg.id)},
                     {"tau", lat.cfg.tau},
                     {"seed", {{"id", 0}, {"label", "seed"}, {"name", seed_name}, {"equation", lat.nodes[0].equation.name()}}},
                     {"phis", lat.phis},
                     {"depth", depth},
                     {"grid", cfg.grid},
                     {"nodes", nodes}};
    detail::write_json(fs::path(cfg.out) / "manifest.json", manifest);
    res.report = manifest;
    ok = detail::check(res.report, "pde_residual", worst, cfg.tol_pde);
    res.exit = ok ? kOk : kToleranceViolated;
    res.summary = "superpose: " + std::to_string(lat.nodes.size() - 1) + " nodes, manifest " +
                  (fs::path(cfg.out) / "manifest.json").string();
    return res;
}

inline CommandResult cmd_surface(const RunConfig& cfg) {
    const Grid grid = parse_grid(cfg.grid);
    BuiltinName which;
    if (cfg.surface == "TimelikeK1") which = BuiltinName::TimelikeK1;
    else if (cfg.surface == "TimelikeKminus1") which = BuiltinName::TimelikeKminus1;
    else throw Error(ErrorKind::UnknownSpec, "unknown surface '" + cfg.surface + "'");
    const BuiltinSurface b = builtin_surface(which, grid);
    const double target = b.cfg.delta;

    // The K=+1 surface is paired with the first kink of a zero-seed lattice
    // (phi = pi/2); the K=-1 surface with the seed of an example-4 lattice.
    RunConfig lc = cfg;
    lc.case_id = to_int(b.cfg.id);
    lc.tau = b.cfg.tau;
    std::vector<double> phis = cfg.phis;
    std::string seed_name = "example4";
    std::size_t offset = 0;
    if (which == BuiltinName::TimelikeK1) {
        phis.insert(phis.begin(), std::numbers::pi / 2);
        seed_name = "zero";
        offset = 1;
        if (!lc.consts.empty()) lc.consts.insert(lc.consts.begin(), 0.0);
    }
    lc.seed = seed_name;

    std::vector<SurfaceMesh> meshes{b.mesh};
    std::vector<std::string> names{which == BuiltinName::TimelikeK1 ? "X_1" : "X"};
    CommandResult res;
    json& rep = res.report;
    rep = {{"command", "surface"}, {"surface", cfg.surface}, {"expected_curvature", target}};
    json steps = json::array();
    bool ok = true;
    auto curvature_entry = [&](const SurfaceMesh& m) {
        const ScalarField K = numerical_curvature(m, cfg.metric_guard);
        const FieldStats dev = stats(difference(K, ScalarField(K.grid, target)));
        double sum = 0.0;
        for (std::size_t k = 0; k < K.values.size(); ++k) sum += K.valid[k] ? K.values[k] : 0.0;
        const double mean = dev.count ? sum / static_cast<double>(dev.count) : 0.0;
        return std::pair{json{{"mean", mean}, {"max_deviation", dev.max_abs}, {"nodes", dev.count}}, dev.max_abs};
    };
    auto [k0, dev0] = curvature_entry(b.mesh);
    rep["input"] = {{"curvature", k0}, {"index", detect_index(b.mesh)}};
    ok = detail::check(rep, "curvature_" + names.front(), dev0, cfg.tol_k) && ok;

    if (phis.size() > offset) {
        const Lattice lat = detail::build_lattice(lc, grid, phis, static_cast<int>(phis.size()), seed_name);
        for (std::size_t k = offset; k < phis.size(); ++k) {
            const ScalarField& source = (k == 0) ? lat.nodes[0].field : lat.at(0, k - 1).field;
            const ScalarField& target_alpha = lat.at(0, k).field;
            const int level = static_cast<int>(k);  // level of the source node
            const CaseConfig t = level % 2 == 0 ? lat.cfg : partner_case(lat.cfg);
            const BTSystem sys = make_bt_system(t, phis[k]);
            const SurfaceMesh& from = meshes.back();
            const double guard = from.has_tangents() ? 1e-10 : cfg.transform_guard;
            SurfaceMesh next = transform_surface(from, source, target_alpha, sys, guard);
            const CongruenceReport cr = congruence_check(from, next, sys, cfg.metric_guard);
            auto [kj, devj] = curvature_entry(next);
            std::string name = "X_";
            for (std::size_t q = 0; q <= k; ++q) name += std::to_string(q + 1);
            ok = detail::check(rep, "curvature_" + name, devj, cfg.tol_k) && ok;
            steps.push_back({{"name", name},
                             {"phi", phis[k]},
                             {"case", to_int(t.id)},
                             {"curvature", kj},
                             {"detected_index", detect_index(next)},
                             {"predicted_index", predicted_index(t)},
                             {"congruence",
                              {{"nodes", cr.nodes},
                               {"max_length_dev", cr.max_length_dev},
                               {"max_normal_dev", cr.max_normal_dev},
                               {"max_tangency", cr.max_tangency},
                               {"causal_ok", cr.causal_ok},
                               {"max_scaled", std::max({cr.max_length_scaled, cr.max_normal_scaled,
                                                        cr.max_tangency_scaled})}}}});
            meshes.push_back(std::move(next));
            names.push_back(name);
        }
    }
    rep["steps"] = steps;
    json files = json::array();
    for (std::size_t m = 0; m < meshes.size(); ++m) {
        const fs::path obj = fs::path(cfg.out) / (names[m] + ".obj");
        save_obj(obj, meshes[m]);
        files.push_back(obj.string());
        if (cfg.ply) {
            const fs::path ply = fs::path(cfg.out) / (names[m] + ".ply");
            save_ply(ply, meshes[m]);
            files.push_back(ply.string());
        }
    }
    rep["files"] = files;
    detail::write_json(fs::path(cfg.out) / "surface_report.json", rep);
    res.exit = ok ? kOk : kToleranceViolated;
    res.summary = "surface " + cfg.surface + ": " + std::to_string(meshes.size()) + " mesh(es) written";
    return res;
}

/// Quick self-check on coarse grids; each line is one verified identity.
inline CommandResult cmd_verify(const RunConfig& cfg) {
    CommandResult res;
    json& rep = res.report;
    rep = {{"command", "verify"}};
    bool all = true;
    auto record = [&](const std::string& name, double value, double tol) {
        const bool ok = std::isfinite(value) && value <= tol;
        rep["checks"][name] = {{"value", value}, {"tolerance", tol}, {"pass", ok}};
        all = all && ok;
    };
    const double tol_pde = cfg.tol_pde.value_or(1e-10);
    const double tol_bt = cfg.tol_bt.value_or(1e-6);

    double lambda_dev = 0.0, kink_pde = 0.0, kink_bt = 0.0, integ = 0.0;
    for (int id = 1; id <= 6; ++id) {
        const CaseConfig c = case_from_id(id, id % 2 == 0 ? -1 : 1);
        const double phi = (id == 1 || id == 4) ? 1.0 : 0.6;
        lambda_dev = std::max(lambda_dev, std::abs(lambda_relation(c, congruence_params(c, phi)) - 1.0));
        const double shift = c.r == 1 ? -5.0 : 0.0;
        const AnalyticSolution k = kink_seed(c, phi, shift);
        const Grid g = Grid::square(-1, 1, 0.02);
        kink_pde = std::max(kink_pde, stats(pde_residual(k, c, 1, g)).max_abs);
        const BTSystem sys = make_bt_system(c, phi);
        kink_bt = std::max(kink_bt, bt_residual(sys, zero_seed(), k, g).max_abs());
        const ScalarField ap = integrate_bt(sys, zero_seed(), g, {0, 0}, k(0, 0));
        integ = std::max(integ, stats(difference(ap, sample(k, g))).max_abs);
    }
    record("lambda_relation", lambda_dev, 1e-12);
    record("kink_pde_exact", kink_pde, tol_pde);
    record("kink_bt_exact", kink_bt, tol_pde);
    record("integrate_vs_kink", integ, tol_bt);

    {
        const Grid g = Grid::square(-1.5, 1.5, 0.02);
        IntegrateOptions opt;
        opt.substeps = 4;
        const ScalarField a1 = integrate_bt(make_bt_system(case_from_id(6, 1), 0.0),
                                            example_solution({SeedKind::Example4Alpha}), g, {0, 0}, 0.0, opt);
        ScalarField diff = difference(a1, sample(example_solution({SeedKind::Example4Alpha1}), g));
        for (std::size_t i = 0; i < g.x1.n; ++i) {
            for (std::size_t j = 0; j < g.x2.n; ++j) {
                if (std::abs(g.x2.at(j)) > std::cosh(g.x1.at(i)) - 0.1) diff.valid[g.index(i, j)] = 0;
            }
        }
        record("example4_alpha1", stats(diff).max_abs, tol_bt);
    }
    {
        std::mt19937_64 rng(20240607);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const auto e = elliptic_structure_constants(u(rng), u(rng), k % 2 ? 1 : -1);
            worst = std::max(worst, std::abs(e.B * e.B - e.L * e.L - e.A * e.A) / std::max(1.0, e.B * e.B));
        }
        record("elliptic_constants", worst, 1e-12);
    }
    {
        const CaseConfig c = case_from_id(4, -1);
        const Grid g{Axis::span(-4, -1.5, 0.02), Axis::span(-1, 1, 0.02)};
        const ScalarField z = sample(zero_seed(), g);
        const ScalarField a1 = sample(kink_seed(c, std::numbers::pi / 2, -1.0), g);
        const ScalarField a2 = sample(kink_seed(c, std::numbers::pi / 3, -1.0), g);
        const ScalarField a12 = superpose({c, z, a1, a2, std::numbers::pi / 2, std::numbers::pi / 3});
        const double r1 = bt_residual(make_bt_system(c, std::numbers::pi / 3), a1, a12).max_abs();
        const double r2 = bt_residual(make_bt_system(c, std::numbers::pi / 2), a2, a12).max_abs();
        record("example2_association", std::max(r1, r2), 1e-3);
    }
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    detail::write_json(fs::path(cfg.out) / "verify_report.json", rep);
    res.exit = all ? kOk : kToleranceViolated;
    res.summary = all ? "verify: all checks passed" : "verify: some checks failed";
    return res;
}

/// Parses argv, merges the optional JSON config (flags win) and runs the subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Backlund transformations, superposition lattices and constant-curvature surfaces"};
    app.require_subcommand(1);
    RunConfig flags;
    std::string config_path;
    std::vector<double> p0;
    std::map<std::string, CLI::Option*> opts;

    auto add_common = [&](CLI::App* sub) {
        opts["case-delta"] = sub->add_option("--case-delta", flags.delta, "delta (+1/-1)");
        opts["case-epsilon"] = sub->add_option("--case-epsilon", flags.epsilon, "epsilon (+1/-1)");
        opts["case-r"] = sub->add_option("--case-r", flags.r, "index r (0/1)");
        opts["case-s"] = sub->add_option("--case-s", flags.s, "signature s (0/1)");
        opts["case"] = sub->add_option("--case", flags.case_id, "case number 1..6 (overrides the tuple)");
        opts["tau"] = sub->add_option("--tau", flags.tau, "orientation (+1/-1)");
        opts["grid"] = sub->add_option("--grid", flags.grid, "min:max:h,min:max:h");
        opts["phi"] = sub->add_option("--phi", flags.phis, "angle parameter (repeatable)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        opts["seed"] = sub->add_option("--seed", flags.seed, "zero|kink|example2|example4|example4-alpha1|example4-alpha2");
        opts["c"] = sub->add_option("--c", flags.consts, "integration constant (repeatable)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        opts["out"] = sub->add_option("--out", flags.out, "output directory");
        opts["tol-pde"] = sub->add_option("--tol-pde", flags.tol_pde, "max PDE residual");
        opts["tol-bt"] = sub->add_option("--tol-bt", flags.tol_bt, "max BT residual");
        opts["tol-k"] = sub->add_option("--tol-k", flags.tol_k, "max curvature deviation");
        opts["guard"] = sub->add_option("--guard", flags.guard, "singularity guard");
        opts["p0"] = sub->add_option("--p0", p0, "initial point x1 x2")->expected(2);
        opts["alpha0"] = sub->add_option("--alpha0", flags.alpha0, "initial value of the transform at p0");
        opts["perturb"] = sub->add_option("--perturb", flags.perturb, "constant added to the seed before the residual check");
        opts["substeps"] = sub->add_option("--substeps", flags.substeps, "RK4 substeps per grid step");
        opts["depth"] = sub->add_option("--depth", flags.depth, "lattice depth (default: all phis)");
        opts["level1"] = sub->add_option("--level1", flags.level1, "auto|kinks|example4|integrate");
        opts["surface"] = sub->add_option("--surface", flags.surface, "TimelikeK1|TimelikeKminus1");
        opts["transform-guard"] = sub->add_option("--transform-guard", flags.transform_guard, "mask for differenced tangents");
        opts["metric-guard"] = sub->add_option("--metric-guard", flags.metric_guard, "min |EG-F^2| in reports");
        opts["ply"] = sub->add_flag("--ply", flags.ply, "also write PLY meshes");
        sub->add_option("--config", config_path, "JSON config file; flags override it");
    };
    const std::vector<std::pair<std::string, std::string>> names = {
        {"seed", "sample a named seed to CSV"},
        {"transform", "integrate a Backlund transformation and report residuals"},
        {"superpose", "build a superposition lattice with a manifest"},
        {"surface", "build a surface and its transforms, export meshes"},
        {"verify", "run the built-in identity checks"}};
    std::map<std::string, CLI::App*> subs;
    std::map<std::string, std::map<std::string, CLI::Option*>> sub_opts;
    for (const auto& [n, d] : names) {
        subs[n] = app.add_subcommand(n, d);
        opts.clear();
        add_common(subs[n]);
        sub_opts[n] = opts;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidConfig;
    }
    std::string chosen;
    for (auto& [n, sub] : subs) {
        if (sub->parsed()) chosen = n;
    }
    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        const auto& given = sub_opts[chosen];
        auto set = [&](const char* key, auto& field, const auto& value) {
            if (given.at(key)->count() > 0) field = value;
        };
        set("case-delta", cfg.delta, flags.delta);
        set("case-epsilon", cfg.epsilon, flags.epsilon);
        set("case-r", cfg.r, flags.r);
        set("case-s", cfg.s, flags.s);
        set("case", cfg.case_id, flags.case_id);
        set("tau", cfg.tau, flags.tau);
        set("grid", cfg.grid, flags.grid);
        set("phi", cfg.phis, flags.phis);
        set("seed", cfg.seed, flags.seed);
        set("c", cfg.consts, flags.consts);
        set("out", cfg.out, flags.out);
        set("tol-pde", cfg.tol_pde, flags.tol_pde);
        set("tol-bt", cfg.tol_bt, flags.tol_bt);
        set("tol-k", cfg.tol_k, flags.tol_k);
        set("guard", cfg.guard, flags.guard);
        if (given.at("p0")->count() > 0) {
            cfg.p0_x1 = p0.at(0);
            cfg.p0_x2 = p0.at(1);
        }
        set("alpha0", cfg.alpha0, flags.alpha0);
        set("perturb", cfg.perturb, flags.perturb);
        set("substeps", cfg.substeps, flags.substeps);
        set("depth", cfg.depth, flags.depth);
        set("level1", cfg.level1, flags.level1);
        set("surface", cfg.surface, flags.surface);
        set("transform-guard", cfg.transform_guard, flags.transform_guard);
        set("metric-guard", cfg.metric_guard, flags.metric_guard);
        set("ply", cfg.ply, flags.ply);
        const CaseConfig checked = cfg.case_config();
        if (chosen != "surface" && chosen != "verify") {
            for (double phi : cfg.phis) (void)congruence_params(checked, phi);
        }

        CommandResult res;
        if (chosen == "seed") res = cmd_seed(cfg);
        else if (chosen == "transform") res = cmd_transform(cfg);
        else if (chosen == "superpose") res = cmd_superpose(cfg);
        else if (chosen == "surface") res = cmd_surface(cfg);
        else res = cmd_verify(cfg);
        if (chosen == "transform") detail::write_json(fs::path(cfg.out) / "transform_report.json", res.report);
        if (chosen == "seed") detail::write_json(fs::path(cfg.out) / "seed_report.json", res.report);
        if (chosen == "verify") {
            for (const auto& [name, c] : res.report["checks"].items()) {
                out << (c["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << name << " = " << c["value"].dump() << '\n';
            }
        }
        out << res.summary << '\n';
        return res.exit;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Io ? kIoError : kInvalidConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    }
}

}  // namespace blc::cli
