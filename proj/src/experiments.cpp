#include "toricgap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <cstdio>
#include <regex>
#include <set>
#include <sstream>

#include "toricgap/cluster.hpp"
#include "toricgap/error.hpp"
#include "toricgap/sectors.hpp"
#include "toricgap/spectral.hpp"

namespace toricgap {

using nlohmann::json;

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

namespace {

std::string fmt(int x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(std::uint64_t x, bool) { return std::to_string(x); }
using toricgap::fmt;

[[noreturn]] void config_error(const std::string &what) { fail(ErrorKind::Config, what); }

void check_keys(const json &j, const std::string &where, const std::set<std::string> &allowed) {
    if (!j.is_object()) config_error(where + " must be an object");
    for (const auto &item : j.items())
        if (!allowed.count(item.key())) config_error("unknown key '" + item.key() + "' in " + where);
}

int get_int(const json &j, const std::string &key, const std::string &where) {
    const auto &v = j.at(key);
    if (!v.is_number_integer()) config_error(where + "." + key + " must be an integer");
    return v.get<int>();
}

double get_double(const json &j, const std::string &key, const std::string &where) {
    const auto &v = j.at(key);
    if (!v.is_number()) config_error(where + "." + key + " must be a number");
    return v.get<double>();
}

std::string get_string(const json &j, const std::string &key, const std::string &where) {
    const auto &v = j.at(key);
    if (!v.is_string()) config_error(where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::string sector_name(int sigma, int mu) { return std::string(sigma > 0 ? "+" : "-") + (mu > 0 ? "+" : "-"); }

SolverOptions solver_options(const RunConfig &c) {
    SolverOptions o;
    o.k = c.k;
    o.tol = c.tol;
    o.seed = c.seed;
    return o;
}

Lattice lattice_of(const RunConfig &c) { return Lattice::build(c.topology, c.l1, c.l2); }

std::pair<int, int> sector_signs(const Lattice &lat, const std::string &text) {
    if (text.empty()) return {1, 1};
    const SectorLabel l = parse_sector_label(lat, text);
    require(l.syndrome.none(), ErrorKind::Domain, "expansion sectors carry no x-particles");
    return {l.sigma, l.mu};
}

// ---------------------------------------------------------------- spectrum

Report run_spectrum(const RunConfig &c) {
    const Lattice lat = lattice_of(c);
    const SolverOptions opt = solver_options(c);
    std::vector<SpectrumReport> reps;
    std::string scope;
    if (!c.sector.empty()) {
        const SectorLabel label = parse_sector_label(lat, c.sector);
        const SectorBasis basis = enumerate_sector(lat, label);
        ReducedOperator op(build_perturbed(lat, c.perturbation), basis.basis, c.workers);
        SpectrumReport r = lowest_eigenvalues(op, opt);
        r.label = label.to_string();
        reps.push_back(std::move(r));
        scope = "sector";
    } else if (c.perturbation.z_only(static_cast<std::size_t>(lat.num_edges()))) {
        reps = sector_energies(lat, c.perturbation, opt, {}, c.workers);
        scope = "x-free sectors";
    } else {
        require(static_cast<std::size_t>(lat.num_edges()) <= kMaxFullSites, ErrorKind::Capacity,
                "full-space spectra are limited to 26 edges");
        ReducedOperator op(build_perturbed(lat, c.perturbation), c.workers);
        SpectrumReport r = lowest_eigenvalues(op, opt);
        r.label = "full";
        reps.push_back(std::move(r));
        scope = "full space";
    }

    Report rep;
    Table spec{"spectrum", {"sector", "index", "eigenvalue", "residual"}, {}};
    Table mult{"multiplets", {"sector", "value", "multiplicity"}, {}};
    std::vector<double> all;
    json sectors = json::array();
    for (const auto &r : reps) {
        for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
            spec.rows.push_back({r.label, fmt(i), fmt(r.eigenvalues[i]), fmt(r.residuals[i])});
            all.push_back(r.eigenvalues[i]);
        }
        for (const auto &m : r.multiplets) mult.rows.push_back({r.label, fmt(m.value), fmt(m.multiplicity)});
        sectors.push_back({{"sector", r.label},
                           {"dim", r.dim},
                           {"ground", fmt(r.ground)},
                           {"gap", fmt(r.gap)},
                           {"method", r.method},
                           {"iterations", r.iterations},
                           {"restarts", r.restarts}});
    }
    std::sort(all.begin(), all.end());
    const auto groups = cluster_multiplets(all, 10 * c.tol);
    rep.summary = {{"scope", scope},
                   {"ground", fmt(groups.front().value)},
                   {"degeneracy", groups.front().multiplicity},
                   {"gap", fmt(groups.size() > 1 ? groups[1].value - groups[0].value : std::nan(""))},
                   {"sectors", sectors}};
    rep.tables = {spec, mult};
    return rep;
}

// ---------------------------------------------------------------- splitting

Report run_splitting(const RunConfig &c) {
    require(!c.sizes.empty(), ErrorKind::Config, "splitting needs at least one size");
    const SplittingReport s = splitting_scan(c.perturbation, c.sizes, solver_options(c), c.workers);
    Report rep;
    Table t{"splitting", {"l1", "l2", "e_pp", "e_pm", "e_mp", "e_mm", "delta"}, {}};
    for (const auto &r : s.rows) {
        std::vector<std::string> row{fmt(r.l1), fmt(r.l2)};
        for (std::size_t k = 0; k < 4; ++k) row.push_back(k < r.energies.size() ? fmt(r.energies[k]) : "nan");
        row.push_back(fmt(r.delta));
        t.rows.push_back(row);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < s.rows.size(); ++i)
        if (!(s.rows[i].delta < s.rows[i - 1].delta)) decreasing = false;
    rep.summary = {{"beta", fmt(s.beta)},
                   {"kappa", fmt(s.kappa)},
                   {"intercept", fmt(s.intercept)},
                   {"fit_residual", fmt(s.fit_residual)},
                   {"flag", s.flag},
                   {"strictly_decreasing", decreasing}};
    rep.tables = {t};
    return rep;
}

// ---------------------------------------------------------------- thin torus

Report run_thin_torus(const RunConfig &c) {
    const int L1 = c.l1;
    require(c.topology == Topology::Torus, ErrorKind::Domain, "thin-torus runs on the torus");
    const Lattice lat = Lattice::build(Topology::Torus, 2 * L1, c.l2);
    SolverOptions opt = solver_options(c);
    opt.k = 1;
    opt.tol = std::min(opt.tol, kTolStabilizer);

    Report rep;
    Table eig{"eigenvalues", {"hamiltonian", "sector", "energy", "residual"}, {}};
    const auto split = sector_energies(build_thin_torus_split(lat), opt, {}, c.workers);
    for (const auto &r : split) eig.rows.push_back({"split", r.label, fmt(r.ground), fmt(r.residuals.front())});
    const HamiltonianSpec gapless = build_thin_torus_gapless(lat);
    const auto gl = sector_energies(gapless, opt, {}, c.workers);
    double worst_ground = 0;
    for (const auto &r : gl) {
        eig.rows.push_back({"gapless", r.label, fmt(r.ground), fmt(r.residuals.front())});
        worst_ground = std::max(worst_ground, std::abs(r.ground + 4.0));
    }

    Table str{"string", {"length", "energy", "residual", "cost"}, {}};
    std::vector<StringState> states;
    for (int len = 1; len < 2 * L1; ++len) states.push_back(string_state(gapless, thin_torus_cut(lat, 0, len), 1, -1));
    const StringState &full = states[static_cast<std::size_t>(L1 - 1)];
    eig.rows.push_back({"gapless-cut", "+-", fmt(full.energy), fmt(full.residual)});
    for (int len = 1; len < 2 * L1; ++len) {
        const auto &s = states[static_cast<std::size_t>(len - 1)];
        str.rows.push_back({fmt(len), fmt(s.energy), fmt(s.residual), fmt(s.energy - full.energy)});
    }
    const double step = states[static_cast<std::size_t>(L1 - 2 >= 0 ? L1 - 2 : L1)].energy - full.energy;

    double split_lo = 1e300, split_hi = -1e300;
    for (const auto &r : split) {
        split_lo = std::min(split_lo, r.ground);
        split_hi = std::max(split_hi, r.ground);
    }
    const bool ok = worst_ground < 1e-10 && std::abs(full.energy + 6.0) < 1e-10 && full.residual < 1e-10 &&
                    std::abs(step - 4.0 / L1) < 1e-10;
    if (!ok) fail(ErrorKind::Convergence, "thin-torus eigenvalue checks failed");
    rep.summary = {{"L1", L1},
                   {"l1", 2 * L1},
                   {"l2", c.l2},
                   {"split_min", fmt(split_lo)},
                   {"split_max", fmt(split_hi)},
                   {"gapless_ground_max_error", fmt(worst_ground)},
                   {"cut_energy", fmt(full.energy)},
                   {"cut_residual", fmt(full.residual)},
                   {"step_cost", fmt(step)},
                   {"expected_step_cost", fmt(4.0 / L1)}};
    rep.tables = {eig, str};
    return rep;
}

// ---------------------------------------------------------------- cluster energy

Report run_cluster_energy(const RunConfig &c) {
    const Lattice lat = lattice_of(c);
    const auto [sigma, mu] = sector_signs(lat, c.sector);
    require(c.ledger_volume <= c.max_volume, ErrorKind::Config, "ledger_volume exceeds max_volume");
    const WeightEngine eng(ExpansionModel::charge_sector(lat, c.perturbation, sigma, mu));
    const ClusterSeries series = cluster_series(eng, c.max_volume);
    double ed = std::nan("");
    try {
        ed = model_ground_energy(eng.model());
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::Capacity) throw;
    }
    const ClusterEnergy ledger = cluster_energy(eng, c.ledger_volume);

    Report rep;
    Table vol{"volume", {"volume", "omega_sum", "e0", "constant", "abs_error"}, {}};
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int v = 0; v <= c.max_volume; ++v) {
        const double err = std::abs(series.e0_by_volume[static_cast<std::size_t>(v)] - ed);
        if (v >= 1 && !(err <= prev)) monotone = false;
        if (v >= 1) prev = err;
        vol.rows.push_back({fmt(v), fmt(series.omega_by_volume[static_cast<std::size_t>(v)]),
                            fmt(series.e0_by_volume[static_cast<std::size_t>(v)]),
                            fmt(series.constant_by_volume[static_cast<std::size_t>(v)]), fmt(err)});
    }
    Table terms{"ledger", {"id", "volume", "polymers", "length", "omega"}, {}};
    int max_len = 0;
    for (std::size_t i = 0; i < ledger.terms.size(); ++i) {
        const auto &t = ledger.terms[i];
        max_len = std::max(max_len, t.length);
        terms.rows.push_back({fmt(i), fmt(t.volume), fmt(t.elements.size()), fmt(t.length), fmt(t.omega)});
    }
    Table tail{"gap_tail", {"N", "tail"}, {}};
    for (int n = 0; n <= max_len + 1; ++n) tail.rows.push_back({fmt(n), fmt(gap_term_tail(ledger, n))});
    double ledger_gap = 0;
    for (int v = 0; v <= c.ledger_volume; ++v)
        ledger_gap = std::max(ledger_gap, std::abs(ledger.e0_by_volume[static_cast<std::size_t>(v)] -
                                                   series.e0_by_volume[static_cast<std::size_t>(v)]));
    rep.summary = {{"sector", sector_name(sigma, mu)},
                   {"e0", fmt(series.e0)},
                   {"constant", fmt(series.constant)},
                   {"e_exact", fmt(ed)},
                   {"relative_error", fmt(std::abs(series.e0 - ed) / std::abs(ed))},
                   {"monotone", monotone},
                   {"ledger_volume", c.ledger_volume},
                   {"ledger_polymers", ledger.n_polymers},
                   {"ledger_terms", ledger.terms.size()},
                   {"ledger_series_max_difference", fmt(ledger_gap)}};
    rep.tables = {vol, terms, tail};
    return rep;
}

// ---------------------------------------------------------------- counting

Report run_count_clusters(const RunConfig &c) {
    const Lattice lat = lattice_of(c);
    const ClusterCounts cc = count_clusters(lat, c.n, c.max_volume);
    Report rep;
    Table t{"counts", {"volume", "total", "rooted", "nu_power"}, {}};
    for (int l = 1; l <= c.max_volume; ++l)
        t.rows.push_back({fmt(l), fmt(cc.total[static_cast<std::size_t>(l)], true),
                          fmt(cc.rooted[static_cast<std::size_t>(l)], true), fmt(std::pow(cc.nu, l))});
    rep.summary = {{"cells", cc.n_cells},  {"slices", c.n},          {"root", cc.root},
                   {"nu", fmt(cc.nu)},     {"nu_fit", fmt(cc.nu_fit)}, {"bound_holds", cc.bound_holds}};
    rep.tables = {t};
    return rep;
}

// ---------------------------------------------------------------- verify

Report run_verify(const RunConfig &c) {
    static const std::set<std::string> kinds = {"all", "partition", "inclusion-exclusion", "norm-bound", "factorization"};
    require(kinds.count(c.identity) > 0, ErrorKind::Config, "unknown identity '" + c.identity + "'");
    const bool all = c.identity == "all";
    const Lattice lat = lattice_of(c);
    Report rep;
    Table res{"residuals", {"check", "instance", "value", "threshold", "pass"}, {}};
    bool pass = true;
    auto row = [&](const std::string &check, const std::string &inst, double value, double thr) {
        const bool ok = value < thr;
        pass = pass && ok;
        res.rows.push_back({check, inst, fmt(value), fmt(thr), ok ? "1" : "0"});
    };
    if (all || c.identity == "partition") {
        const DenseExpansion d = DenseExpansion::toric_code(lat, c.perturbation);
        row("partition", "I={}", verify_partition_of_identity(d, 0), 1e-12);
        for (std::size_t i = 0; i < std::min<std::size_t>(d.v.size(), 2); ++i)
            row("partition", "I={" + fmt(i) + "}", verify_partition_of_identity(d, std::uint64_t{1} << i), 1e-12);
    }
    if (all || c.identity == "inclusion-exclusion") {
        std::vector<int> edges;
        for (int i = 0; i < c.sites; ++i) edges.push_back(i);
        const DenseExpansion d = DenseExpansion::toric_code(lat, c.perturbation, edges);
        row("inclusion-exclusion", "sites=" + fmt(c.sites), verify_inclusion_exclusion(d), 1e-8);
        const DenseExpansion toy = DenseExpansion::from_model(ExpansionModel::single_site(c.perturbation.beta));
        row("inclusion-exclusion", "single-site", verify_inclusion_exclusion(toy), 1e-12);
    }
    json extra = json::object();
    if (all || c.identity == "norm-bound") {
        const WeightEngine eng(ExpansionModel::charge_sector(lat, c.perturbation));
        const NormBoundReport nb = verify_norm_bound(eng, c.perturbation.beta, c.samples, c.seed);
        Table t{"norm_bound", {"I", "J", "norm", "bound"}, {}};
        for (const auto &s : nb.samples)
            t.rows.push_back({fmt(s.I, true), fmt(s.J, true), fmt(s.norm), fmt(s.bound)});
        rep.tables.push_back(t);
        row("norm-bound", "max norm/bound", nb.max_ratio, 1.0 + 1e-12);
        extra["c_hat"] = fmt(nb.c_hat);
    }
    if (all || c.identity == "factorization") {
        const WeightEngine eng(ExpansionModel::charge_sector(lat, c.perturbation));
        const auto polys = enumerate_polymers(eng, std::min(c.max_volume, 4));
        const FactorizationReport f = verify_factorization(eng, polys, c.samples, c.seed);
        row("factorization", "pairs=" + fmt(f.pairs), f.max_residual, 1e-10);
        row("empty-weight", "omega({})", std::abs(eng.weight(Configuration{}) - 1.0), 1e-300);
    }
    rep.tables.insert(rep.tables.begin(), res);
    rep.summary = {{"all_pass", pass}};
    rep.summary.update(extra);
    return rep;
}

// ---------------------------------------------------------------- excitation gap

Report run_excitation_gap(const RunConfig &c) {
    const Lattice lat = lattice_of(c);
    BitVec syn(static_cast<std::size_t>(lat.num_faces()));
    for (int f : c.syndrome) {
        require(f >= 0 && f < lat.num_faces(), ErrorKind::Config, "syndrome face out of range");
        syn.flip(static_cast<std::size_t>(f));
    }
    const ExcitationGap g = excitation_gap(lat, c.perturbation, syn, solver_options(c), c.workers);
    Report rep;
    Table t{"gap", {"quantity", "value"}, {}};
    t.rows = {{"e_ground", fmt(g.e_ground)}, {"e_excited", fmt(g.e_excited)}, {"gap", fmt(g.gap)}, {"n_x", fmt(g.n_x)}};
    rep.summary = {{"gap", fmt(g.gap)}, {"n_x", g.n_x}, {"per_particle", fmt(g.n_x > 0 ? g.gap / g.n_x : std::nan(""))}};
    // X_C identity for a single-edge string between two adjacent syndrome faces.
    if (c.syndrome.size() == 2 && lat.num_edges() <= 12) {
        for (int e = 0; e < lat.num_edges(); ++e) {
            auto faces = lat.faces_of_edge(e);
            std::sort(faces.begin(), faces.end());
            std::vector<int> want{c.syndrome[0], c.syndrome[1]};
            std::sort(want.begin(), want.end());
            if (faces == want) {
                EdgeSet cut = lat.empty_set();
                cut.set(static_cast<std::size_t>(e));
                const double r = xc_identity_residual(build_perturbed(lat, c.perturbation), cut, c.n);
                t.rows.push_back({"xc_identity_residual", fmt(r)});
                rep.summary["xc_identity_residual"] = fmt(r);
                break;
            }
        }
    }
    rep.tables = {t};
    return rep;
}

}  // namespace

// ---------------------------------------------------------------- config

std::vector<std::pair<int, int>> parse_sizes(const std::string &text) {
    std::vector<std::pair<int, int>> out;
    static const std::regex item(R"(^\s*(\d+)x(\d+)\s*$)");
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::smatch m;
        if (!std::regex_match(tok, m, item)) config_error("malformed size '" + tok + "' (expected L1xL2)");
        out.emplace_back(std::stoi(m[1]), std::stoi(m[2]));
    }
    if (out.empty()) config_error("empty size list");
    return out;
}

RunConfig parse_config(const json &j) {
    RunConfig c;
    try {
        check_keys(j, "config",
                   {"command", "lattice", "perturbation", "solver", "expansion", "sizes", "identity", "syndrome",
                    "workers", "output"});
        if (!j.contains("command")) config_error("missing command");
        c.command = get_string(j, "command", "config");
        if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
            config_error("unknown command '" + c.command + "'");

        if (j.contains("lattice")) {
            const auto &l = j["lattice"];
            check_keys(l, "lattice", {"topology", "l1", "l2"});
            if (l.contains("topology")) {
                try {
                    c.topology = parse_topology(get_string(l, "topology", "lattice"));
                } catch (const Error &e) {
                    config_error(e.what());
                }
            }
            if (l.contains("l1")) c.l1 = get_int(l, "l1", "lattice");
            if (l.contains("l2")) c.l2 = get_int(l, "l2", "lattice");
        }
        if (j.contains("perturbation")) {
            const auto &p = j["perturbation"];
            check_keys(p, "perturbation", {"kind", "beta", "terms"});
            if (p.contains("kind")) {
                try {
                    c.perturbation.kind = parse_perturbation_kind(get_string(p, "kind", "perturbation"));
                } catch (const Error &e) {
                    config_error(e.what());
                }
            }
            if (p.contains("beta")) c.perturbation.beta = get_double(p, "beta", "perturbation");
            if (p.contains("terms")) {
                if (!p["terms"].is_array()) config_error("perturbation.terms must be an array");
                for (const auto &t : p["terms"]) {
                    check_keys(t, "perturbation.terms[]", {"coefficient", "pauli"});
                    if (!t.contains("coefficient") || !t.contains("pauli")) config_error("term needs coefficient and pauli");
                    c.perturbation.terms.push_back({get_double(t, "coefficient", "term"), get_string(t, "pauli", "term")});
                }
            }
            if (c.perturbation.kind == PerturbationKind::Custom && c.perturbation.terms.empty())
                config_error("custom perturbation needs terms");
            if (c.perturbation.kind != PerturbationKind::Custom && !c.perturbation.terms.empty())
                config_error("terms are only accepted for the custom kind");
        }
        if (j.contains("solver")) {
            const auto &s = j["solver"];
            check_keys(s, "solver", {"k", "tol", "seed", "sector"});
            if (s.contains("k")) c.k = get_int(s, "k", "solver");
            if (s.contains("tol")) c.tol = get_double(s, "tol", "solver");
            if (s.contains("seed")) {
                if (!s["seed"].is_number_unsigned() && !s["seed"].is_number_integer()) config_error("solver.seed must be an integer");
                const auto v = s["seed"].get<long long>();
                if (v < 0) config_error("solver.seed must be non-negative");
                c.seed = static_cast<std::uint64_t>(v);
            }
            if (s.contains("sector")) c.sector = get_string(s, "sector", "solver");
        }
        if (j.contains("expansion")) {
            const auto &e = j["expansion"];
            check_keys(e, "expansion", {"N", "max_volume", "ledger_volume", "samples", "sites"});
            if (e.contains("N")) c.n = get_int(e, "N", "expansion");
            if (e.contains("max_volume")) c.max_volume = get_int(e, "max_volume", "expansion");
            if (e.contains("ledger_volume")) c.ledger_volume = get_int(e, "ledger_volume", "expansion");
            else c.ledger_volume = std::min(c.ledger_volume, c.max_volume);
            if (e.contains("samples")) c.samples = get_int(e, "samples", "expansion");
            if (e.contains("sites")) c.sites = get_int(e, "sites", "expansion");
        }
        if (j.contains("sizes")) {
            const auto &s = j["sizes"];
            if (s.is_string()) {
                c.sizes = parse_sizes(s.get<std::string>());
            } else if (s.is_array()) {
                for (const auto &x : s) {
                    if (!x.is_string()) config_error("sizes entries must be strings like \"3x3\"");
                    auto one = parse_sizes(x.get<std::string>());
                    c.sizes.insert(c.sizes.end(), one.begin(), one.end());
                }
            } else {
                config_error("sizes must be a string or an array");
            }
        }
        if (j.contains("identity")) c.identity = get_string(j, "identity", "config");
        if (j.contains("syndrome")) {
            if (!j["syndrome"].is_array()) config_error("syndrome must be an array of face indices");
            c.syndrome.clear();
            for (const auto &f : j["syndrome"]) {
                if (!f.is_number_integer()) config_error("syndrome entries must be integers");
                c.syndrome.push_back(f.get<int>());
            }
        }
        if (j.contains("workers")) c.workers = get_int(j, "workers", "config");
        if (j.contains("output")) {
            const auto &o = j["output"];
            check_keys(o, "output", {"path", "format"});
            if (o.contains("path")) c.output_path = get_string(o, "path", "output");
            if (o.contains("format")) c.output_format = get_string(o, "format", "output");
        }
    } catch (const json::exception &e) {
        config_error(std::string("malformed config: ") + e.what());
    }

    if (c.k < 1) config_error("solver.k must be positive");
    if (!(c.tol > 0)) config_error("solver.tol must be positive");
    if (c.n < 0) config_error("expansion.N must be non-negative");
    if (c.max_volume < 0 || c.ledger_volume < 0) config_error("volumes must be non-negative");
    if (c.samples < 1) config_error("expansion.samples must be positive");
    if (c.sites < 0) config_error("expansion.sites must be non-negative");
    if (c.workers < 1) config_error("workers must be positive");
    if (!std::isfinite(c.perturbation.beta)) config_error("beta must be finite");
    if (c.output_format != "csv" && c.output_format != "json" && c.output_format != "both")
        config_error("output.format must be csv, json or both");
    if (c.identity != "all" && c.identity != "partition" && c.identity != "inclusion-exclusion" &&
        c.identity != "norm-bound" && c.identity != "factorization")
        config_error("unknown identity '" + c.identity + "'");
    if (c.syndrome.size() % 2 != 0) config_error("syndrome needs an even number of faces");
    if (!c.sector.empty()) {
        try {
            const Lattice lat = Lattice::build(c.topology, c.l1, c.l2);
            parse_sector_label(lat, c.sector);
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::Sizing) config_error(e.what());
        }
    }
    return c;
}

json to_json(const RunConfig &c) {
    json terms = json::array();
    for (const auto &t : c.perturbation.terms) terms.push_back({{"coefficient", t.coefficient}, {"pauli", t.pauli}});
    json sizes = json::array();
    for (const auto &[a, b] : c.sizes) sizes.push_back(std::to_string(a) + "x" + std::to_string(b));
    return {{"command", c.command},
            {"lattice", {{"topology", to_string(c.topology)}, {"l1", c.l1}, {"l2", c.l2}}},
            {"perturbation", {{"kind", to_string(c.perturbation.kind)}, {"beta", c.perturbation.beta}, {"terms", terms}}},
            {"solver", {{"k", c.k}, {"tol", c.tol}, {"seed", c.seed}, {"sector", c.sector}}},
            {"expansion",
             {{"N", c.n}, {"max_volume", c.max_volume}, {"ledger_volume", c.ledger_volume}, {"samples", c.samples}, {"sites", c.sites}}},
            {"sizes", sizes},
            {"identity", c.identity},
            {"syndrome", c.syndrome},
            {"workers", c.workers},
            {"output", {{"path", c.output_path}, {"format", c.output_format}}}};
}

std::string Table::to_csv() const {
    std::string out = "# schema=1\n";
    auto line = [&](const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(columns);
    for (const auto &r : rows) line(r);
    return out;
}

json Report::to_json() const {
    json t = json::object();
    for (const auto &tab : tables) t[tab.name] = {{"columns", tab.columns}, {"rows", tab.rows}};
    return {{"summary", summary}, {"tables", t}};
}

Report run(const RunConfig &c) {
    Report r;
    if (c.command == "spectrum")
        r = run_spectrum(c);
    else if (c.command == "splitting")
        r = run_splitting(c);
    else if (c.command == "thin-torus")
        r = run_thin_torus(c);
    else if (c.command == "cluster-energy")
        r = run_cluster_energy(c);
    else if (c.command == "count-clusters")
        r = run_count_clusters(c);
    else if (c.command == "verify")
        r = run_verify(c);
    else if (c.command == "excitation-gap")
        r = run_excitation_gap(c);
    else
        fail(ErrorKind::Config, "unknown command '" + c.command + "'");
    r.summary["config"] = to_json(c);
    return r;
}

}  // namespace toricgap
