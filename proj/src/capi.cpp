#include "toricgap.h"

#include <exception>
#include <new>
#include <string>

#include "toricgap/error.hpp"
#include "toricgap/experiments.hpp"
#include "toricgap/model.hpp"
#include "toricgap/sectors.hpp"
#include "toricgap/spectral.hpp"

using namespace toricgap;

struct tg_lattice {
    Lattice lat;
};

struct tg_hamiltonian {
    HamiltonianSpec h;
};

struct tg_report {
    Report report;
    std::string json;
    std::vector<std::string> csv;
};

namespace {

thread_local std::string last_error;

tg_status status_of(ErrorKind k) {
    switch (k) {
    case ErrorKind::Sizing: return TG_ERR_SIZING;
    case ErrorKind::Domain: return TG_ERR_DOMAIN;
    case ErrorKind::Sector: return TG_ERR_SECTOR;
    case ErrorKind::Convergence: return TG_ERR_NUMERICAL;
    case ErrorKind::Capacity: return TG_ERR_CAPACITY;
    case ErrorKind::Config: return TG_ERR_CONFIG;
    }
    return TG_ERR_INTERNAL;
}

tg_status set_error(tg_status s, const std::string &msg) {
    last_error = msg;
    return s;
}

template <class F>
tg_status guarded(F &&f) {
    try {
        f();
        last_error.clear();
        return TG_OK;
    } catch (const Error &e) {
        return set_error(status_of(e.kind()), e.what());
    } catch (const nlohmann::json::exception &e) {
        return set_error(TG_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc &) {
        return set_error(TG_ERR_CAPACITY, "out of memory");
    } catch (const std::exception &e) {
        return set_error(TG_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(TG_ERR_INTERNAL, "unknown error");
    }
}

#define TG_CHECK_ARG(cond, msg) \
    if (!(cond)) return set_error(TG_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char *tg_version(void) { return "1.0.0"; }

const char *tg_last_error(void) { return last_error.c_str(); }

tg_status tg_lattice_create(const char *topology, int l1, int l2, tg_lattice **out) {
    TG_CHECK_ARG(topology && out, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new tg_lattice{Lattice::build(parse_topology(topology), l1, l2)}; });
}

void tg_lattice_destroy(tg_lattice *lat) { delete lat; }

tg_status tg_lattice_num_edges(const tg_lattice *lat, int *out) {
    TG_CHECK_ARG(lat && out, "null argument");
    *out = lat->lat.num_edges();
    last_error.clear();
    return TG_OK;
}

tg_status tg_hamiltonian_toric_code(const tg_lattice *lat, tg_hamiltonian **out) {
    TG_CHECK_ARG(lat && out, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new tg_hamiltonian{build_toric_code(lat->lat)}; });
}

tg_status tg_hamiltonian_add_perturbation(tg_hamiltonian *h, const char *kind, double beta) {
    TG_CHECK_ARG(h && kind, "null argument");
    return guarded([&] {
        PerturbationSpec p;
        p.kind = parse_perturbation_kind(kind);
        require(p.kind != PerturbationKind::Custom, ErrorKind::Config, "custom perturbations go through tg_run");
        p.beta = beta;
        h->h.add(build_perturbation(h->h.lattice, p));
    });
}

void tg_hamiltonian_destroy(tg_hamiltonian *h) { delete h; }

tg_status tg_hamiltonian_ground_degeneracy(const tg_hamiltonian *h, double *out) {
    TG_CHECK_ARG(h && out, "null argument");
    return guarded([&] { *out = static_cast<double>(ground_degeneracy(h->h)); });
}

tg_status tg_sector_ground_energy(const tg_hamiltonian *h, const char *sector, double tol, double *out) {
    TG_CHECK_ARG(h && sector && out, "null argument");
    TG_CHECK_ARG(tol > 0, "tolerance must be positive");
    return guarded([&] {
        const SectorLabel label = parse_sector_label(h->h.lattice, sector);
        const SectorBasis basis = enumerate_sector(h->h.lattice, label);
        ReducedOperator op(h->h, basis.basis);
        SolverOptions opt;
        opt.tol = tol;
        *out = lowest_eigenvalues(op, opt).ground;
    });
}

tg_status tg_run(const char *config_json, tg_report **out) {
    TG_CHECK_ARG(config_json && out, "null argument");
    *out = nullptr;
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception &e) {
            fail(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
        }
        auto *r = new tg_report;
        try {
            r->report = run(parse_config(j));
            r->json = r->report.to_json().dump(2);
            for (const auto &t : r->report.tables) r->csv.push_back(t.to_csv());
        } catch (...) {
            delete r;
            throw;
        }
        *out = r;
    });
}

const char *tg_report_json(const tg_report *r) { return r ? r->json.c_str() : nullptr; }

size_t tg_report_table_count(const tg_report *r) { return r ? r->report.tables.size() : 0; }

tg_status tg_report_table(const tg_report *r, size_t i, const char **name, const char **csv) {
    TG_CHECK_ARG(r && name && csv, "null argument");
    TG_CHECK_ARG(i < r->report.tables.size(), "table index out of range");
    *name = r->report.tables[i].name.c_str();
    *csv = r->csv[i].c_str();
    last_error.clear();
    return TG_OK;
}

void tg_report_destroy(tg_report *r) { delete r; }

}  // extern "C"
