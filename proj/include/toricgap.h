#ifndef TORICGAP_H
#define TORICGAP_H

#include <stddef.h>

#if defined(TG_BUILDING_LIBRARY)
#define TG_API __attribute__((visibility("default")))
#else
#define TG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tg_status {
    TG_OK = 0,
    TG_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad index */
    TG_ERR_CONFIG = 2,           /* malformed run configuration */
    TG_ERR_NUMERICAL = 3,        /* solver or propagator missed its tolerance */
    TG_ERR_SIZING = 4,           /* lattice or operator dimensions out of range */
    TG_ERR_SECTOR = 5,           /* infeasible sector or operator leaves it */
    TG_ERR_CAPACITY = 6,         /* problem exceeds a documented cap */
    TG_ERR_INTERNAL = 7,
    TG_ERR_DOMAIN = 8            /* operation undefined for this topology/operator */
} tg_status;

typedef struct tg_lattice tg_lattice;
typedef struct tg_hamiltonian tg_hamiltonian;
typedef struct tg_report tg_report;

TG_API const char *tg_version(void);
/* Message of the last failing call on this thread; "" after success. */
TG_API const char *tg_last_error(void);

/* topology: "torus" or "planar". */
TG_API tg_status tg_lattice_create(const char *topology, int l1, int l2, tg_lattice **out);
TG_API void tg_lattice_destroy(tg_lattice *lat);
TG_API tg_status tg_lattice_num_edges(const tg_lattice *lat, int *out);

/* Unperturbed toric code in projector form (ground energy 0). */
TG_API tg_status tg_hamiltonian_toric_code(const tg_lattice *lat, tg_hamiltonian **out);
/* kind: z-field, z-ising, z-loop-row. */
TG_API tg_status tg_hamiltonian_add_perturbation(tg_hamiltonian *h, const char *kind, double beta);
TG_API void tg_hamiltonian_destroy(tg_hamiltonian *h);
/* 2^(n - rank); fails with TG_ERR_DOMAIN when the terms do not commute. */
TG_API tg_status tg_hamiltonian_ground_degeneracy(const tg_hamiltonian *h, double *out);
/* Lowest eigenvalue in a sector such as "++" or "+-,x-pair@(0,1)". */
TG_API tg_status tg_sector_ground_energy(const tg_hamiltonian *h, const char *sector, double tol, double *out);

/* Runs one subcommand described by a JSON configuration. */
TG_API tg_status tg_run(const char *config_json, tg_report **out);
/* Summary, resolved config and tables as JSON; valid until the report is destroyed. */
TG_API const char *tg_report_json(const tg_report *r);
TG_API size_t tg_report_table_count(const tg_report *r);
/* CSV text and name of table i. */
TG_API tg_status tg_report_table(const tg_report *r, size_t i, const char **name, const char **csv);
TG_API void tg_report_destroy(tg_report *r);

#ifdef __cplusplus
}
#endif

#endif
