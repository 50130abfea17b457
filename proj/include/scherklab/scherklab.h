#ifndef SCHERKLAB_H
#define SCHERKLAB_H

/* C interface to the scherklab core. Handles are opaque; every call that can
 * fail returns an sl_status and leaves a message for sl_last_error(). Strings
 * returned through char** belong to the caller and are released with
 * sl_string_free(). */

#include <stddef.h>

#if defined(_WIN32)
#define SL_API __declspec(dllexport)
#else
#define SL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sl_status {
  SL_OK = 0,
  SL_ERR_INVALID_ARGUMENT = 1,
  SL_ERR_PARSE = 2,
  SL_ERR_GEOMETRY = 3,
  SL_ERR_MESH = 4,
  SL_ERR_SOLVER = 5,
  SL_ERR_INTERNAL = 6
} sl_status;

typedef struct sl_domain sl_domain;
typedef struct sl_mesh sl_mesh;
typedef struct sl_field sl_field;

typedef struct sl_solver_config {
  double newton_tol;
  int max_iter;
  int damping;
  int quadrature_order;
  double cap_M;
  double cap_step;
  double c_cap;
  double t_max;
  int steps;
} sl_solver_config;

SL_API const char* sl_version(void);
/* Message of the last failed call on this thread ("" when none). */
SL_API const char* sl_last_error(void);
SL_API void sl_string_free(char* s);
SL_API const char* sl_status_name(sl_status s);

/* Upper bound on worker threads; the core is single threaded, so this only
 * validates and records the value. */
SL_API sl_status sl_set_threads(int n);
SL_API int sl_threads(void);

SL_API void sl_solver_config_default(sl_solver_config* cfg);

/* ---- domains ---- */

/* Domain file: {"H", "vertices", "edge_labels", "horodisk_size"}. */
SL_API sl_status sl_domain_parse(const char* json, sl_domain** out);
SL_API sl_status sl_domain_create(double H, const double* angles, const char* labels, size_t n, double horodisk_size,
                                  sl_domain** out);
SL_API void sl_domain_free(sl_domain* d);
SL_API double sl_domain_H(const sl_domain* d);
SL_API double sl_domain_horodisk_size(const sl_domain* d);
SL_API size_t sl_domain_vertex_count(const sl_domain* d);
SL_API sl_status sl_domain_json(const sl_domain* d, char** out);

/* Solvability check with the domain's horodisk size unless size > 0.
 * verdict is 1 when all conditions hold. */
SL_API sl_status sl_domain_check(const sl_domain* d, double size, double tol, double margin_tol, int* verdict,
                                 char** report_json, char** report_csv);

/* Root of the equality residual over a one-parameter family file. lo < hi
 * overrides the family's param_range. found is 0 without a sign change. */
SL_API sl_status sl_calibrate(const char* family_json, double lo, double hi, int* found, double* param,
                              sl_domain** out, char** report_json);

/* ---- meshes ---- */

/* Truncation at level n >= 1 (horodisk size halved n - 1 times). With by
 * non-null, the geodesic circle (by[0] + i by[1], radius by[2]) is embedded
 * as interface "dBy" around region 1. */
SL_API sl_status sl_mesh_truncated(const sl_domain* d, int level, double target_h, const double* by, sl_mesh** out);
/* Geodesic disk and annulus; radii are hyperbolic. */
SL_API sl_status sl_mesh_disk(double cx, double cy, double radius, double target_h, sl_mesh** out);
SL_API sl_status sl_mesh_annulus(double cx, double cy, double r_in, double r_out, double target_h, sl_mesh** out);
SL_API void sl_mesh_free(sl_mesh* m);
SL_API size_t sl_mesh_node_count(const sl_mesh* m);
SL_API size_t sl_mesh_triangle_count(const sl_mesh* m);
SL_API sl_status sl_mesh_node(const sl_mesh* m, size_t i, double* x, double* y);
/* 1 when node i lies on a boundary edge. */
SL_API int sl_mesh_is_boundary(const sl_mesh* m, size_t i);
SL_API sl_status sl_mesh_json(const sl_mesh* m, char** out);
SL_API sl_status sl_mesh_nodes_csv(const sl_mesh* m, char** out);

/* ---- fields ---- */

SL_API sl_status sl_field_create(const sl_mesh* m, const double* values, size_t n, sl_field** out);
SL_API void sl_field_free(sl_field* f);
SL_API size_t sl_field_size(const sl_field* f);
SL_API sl_status sl_field_values(const sl_field* f, double* out, size_t n);
/* Linear interpolation of src at the nodes of m; fails outside src's mesh. */
SL_API sl_status sl_field_interpolate(const sl_field* src, const sl_mesh* m, sl_field** out);
SL_API sl_status sl_field_csv(const sl_field* f, char** out);
/* Residual norm over the nodes off the mesh boundary. */
SL_API sl_status sl_field_residual(const sl_field* f, double H, double* norm);

/* ---- solvers ---- */

/* Newton with boundary nodes held at start's values. converged is 0 (and
 * out NULL) when Newton fails. */
SL_API sl_status sl_solve_boundary(const sl_field* start, double H, const sl_solver_config* cfg, sl_field** out,
                                   int* converged, char** report_json);
/* Capped problem by continuation in M on a mesh from sl_mesh_truncated.
 * The interface "dBy", if present, is ignored by the data. */
SL_API sl_status sl_scherk(const sl_domain* d, const sl_mesh* m, const sl_solver_config* cfg, sl_field** out,
                           double* M_reached, char** report_json);
/* Barrier family on an annulus mesh; fields_csv rows "t,node_id,x,y,v". */
SL_API sl_status sl_barrier(const sl_field* u, double H, const sl_solver_config* cfg, double* eps_reached,
                            char** report_json, char** fields_csv);
/* Radial solution value u(rho), u(0) = 0. */
SL_API double sl_radial_value(double H, double rho);

/* ---- flux ---- */

SL_API sl_status sl_flux(const sl_field* u, const char* tag, double H, double* flux, double* length);
SL_API sl_status sl_stokes_residual(const sl_field* u, double H, double* reaction, double* element);
SL_API sl_status sl_flux_report(const sl_field* u, double H, char** json, char** csv);

/* Levels 1..levels of the halving exhaustion with B_y = (by[0] + i by[1],
 * radius by[2]). */
SL_API sl_status sl_uniqueness(const sl_domain* d, int levels, const double* by, double probe_width, double eps_prime,
                               double target_h, const sl_solver_config* cfg, char** table_csv, char** summary_json,
                               char** reports_json);

#ifdef __cplusplus
}
#endif

#endif
