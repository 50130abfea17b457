#include "scherklab/scherklab.h"

#include <cstring>
#include <memory>
#include <string>

#include <fmt/format.h>
#include "json.hpp"

#include "scherklab/domain.hpp"
#include "scherklab/flux.hpp"
#include "scherklab/mesh.hpp"
#include "scherklab/solver.hpp"

using namespace scherklab;
using nlohmann::json;

struct sl_domain {
  domain::ScherkDomain d;
  double horodisk_size = 0.2;
};

struct sl_mesh {
  solver::MeshPtr m;
};

struct sl_field {
  solver::ScalarField f;
};

namespace {

thread_local std::string g_error;
int g_threads = 1;

sl_status fail(sl_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

template <typename F>
sl_status guarded(F&& body) {
  g_error.clear();
  try {
    return body();
  } catch (const GeometryError& e) {
    return fail(SL_ERR_GEOMETRY, e.what());
  } catch (const mesh::MeshError& e) {
    return fail(SL_ERR_MESH, e.what());
  } catch (const solver::SolverError& e) {
    return fail(SL_ERR_SOLVER, e.what());
  } catch (const json::exception& e) {
    return fail(SL_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    return fail(msg.rfind("malformed JSON", 0) == 0 ? SL_ERR_PARSE : SL_ERR_INVALID_ARGUMENT, msg);
  } catch (const std::exception& e) {
    return fail(SL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SL_ERR_INTERNAL, "unknown exception");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

#define SL_REQUIRE(cond, what) \
  if (!(cond)) return fail(SL_ERR_INVALID_ARGUMENT, what)

solver::SolverConfig to_config(const sl_solver_config* c) {
  solver::SolverConfig cfg;
  if (!c) return cfg;
  cfg.newton_tol = c->newton_tol;
  cfg.max_iter = c->max_iter;
  cfg.damping = c->damping != 0;
  cfg.quadrature_order = c->quadrature_order;
  cfg.cap_M = c->cap_M;
  cfg.cap_step = c->cap_step;
  cfg.c_cap = c->c_cap;
  cfg.t_max = c->t_max;
  cfg.steps = c->steps;
  cfg.validate();
  return cfg;
}

domain::HorodiskFamily level_family(const sl_domain& d, int level) {
  return domain::scaled(domain::default_horodisks(d.d, d.horodisk_size), std::ldexp(1.0, -(level - 1)));
}

}  // namespace

extern "C" {

const char* sl_version(void) { return SCHERKLAB_VERSION; }

const char* sl_last_error(void) { return g_error.c_str(); }

void sl_string_free(char* s) { std::free(s); }

const char* sl_status_name(sl_status s) {
  switch (s) {
    case SL_OK: return "ok";
    case SL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SL_ERR_PARSE: return "parse error";
    case SL_ERR_GEOMETRY: return "geometry error";
    case SL_ERR_MESH: return "mesh error";
    case SL_ERR_SOLVER: return "solver error";
    case SL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

sl_status sl_set_threads(int n) {
  g_error.clear();
  SL_REQUIRE(n >= 1, "thread count must be at least 1");
  g_threads = n;
  return SL_OK;
}

int sl_threads(void) { return g_threads; }

void sl_solver_config_default(sl_solver_config* c) {
  if (!c) return;
  const solver::SolverConfig d;
  c->newton_tol = d.newton_tol;
  c->max_iter = d.max_iter;
  c->damping = d.damping ? 1 : 0;
  c->quadrature_order = d.quadrature_order;
  c->cap_M = d.cap_M;
  c->cap_step = d.cap_step;
  c->c_cap = d.c_cap;
  c->t_max = d.t_max;
  c->steps = d.steps;
}

// ---- domains ----

sl_status sl_domain_parse(const char* text, sl_domain** out) {
  return guarded([&] {
    SL_REQUIRE(text && out, "null argument");
    const domain::DomainSpec spec = domain::parse_domain(text);
    const domain::Diagnostics diag = domain::validate(spec.domain);
    if (!diag.valid) return fail(SL_ERR_GEOMETRY, diag.message);
    *out = new sl_domain{spec.domain, spec.horodisk_size};
    return SL_OK;
  });
}

sl_status sl_domain_create(double H, const double* angles, const char* labels, size_t n, double horodisk_size,
                           sl_domain** out) {
  return guarded([&] {
    SL_REQUIRE(angles && labels && out, "null argument");
    SL_REQUIRE(std::strlen(labels) == n, "need one label per vertex");
    SL_REQUIRE(horodisk_size > 0.0 && horodisk_size < 1.0, "horodisk size must lie in (0, 1)");
    std::vector<hyp::ArcLabel> ls;
    for (size_t i = 0; i < n; ++i) ls.push_back(domain::parse_label(std::string(1, labels[i])));
    auto d = domain::make_domain(H, std::vector<double>(angles, angles + n), ls);
    const domain::Diagnostics diag = domain::validate(d);
    if (!diag.valid) return fail(SL_ERR_GEOMETRY, diag.message);
    *out = new sl_domain{std::move(d), horodisk_size};
    return SL_OK;
  });
}

void sl_domain_free(sl_domain* d) { delete d; }

double sl_domain_H(const sl_domain* d) { return d ? d->d.H : 0.0; }

double sl_domain_horodisk_size(const sl_domain* d) { return d ? d->horodisk_size : 0.0; }

size_t sl_domain_vertex_count(const sl_domain* d) { return d ? d->d.size() : 0; }

sl_status sl_domain_json(const sl_domain* d, char** out) {
  return guarded([&] {
    SL_REQUIRE(d && out, "null argument");
    put(out, domain::domain_json(d->d, d->horodisk_size));
    return SL_OK;
  });
}

sl_status sl_domain_check(const sl_domain* d, double size, double tol, double margin_tol, int* verdict,
                          char** report_json, char** report_csv) {
  return guarded([&] {
    SL_REQUIRE(d && verdict, "null argument");
    SL_REQUIRE(tol > 0.0 && margin_tol > 0.0, "tolerances must be positive");
    domain::CheckOptions opt;
    opt.tol = tol;
    opt.margin_tol = margin_tol;
    const double s = size > 0.0 ? size : d->horodisk_size;
    SL_REQUIRE(s < 1.0, "horodisk size must lie in (0, 1)");
    const domain::SolvabilityReport r = domain::check_solvability(d->d, domain::default_horodisks(d->d, s), opt);
    *verdict = r.verdict ? 1 : 0;
    put(report_json, domain::report_json(r));
    put(report_csv, domain::report_csv(r));
    return SL_OK;
  });
}

sl_status sl_calibrate(const char* family_json, double lo, double hi, int* found, double* param, sl_domain** out,
                       char** report_json) {
  return guarded([&] {
    SL_REQUIRE(family_json && found && param, "null argument");
    domain::DomainFamily f = domain::parse_family(family_json);
    if (lo < hi) {
      f.param_lo = lo;
      f.param_hi = hi;
    }
    const domain::Calibration c = domain::calibrate(f);
    *found = c.found ? 1 : 0;
    *param = c.param;
    json j = {{"found", c.found}, {"param", c.param}, {"message", c.message}};
    if (c.found) {
      j["report"] = json::parse(domain::report_json(c.report));
      if (out) *out = new sl_domain{c.domain, f.horodisk_size};
    } else if (out) {
      *out = nullptr;
    }
    put(report_json, j.dump(2));
    return SL_OK;
  });
}

// ---- meshes ----

sl_status sl_mesh_truncated(const sl_domain* d, int level, double target_h, const double* by, sl_mesh** out) {
  return guarded([&] {
    SL_REQUIRE(d && out, "null argument");
    SL_REQUIRE(level >= 1 && level <= 30, "level must lie in [1, 30]");
    SL_REQUIRE(target_h > 0.0 && target_h < 1.0, "target_h must lie in (0, 1)");
    mesh::RefinementSpec spec;
    spec.target_h = target_h;
    std::vector<mesh::EmbeddedCircle> circles;
    if (by) {
      SL_REQUIRE(by[2] > 0.0, "B_y radius must be positive");
      circles.push_back({{by[0], by[1]}, by[2], "dBy", false, 1});
    }
    *out = new sl_mesh{
        std::make_shared<const mesh::TriMesh>(mesh::mesh_truncated_domain(d->d, level_family(*d, level), spec, circles))};
    return SL_OK;
  });
}

sl_status sl_mesh_disk(double cx, double cy, double radius, double target_h, sl_mesh** out) {
  return guarded([&] {
    SL_REQUIRE(out, "null argument");
    SL_REQUIRE(target_h > 0.0 && target_h < 1.0, "target_h must lie in (0, 1)");
    mesh::RefinementSpec spec;
    spec.target_h = target_h;
    *out = new sl_mesh{std::make_shared<const mesh::TriMesh>(mesh::mesh_disk({cx, cy}, radius, spec))};
    return SL_OK;
  });
}

sl_status sl_mesh_annulus(double cx, double cy, double r_in, double r_out, double target_h, sl_mesh** out) {
  return guarded([&] {
    SL_REQUIRE(out, "null argument");
    SL_REQUIRE(target_h > 0.0 && target_h < 1.0, "target_h must lie in (0, 1)");
    SL_REQUIRE(r_in > 0.0 && r_in < r_out, "need 0 < r_in < r_out");
    mesh::RefinementSpec spec;
    spec.target_h = target_h;
    *out = new sl_mesh{std::make_shared<const mesh::TriMesh>(mesh::mesh_annulus({cx, cy}, r_in, r_out, spec))};
    return SL_OK;
  });
}

void sl_mesh_free(sl_mesh* m) { delete m; }

size_t sl_mesh_node_count(const sl_mesh* m) { return m ? m->m->node_count() : 0; }

size_t sl_mesh_triangle_count(const sl_mesh* m) { return m ? m->m->triangle_count() : 0; }

sl_status sl_mesh_node(const sl_mesh* m, size_t i, double* x, double* y) {
  return guarded([&] {
    SL_REQUIRE(m && x && y, "null argument");
    SL_REQUIRE(i < m->m->node_count(), "node index out of range");
    *x = m->m->nodes[i].real();
    *y = m->m->nodes[i].imag();
    return SL_OK;
  });
}

int sl_mesh_is_boundary(const sl_mesh* m, size_t i) {
  if (!m || i >= m->m->node_count()) return 0;
  for (const auto& e : m->m->boundary) {
    if (static_cast<size_t>(e.a) == i || static_cast<size_t>(e.b) == i) return 1;
  }
  return 0;
}

sl_status sl_mesh_json(const sl_mesh* m, char** out) {
  return guarded([&] {
    SL_REQUIRE(m && out, "null argument");
    put(out, mesh::mesh_json(*m->m));
    return SL_OK;
  });
}

sl_status sl_mesh_nodes_csv(const sl_mesh* m, char** out) {
  return guarded([&] {
    SL_REQUIRE(m && out, "null argument");
    put(out, mesh::nodes_csv(*m->m));
    return SL_OK;
  });
}

// ---- fields ----

sl_status sl_field_create(const sl_mesh* m, const double* values, size_t n, sl_field** out) {
  return guarded([&] {
    SL_REQUIRE(m && values && out, "null argument");
    SL_REQUIRE(n == m->m->node_count(), fmt::format("expected {} values, got {}", m->m->node_count(), n));
    for (size_t i = 0; i < n; ++i) SL_REQUIRE(std::isfinite(values[i]), fmt::format("value {} is not finite", i));
    *out = new sl_field{solver::ScalarField(m->m, std::vector<double>(values, values + n))};
    return SL_OK;
  });
}

void sl_field_free(sl_field* f) { delete f; }

size_t sl_field_size(const sl_field* f) { return f ? f->f.size() : 0; }

sl_status sl_field_values(const sl_field* f, double* out, size_t n) {
  return guarded([&] {
    SL_REQUIRE(f && out, "null argument");
    SL_REQUIRE(n == f->f.size(), "buffer size does not match the field");
    std::copy(f->f.values.begin(), f->f.values.end(), out);
    return SL_OK;
  });
}

sl_status sl_field_interpolate(const sl_field* src, const sl_mesh* m, sl_field** out) {
  return guarded([&] {
    SL_REQUIRE(src && m && out, "null argument");
    solver::ScalarField f(m->m, 0.0);
    for (size_t i = 0; i < f.size(); ++i) {
      const auto v = src->f.evaluate(m->m->nodes[i]);
      if (!v) return fail(SL_ERR_INVALID_ARGUMENT, fmt::format("node {} lies outside the source mesh", i));
      f[i] = *v;
    }
    *out = new sl_field{std::move(f)};
    return SL_OK;
  });
}

sl_status sl_field_csv(const sl_field* f, char** out) {
  return guarded([&] {
    SL_REQUIRE(f && out, "null argument");
    put(out, solver::field_csv(f->f));
    return SL_OK;
  });
}

sl_status sl_field_residual(const sl_field* f, double H, double* norm) {
  return guarded([&] {
    SL_REQUIRE(f && norm, "null argument");
    *norm = solver::residual_norm(solver::residual(f->f, H), f->f.mesh->boundary_mask());
    return SL_OK;
  });
}

// ---- solvers ----

sl_status sl_solve_boundary(const sl_field* start, double H, const sl_solver_config* cfg, sl_field** out,
                            int* converged, char** report_json) {
  return guarded([&] {
    SL_REQUIRE(start && out && converged, "null argument");
    const solver::Solution s = solver::solve_fixed(start->f, start->f.mesh->boundary_mask(), H, to_config(cfg));
    *converged = s.report.converged ? 1 : 0;
    *out = s.report.converged ? new sl_field{s.field} : nullptr;
    put(report_json, solver::report_json(s.report));
    return SL_OK;
  });
}

sl_status sl_scherk(const sl_domain* d, const sl_mesh* m, const sl_solver_config* cfg, sl_field** out,
                    double* M_reached, char** report_json) {
  return guarded([&] {
    SL_REQUIRE(d && m && out, "null argument");
    const solver::ScherkResult r = solver::scherk_approx(m->m, d->d, d->d.H, to_config(cfg));
    *out = new sl_field{r.field};
    if (M_reached) *M_reached = r.M_reached;
    json reports = json::array();
    for (const auto& rep : r.reports) reports.push_back(json::parse(solver::report_json(rep)));
    const json j = {{"M_reached", r.M_reached}, {"reached_cap", r.reached_cap}, {"caps", r.caps},
                    {"c_data_rule", r.c_data_rule}, {"reports", reports}};
    put(report_json, j.dump(2));
    return SL_OK;
  });
}

sl_status sl_barrier(const sl_field* u, double H, const sl_solver_config* cfg, double* eps_reached,
                     char** report_json, char** fields_csv) {
  return guarded([&] {
    SL_REQUIRE(u && eps_reached, "null argument");
    const solver::BarrierResult b = solver::annulus_barrier(u->f, H, to_config(cfg));
    *eps_reached = b.eps_reached;
    json reports = json::array();
    for (const auto& rep : b.reports) reports.push_back(json::parse(solver::report_json(rep)));
    json j = {{"eps_reached", b.eps_reached}, {"t", b.t}, {"reports", reports}};
    j["first_failure"] = b.first_failure ? json(*b.first_failure) : json(nullptr);
    put(report_json, j.dump(2));
    if (fields_csv) {
      std::string csv = "t,node_id,x,y,v\n";
      for (std::size_t k = 0; k < b.fields.size(); ++k) {
        const auto& f = b.fields[k];
        for (std::size_t i = 0; i < f.size(); ++i) {
          csv += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g}\n", b.t[k], i, f.mesh->nodes[i].real(),
                             f.mesh->nodes[i].imag(), f[i]);
        }
      }
      *fields_csv = dup(csv);
    }
    return SL_OK;
  });
}

double sl_radial_value(double H, double rho) {
  try {
    return solver::radial_value(H, rho);
  } catch (const std::exception& e) {
    g_error = e.what();
    return std::nan("");
  }
}

// ---- flux ----

sl_status sl_flux(const sl_field* u, const char* tag, double H, double* value, double* length) {
  return guarded([&] {
    SL_REQUIRE(u && tag && value, "null argument");
    const flux::Curve c = flux::boundary_curve(*u->f.mesh, {tag});
    *value = flux::flux(u->f, c, H);
    if (length) *length = flux::curve_length(*u->f.mesh, c);
    return SL_OK;
  });
}

sl_status sl_stokes_residual(const sl_field* u, double H, double* reaction, double* element) {
  return guarded([&] {
    SL_REQUIRE(u, "null argument");
    if (reaction) *reaction = flux::stokes_residual(u->f, H, flux::FluxMethod::Reaction);
    if (element) *element = flux::stokes_residual(u->f, H, flux::FluxMethod::Element);
    return SL_OK;
  });
}

sl_status sl_flux_report(const sl_field* u, double H, char** json_out, char** csv_out) {
  return guarded([&] {
    SL_REQUIRE(u, "null argument");
    const std::vector<flux::FluxReport> reps = {flux::flux_report(u->f, H)};
    put(json_out, flux::report_json(reps));
    put(csv_out, flux::report_csv(reps));
    return SL_OK;
  });
}

sl_status sl_uniqueness(const sl_domain* d, int levels, const double* by, double probe_width, double eps_prime,
                        double target_h, const sl_solver_config* cfg, char** table_csv, char** summary_json,
                        char** reports_json) {
  return guarded([&] {
    SL_REQUIRE(d && by, "null argument");
    SL_REQUIRE(levels >= 1 && levels <= 12, "levels must lie in [1, 12]");
    SL_REQUIRE(target_h > 0.0 && target_h < 1.0, "target_h must lie in (0, 1)");
    flux::UniquenessOptions opt;
    opt.B_y = {{by[0], by[1]}, by[2]};
    opt.probe_width = probe_width;
    opt.eps_prime = eps_prime;
    opt.spec.target_h = target_h;
    std::vector<domain::HorodiskFamily> fams;
    for (int n = 1; n <= levels; ++n) fams.push_back(level_family(*d, n));
    const flux::UniquenessTable t = flux::uniqueness_experiment(d->d, fams, opt, d->d.H, to_config(cfg));
    put(table_csv, flux::table_csv(t));
    put(reports_json, flux::report_json(t.reports));
    if (summary_json) {
      json rows = json::array();
      for (const auto& r : t.rows) {
        rows.push_back({{"n", r.n}, {"sup_gap", r.sup_gap}, {"dBy_diff_flux", r.dBy_diff_flux},
                        {"sum_C_length", r.sum_C_length}, {"bound", 2.0 * r.sum_C_length}, {"ordered", r.ordered},
                        {"within_bound", r.within_bound}, {"nodes", r.nodes}, {"M_reached", r.M_reached}});
      }
      json j = {{"rows", rows},
                {"sup_gap_nonincreasing", t.sup_gap_nonincreasing},
                {"flux_nonincreasing", t.flux_nonincreasing},
                {"bound_convention", "sum over i of 2 |C_i^n|"},
                {"convention", flux::kConvention}};
      j["stopped"] = t.stopped ? json(*t.stopped) : json(nullptr);
      *summary_json = dup(j.dump(2));
    }
    return SL_OK;
  });
}

}  // extern "C"
