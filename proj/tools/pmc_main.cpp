// Command-line front end: group classification, potential evaluation and
// zero scans, PDE residuals, Weierstrass reconstruction, rotational sphere
// generation, quadratic differentials and index counts.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "pmc/expr.hpp"
#include "pmc/io.hpp"
#include "pmc/modelsphere.hpp"
#include "pmc/qdiff.hpp"
#include "pmc/weierstrass.hpp"

namespace {

using namespace pmc;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;
constexpr int kExitConfig = 65;

GroupSpec parse_group(const std::string& spec) {
  if (spec == "r3") return GroupSpec::unimodular(0, 0, 0);
  if (spec == "h3") return GroupSpec::nonunimodular(0, 0);
  if (spec == "s3" || spec == "su2") return GroupSpec::unimodular(2, 2, 2);
  if (spec == "nil3") return GroupSpec::unimodular(1, 0, 0);
  if (spec == "sol3") return GroupSpec::unimodular(1, -1, 0);
  if (spec == "sl2r") return GroupSpec::unimodular(1, 1, -1);
  if (spec == "e2") return GroupSpec::unimodular(1, 1, 0);
  if (!spec.empty() && spec[0] == '{') return GroupSpec::from_json(spec);
  // Path to a JSON file.
  std::ifstream in(spec);
  if (!in) throw ConfigError("group spec is neither a known name, JSON, nor a readable file: " +
                             spec);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return GroupSpec::from_json(text);
}

std::vector<double> parse_csv_numbers(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream is(text);
  while (std::getline(is, token, ',')) {
    try {
      out.push_back(std::stod(token));
    } catch (...) {
      throw ConfigError("expected comma-separated numbers, got: " + text);
    }
  }
  return out;
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

void emit_summary(const json& j, const std::string& dir) {
  std::cout << j.dump(2) << std::endl;
  if (!dir.empty()) {
    std::ofstream out(out_path(dir, "summary.json"));
    out << j.dump(2) << "\n";
  }
}

json residual_summary(const std::vector<Complex>& res) {
  double worst = 0, l2 = 0;
  for (const Complex& r : res) {
    worst = std::max(worst, std::abs(r));
    l2 += std::norm(r);
  }
  json j;
  j["max_residual"] = worst;
  j["l2_residual"] = std::sqrt(l2 / std::max<std::size_t>(1, res.size()));
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"prescribed mean curvature surfaces in metric Lie groups"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads (1 = reference semantics)");

  // classify
  auto* classify = app.add_subcommand("classify", "name a group model and its invariants");
  std::string uni_csv, nonuni_csv, group_spec;
  classify->add_option("--unimodular", uni_csv, "c1,c2,c3");
  classify->add_option("--nonunimodular", nonuni_csv, "a,b");
  classify->add_option("--group", group_spec, "name/JSON/file");

  // potential
  auto* pot = app.add_subcommand("potential", "evaluate R(H,q) or scan its zeros");
  std::string pot_group = "r3", pot_q = "0,0", pot_outdir;
  double pot_H = 1.0;
  bool pot_scan = false, pot_chart_w = false;
  int pot_grid = 64;
  pot->add_option("--group", pot_group, "group (name/JSON/file)");
  pot->add_option("--H", pot_H, "mean curvature value");
  pot->add_option("--q", pot_q, "re,im of the chart value");
  pot->add_flag("--chart-w", pot_chart_w, "interpret --q in the w = 1/q chart");
  pot->add_flag("--scan", pot_scan, "scan for zeros of R(H,.)");
  pot->add_option("--grid-n", pot_grid, "scan grid resolution");
  pot->add_option("--out-dir", pot_outdir, "artifact directory");

  // residual
  auto* res = app.add_subcommand("residual", "Gauss-map PDE residual of a field");
  std::string res_group = "r3", res_field, res_field2, res_outdir;
  res->add_option("--group", res_group, "group");
  res->add_option("--field", res_field, "field CSV")->required();
  res->add_option("--field2", res_field2, "second resolution for a convergence slope");
  res->add_option("--out-dir", res_outdir, "artifact directory");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "integrate a surface from (g,H)");
  std::string rec_group = "r3", rec_field, rec_base = "0,0,0", rec_outdir = "pmc_out";
  double rec_tol = 1e-4;
  bool rec_nocheck = false;
  rec->add_option("--group", rec_group, "group");
  rec->add_option("--field", rec_field, "field CSV")->required();
  rec->add_option("--base", rec_base, "base point x,y,z (or quaternion w,x,y,z)");
  rec->add_option("--residual-tol", rec_tol, "relative PDE-residual gate");
  rec->add_flag("--skip-residual-check", rec_nocheck, "skip the solution-field gate");
  rec->add_option("--out-dir", rec_outdir, "artifact directory");

  // sphere
  auto* sph = app.add_subcommand("sphere", "rotational prescribed-H sphere generator");
  std::string sph_h = "1", sph_outdir = "pmc_out";
  int sph_steps = 10000, sph_field_n = 0;
  sph->add_option("--h", sph_h, "prescription, e.g. \"1+0.3*t^2\"");
  sph->add_option("--steps", sph_steps, "profile integration steps");
  sph->add_option("--field-n", sph_field_n, "also export the model field at this resolution");
  sph->add_option("--out-dir", sph_outdir, "artifact directory");

  // qdiff
  auto* qd = app.add_subcommand("qdiff", "quadratic differential of a field against a model");
  std::string qd_field, qd_model_h = "1", qd_outdir = "pmc_out";
  double qd_round = 0;
  int qd_model_steps = 20000;
  qd->add_option("--field", qd_field, "field CSV")->required();
  qd->add_option("--round", qd_round, "use the round model with this H0");
  qd->add_option("--model-h", qd_model_h, "rotational model prescription");
  qd->add_option("--model-steps", qd_model_steps, "rotational model profile steps");
  qd->add_option("--out-dir", qd_outdir, "artifact directory");

  // index
  auto* idx = app.add_subcommand("index", "zeros and winding indices of a Q field");
  std::string idx_q, idx_topology = "disk", idx_outdir;
  idx->add_option("--q", idx_q, "Q-coefficient CSV")->required();
  idx->add_option("--topology", idx_topology, "disk | sphere | torus");
  idx->add_option("--out-dir", idx_outdir, "artifact directory");

  // roundtrip
  auto* rt = app.add_subcommand("roundtrip", "mesh -> (g,H) -> mesh verification");
  std::string rt_case = "euclidean", rt_outdir;
  int rt_n = 64;
  rt->add_option("--case", rt_case, "euclidean | h3 | su2");
  rt->add_option("--n", rt_n, "grid resolution");
  rt->add_option("--out-dir", rt_outdir, "artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (classify->parsed()) {
    GroupSpec g = !uni_csv.empty()
                      ? [&] {
                          auto c = parse_csv_numbers(uni_csv);
                          if (c.size() != 3) throw ConfigError("--unimodular needs c1,c2,c3");
                          return GroupSpec::unimodular(c[0], c[1], c[2]);
                        }()
                  : !nonuni_csv.empty()
                      ? [&] {
                          auto ab = parse_csv_numbers(nonuni_csv);
                          if (ab.size() != 2) throw ConfigError("--nonunimodular needs a,b");
                          return GroupSpec::nonunimodular(ab[0], ab[1]);
                        }()
                      : parse_group(group_spec.empty() ? "r3" : group_spec);
    json j;
    j["family"] = g.family();
    j["kind"] = g.kind() == GroupKind::Unimodular ? "unimodular" : "nonunimodular";
    if (g.kind() == GroupKind::Unimodular) {
      j["c"] = g.c();
      j["mu"] = g.mu();
    } else {
      j["a"] = g.a();
      j["b"] = g.b();
    }
    const CriticalH crit = critical_threshold_h0(g);
    if (crit.compact)
      j["h0"] = "compact";
    else
      j["h0"] = crit.h0;
    const auto gamma = connection_table(g);
    json jg = json::array();
    for (int i = 0; i < 3; ++i)
      for (int jj = 0; jj < 3; ++jj)
        for (int k = 0; k < 3; ++k)
          if (gamma[i][jj][k] != 0)
            jg.push_back({{"i", i + 1}, {"j", jj + 1}, {"k", k + 1}, {"value", gamma[i][jj][k]}});
    j["connection"] = jg;
    std::cout << j.dump(2) << std::endl;
    return 0;
  }

  if (pot->parsed()) {
    const GroupSpec g = parse_group(pot_group);
    json j;
    if (pot_scan) {
      const ZeroScanResult scan = zero_scan(g, pot_H, pot_grid, threads);
      j["identically_zero"] = scan.identically_zero;
      json zeros = json::array();
      std::string csv = "re,im,chart\n";
      for (const ChartPoint& z : scan.zeros) {
        zeros.push_back({{"re", z.value.real()},
                         {"im", z.value.imag()},
                         {"chart", z.chart == Chart::Q ? "q" : "w"}});
        csv += format17(z.value.real()) + "," + format17(z.value.imag()) + "," +
               (z.chart == Chart::Q ? "q" : "w") + "\n";
      }
      j["zeros"] = zeros;
      if (!pot_outdir.empty()) {
        std::ofstream out(out_path(pot_outdir, "zeros.csv"));
        out << csv;
      }
    } else {
      const auto q = parse_csv_numbers(pot_q);
      if (q.size() != 2) throw ConfigError("--q needs re,im");
      const ChartPoint p{pot_chart_w ? Chart::W : Chart::Q, Complex(q[0], q[1])};
      const PotentialEval e = potential_eval(g, pot_H, p);
      j["R"] = {e.R.real(), e.R.imag()};
      j["R_q"] = {e.R_q.real(), e.R_q.imag()};
      j["R_qbar"] = {e.R_qbar.real(), e.R_qbar.imag()};
      j["R_H"] = e.R_H;
      j["chart"] = pot_chart_w ? "w" : "q";
      j["infinity_limit"] = {potential_infinity_limit(g, pot_H).real(),
                             potential_infinity_limit(g, pot_H).imag()};
    }
    emit_summary(j, pot_outdir);
    return 0;
  }

  if (res->parsed()) {
    const GroupSpec g = parse_group(res_group);
    const TwoChartComplexField f = read_field_csv(res_field);
    const auto r = pde_residual(f, g, threads);
    json j = residual_summary(r);
    if (!res_field2.empty()) {
      const TwoChartComplexField f2 = read_field_csv(res_field2);
      const auto r2 = pde_residual(f2, g, threads);
      const json j2 = residual_summary(r2);
      const double m1 = j["max_residual"].get<double>();
      const double m2 = j2["max_residual"].get<double>();
      j["max_residual_2"] = m2;
      const double hratio = f.grid().h / f2.grid().h;
      if (m2 > 0 && hratio > 1)
        j["convergence_slope"] = std::log(m1 / m2) / std::log(hratio);
    }
    if (!res_outdir.empty()) {
      std::string csv = "i,j,abs_residual\n";
      for (int jj = 0; jj < f.grid().ny; ++jj)
        for (int i = 0; i < f.grid().nx; ++i)
          csv += std::to_string(i) + "," + std::to_string(jj) + "," +
                 format17(std::abs(r[f.grid().index(i, jj)])) + "\n";
      std::ofstream out(out_path(res_outdir, "residual.csv"));
      out << csv;
    }
    emit_summary(j, res_outdir);
    return 0;
  }

  if (rec->parsed()) {
    const GroupSpec g = parse_group(rec_group);
    const TwoChartComplexField f = read_field_csv(rec_field);
    ReconstructOptions opt;
    opt.threads = threads;
    opt.residual_rel_tol = rec_tol;
    opt.check_residual = !rec_nocheck;
    const auto base = parse_csv_numbers(rec_base);
    ReconstructResult result = [&] {
      if (default_backend(g) == MeshBackend::SU2) {
        if (base.size() != 4) throw ConfigError("--base needs w,x,y,z for quaternion groups");
        return reconstruct(f, g, Quat{base[0], base[1], base[2], base[3]}, opt);
      }
      if (base.size() != 3) throw ConfigError("--base needs x,y,z");
      return reconstruct(f, g, Vec3{base[0], base[1], base[2]}, opt);
    }();
    write_mesh_obj(result.mesh, out_path(rec_outdir, "mesh.obj"));
    write_mesh_sidecar(result.mesh, out_path(rec_outdir, "mesh.json"));
    json j;
    j["integrability_gap"] = result.integrability_gap;
    j["integrability_warning"] = result.integrability_warning;
    j["mesh"] = out_path(rec_outdir, "mesh.obj");
    emit_summary(j, rec_outdir);
    return 0;
  }

  if (sph->parsed()) {
    const PrescribedH h = Expr::parse(sph_h).to_prescribed();
    const RotationalResult r = rotational_model(h, sph_steps);
    write_profile_csv(r.profile, out_path(sph_outdir, "profile.csv"));
    json j;
    switch (r.status) {
      case RotationalResult::Status::Closed: j["status"] = "closed"; break;
      case RotationalResult::Status::Pinched: j["status"] = "pinched"; break;
      case RotationalResult::Status::ClosureDefect: j["status"] = "closure_defect"; break;
    }
    j["closure_defect"] = r.profile.closure_defect;
    j["strictly_convex"] = r.profile.strictly_convex;
    j["antipodal_symmetric"] = r.profile.antipodal_symmetric;
    j["prescribed_identity_residual"] = r.profile.prescribed_identity_residual(h);
    if (r.model && sph_field_n > 0) {
      write_field_csv(r.model->own_field(sph_field_n), out_path(sph_outdir, "model_field.csv"));
      j["model_field"] = out_path(sph_outdir, "model_field.csv");
      j["diffeo_margin"] = r.model->diffeo_margin();
    }
    emit_summary(j, sph_outdir);
    return 0;
  }

  if (qd->parsed()) {
    const TwoChartComplexField f = read_field_csv(qd_field);
    std::shared_ptr<const ModelSphere> model;
    if (qd_round > 0) {
      model = round_model(qd_round);
    } else {
      const PrescribedH h = Expr::parse(qd_model_h).to_prescribed();
      const RotationalResult r = rotational_model(h, qd_model_steps);
      if (!r.model) throw SpecError("qdiff: the rotational model did not close");
      model = r.model;
    }
    const QDiffField q = q_differential(f, *model, threads);
    write_qdiff_csv(q, out_path(qd_outdir, "qdiff.csv"));
    const DbarResult db = dbar_identity_residual(q, f, *model);
    json j;
    double qmax = 0;
    for (const Complex& v : q.Q) qmax = std::max(qmax, std::abs(v));
    j["max_abs_q"] = qmax;
    j["dbar_max_defect"] = db.max_defect;
    j["dbar_relative"] = db.relative();
    j["qdiff_csv"] = out_path(qd_outdir, "qdiff.csv");
    emit_summary(j, qd_outdir);
    return 0;
  }

  if (idx->parsed()) {
    const QDiffField q = read_qdiff_csv(idx_q);
    Topology topo = Topology::Disk;
    if (idx_topology == "sphere") topo = Topology::Sphere;
    else if (idx_topology == "torus") topo = Topology::Torus;
    else if (idx_topology != "disk") throw ConfigError("--topology must be disk|sphere|torus");
    const IndexReport rep = zeros_and_indices(q, topo);
    json j;
    json zeros = json::array();
    for (const ZeroRecord& z : rep.zeros)
      zeros.push_back({{"cell", {z.ci, z.cj}},
                       {"position", {z.position.real(), z.position.imag()}},
                       {"winding", z.winding},
                       {"index", z.line_field_index()},
                       {"rounding_defect", z.rounding_defect}});
    j["zeros"] = zeros;
    j["winding_sum"] = rep.winding_sum;
    if (rep.expected) {
      j["plaquette_sum"] = rep.plaquette_sum;
      j["expected_4g_minus_4"] = *rep.expected;
      j["matches_poincare_hopf"] = rep.matches_poincare_hopf;
    }
    emit_summary(j, idx_outdir);
    return 0;
  }

  if (rt->parsed()) {
    json j;
    const int n = rt_n;
    auto report = [&](double err, double gap) {
      j["sup_error"] = err;
      j["integrability_gap"] = gap;
    };
    ReconstructOptions opt;
    opt.threads = threads;
    opt.check_residual = false;
    if (rt_case == "euclidean") {
      Grid2D grid{n, n, 1.8 / (n - 1), -0.9, -0.9};
      SurfaceMesh seed(grid, MeshBackend::Euclidean, GroupSpec::unimodular(0, 0, 0));
      for (int jj = 0; jj < n; ++jj)
        for (int i = 0; i < n; ++i) {
          const Vec3 nu = stereo_inv(ChartPoint::from_q(grid.node(i, jj)));
          seed.pos(i, jj) = Vec3{1, 2, 3} - nu;
          seed.normal(i, jj) = nu;
        }
      seed.mark_normals();
      const TwoChartComplexField f = mesh_extract_field(seed);
      const auto rr = reconstruct(f, seed.group(), seed.pos(n / 2, n / 2), opt);
      report(SurfaceMesh::sup_distance(rr.mesh, seed), rr.integrability_gap);
    } else if (rt_case == "h3") {
      const GroupSpec h3 = GroupSpec::nonunimodular(0, 0);
      Grid2D grid{n, n, 1.8 / (n - 1), -0.9, -0.9};
      SurfaceMesh seed(grid, MeshBackend::Semidirect, h3);
      for (int jj = 0; jj < n; ++jj)
        for (int i = 0; i < n; ++i) {
          const Vec3 nu = stereo_inv(ChartPoint::from_q(grid.node(i, jj)));
          const double sigma = 1.0 - 0.4 * nu.z;  // half-space sphere, inward-style normal
          seed.pos(i, jj) = Vec3{-0.4 * nu.x, -0.4 * nu.y, std::log(sigma)};
        }
      const TwoChartComplexField f = mesh_extract_field(seed);
      const auto rr = reconstruct(f, h3, seed.pos(n / 2, n / 2), opt);
      report(SurfaceMesh::sup_distance(rr.mesh, seed), rr.integrability_gap);
    } else if (rt_case == "su2") {
      const GroupSpec s3 = GroupSpec::unimodular(2, 2, 2);
      const double r = 0.6;
      Grid2D grid{n, n, 2.4 / (n - 1), -1.2, -1.2};
      SurfaceMesh seed(grid, MeshBackend::SU2, s3);
      for (int jj = 0; jj < n; ++jj)
        for (int i = 0; i < n; ++i) {
          const Complex z = grid.node(i, jj);
          const double t = 2 * std::atan(std::exp(z.real()));
          const Vec3 nhat{std::sin(t) * std::cos(z.imag()), std::sin(t) * std::sin(z.imag()),
                          std::cos(t)};
          seed.qpos(i, jj) = Quat{std::cos(r), std::sin(r) * nhat.x, std::sin(r) * nhat.y,
                                  std::sin(r) * nhat.z};
        }
      const TwoChartComplexField f = mesh_extract_field(seed);
      const auto rr = reconstruct(f, s3, seed.qpos(n / 2, n / 2), opt);
      report(SurfaceMesh::sup_distance(rr.mesh, seed), rr.integrability_gap);
    } else {
      throw ConfigError("--case must be euclidean|h3|su2");
    }
    emit_summary(j, rt_outdir);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const PotentialZeroError& e) {
    std::cerr << "numerical precondition: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const StencilUnavailableError& e) {
    std::cerr << "numerical precondition: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const DegenerateTangentError& e) {
    std::cerr << "numerical precondition: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const ModelDomainMissError& e) {
    std::cerr << "numerical precondition: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const ProfilePinchError& e) {
    std::cerr << "numerical precondition: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const BoundaryZeroError& e) {
    std::cerr << "numerical precondition: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitValidation;
  }
}
