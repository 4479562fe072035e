#include "pmc/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pmc {

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  return in;
}

std::string grid_header(const Grid2D& g) {
  std::ostringstream os;
  os << "# pmc-grid nx=" << g.nx << " ny=" << g.ny << " h=" << format17(g.h)
     << " x0=" << format17(g.x0) << " y0=" << format17(g.y0) << " px=" << (g.periodic_x ? 1 : 0)
     << " py=" << (g.periodic_y ? 1 : 0);
  return os.str();
}

Grid2D parse_grid_header(const std::string& line) {
  Grid2D g;
  int px = 0, py = 0;
  const int n = std::sscanf(line.c_str(), "# pmc-grid nx=%d ny=%d h=%lf x0=%lf y0=%lf px=%d py=%d",
                            &g.nx, &g.ny, &g.h, &g.x0, &g.y0, &px, &py);
  if (n != 7 || g.nx <= 0 || g.ny <= 0 || !(g.h > 0))
    throw ConfigError("bad or missing pmc-grid header line");
  g.periodic_x = px != 0;
  g.periodic_y = py != 0;
  return g;
}

}  // namespace

void write_field_csv(const TwoChartComplexField& f, const std::string& path) {
  std::ofstream out = open_out(path);
  out << grid_header(f.grid()) << "\n";
  out << "i,j,chart,re_g,im_g,H\n";
  for (int j = 0; j < f.grid().ny; ++j)
    for (int i = 0; i < f.grid().nx; ++i) {
      const ChartPoint& p = f.g(i, j);
      out << i << ',' << j << ',' << (p.chart == Chart::Q ? 'q' : 'w') << ','
          << format17(p.value.real()) << ',' << format17(p.value.imag()) << ','
          << format17(f.H(i, j)) << "\n";
    }
}

TwoChartComplexField read_field_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty field file: " + path);
  const Grid2D grid = parse_grid_header(line);
  std::getline(in, line);  // column header
  std::vector<ChartPoint> g(grid.size());
  std::vector<double> H(grid.size());
  std::vector<char> seen(grid.size(), 0);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    int i, j;
    char chart;
    double re, im, h;
    if (std::sscanf(line.c_str(), "%d,%d,%c,%lf,%lf,%lf", &i, &j, &chart, &re, &im, &h) != 6)
      throw ConfigError("bad field row: " + line);
    if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny)
      throw ConfigError("field row out of grid bounds: " + line);
    const std::size_t idx = grid.index(i, j);
    g[idx] = {chart == 'w' ? Chart::W : Chart::Q, Complex(re, im)};
    H[idx] = h;
    seen[idx] = 1;
  }
  for (char s : seen)
    if (!s) throw ConfigError("field file misses grid nodes: " + path);
  return TwoChartComplexField(grid, std::move(g), std::move(H));
}

void write_qdiff_csv(const QDiffField& q, const std::string& path) {
  std::ofstream out = open_out(path);
  out << grid_header(q.grid) << "\n";
  out << "i,j,abs_q,arg_q,re_q,im_q\n";
  for (int j = 0; j < q.grid.ny; ++j)
    for (int i = 0; i < q.grid.nx; ++i) {
      const Complex v = q.at(i, j);
      out << i << ',' << j << ',' << format17(std::abs(v)) << ',' << format17(std::arg(v)) << ','
          << format17(v.real()) << ',' << format17(v.imag()) << "\n";
    }
}

QDiffField read_qdiff_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty qdiff file: " + path);
  QDiffField q{parse_grid_header(line), {}, {}};
  q.Q.assign(q.grid.size(), Complex(0, 0));
  q.route.assign(q.grid.size(), Chart::Q);
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    int i, j;
    double a, arg, re, im;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf", &i, &j, &a, &arg, &re, &im) != 6)
      throw ConfigError("bad qdiff row: " + line);
    if (i < 0 || j < 0 || i >= q.grid.nx || j >= q.grid.ny)
      throw ConfigError("qdiff row out of grid bounds: " + line);
    q.Q[q.grid.index(i, j)] = Complex(re, im);
  }
  return q;
}

void write_profile_csv(const RotationalProfile& p, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "theta,x,z,k1,k2\n";
  for (int k = 0; k <= p.valid_until; ++k)
    out << format17(p.theta[k]) << ',' << format17(p.x[k]) << ',' << format17(p.z[k]) << ','
        << format17(p.k1[k]) << ',' << format17(p.k2[k]) << "\n";
}

void write_mesh_obj(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out = open_out(path);
  const Grid2D& g = mesh.grid();
  out << "# pmc surface mesh (" << g.nx << " x " << g.ny << ")\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      Vec3 p;
      if (mesh.backend() == MeshBackend::SU2)
        p = mesh.qpos(i, j).imag();
      else
        p = mesh.pos(i, j);
      out << "v " << format17(p.x) << ' ' << format17(p.y) << ' ' << format17(p.z) << "\n";
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec3& n = mesh.normal(i, j);
      out << "vn " << format17(n.x) << ' ' << format17(n.y) << ' ' << format17(n.z) << "\n";
    }
  auto vid = [&](int i, int j) { return int(g.index(i, j)) + 1; };
  const int jmax = g.periodic_y ? g.ny : g.ny - 1;
  for (int j = 0; j < jmax; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const int jn = (j + 1) % g.ny;
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, jn), d = vid(i, jn);
      out << "f " << a << "//" << a << ' ' << b << "//" << b << ' ' << c << "//" << c << "\n";
      out << "f " << a << "//" << a << ' ' << c << "//" << c << ' ' << d << "//" << d << "\n";
    }
}

void write_mesh_sidecar(const SurfaceMesh& mesh, const std::string& path) {
  nlohmann::json j;
  j["group"] = nlohmann::json::parse(mesh.group().to_json());
  switch (mesh.backend()) {
    case MeshBackend::Euclidean: j["backend"] = "euclidean"; break;
    case MeshBackend::Semidirect: j["backend"] = "semidirect"; break;
    case MeshBackend::SU2: j["backend"] = "su2"; break;
  }
  j["nx"] = mesh.grid().nx;
  j["ny"] = mesh.grid().ny;
  j["h"] = mesh.grid().h;
  j["x0"] = mesh.grid().x0;
  j["y0"] = mesh.grid().y0;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace pmc
