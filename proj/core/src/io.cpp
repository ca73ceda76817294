#include "oum/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "oum/errors.hpp"

namespace oum {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  return out;
}

}  // namespace

void write_solution_csv(std::ostream& out, const TriMesh& mesh, const Solution& solution) {
  out << "vertex_id,x,y,value\n";
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 p = mesh.position(v);
    out << v << ',' << fmt(p.x) << ',' << fmt(p.y) << ','
        << fmt(solution.values[static_cast<std::size_t>(v)]) << '\n';
  }
}

void write_solution_csv_file(const std::string& path, const TriMesh& mesh,
                             const Solution& solution) {
  auto out = open_out(path);
  write_solution_csv(out, mesh, solution);
}

void write_solution_vtk(std::ostream& out, const TriMesh& mesh, const Solution& solution) {
  out << "# vtk DataFile Version 3.0\n";
  out << "oum solution\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertex_count() << " double\n";
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 p = mesh.position(v);
    out << fmt(p.x) << ' ' << fmt(p.y) << " 0\n";
  }
  out << "CELLS " << mesh.triangle_count() << ' ' << mesh.triangle_count() * 4 << '\n';
  for (TriId t = 0; t < mesh.triangle_count(); ++t) {
    const auto tri = mesh.triangle(t);
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  out << "CELL_TYPES " << mesh.triangle_count() << '\n';
  for (TriId t = 0; t < mesh.triangle_count(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.vertex_count() << '\n';
  out << "SCALARS value double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    out << fmt(solution.values[static_cast<std::size_t>(v)]) << '\n';
  }
}

void write_solution_vtk_file(const std::string& path, const TriMesh& mesh,
                             const Solution& solution) {
  auto out = open_out(path);
  write_solution_vtk(out, mesh, solution);
}

void write_study_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "vertices,triangles,h_max,avg_error,r_avg,max_error,r_max\n";
  for (const StudyRow& r : report.rows) {
    out << r.vertices << ',' << r.triangles << ',' << fmt(r.h_max) << ','
        << fmt(r.avg_error) << ',' << (std::isnan(r.r_avg) ? "-" : fmt(r.r_avg)) << ','
        << fmt(r.max_error) << ',' << (std::isnan(r.r_max) ? "-" : fmt(r.r_max)) << '\n';
  }
}

void write_study_csv_file(const std::string& path, const ConvergenceReport& report) {
  auto out = open_out(path);
  write_study_csv(out, report);
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows) {
  out << "check,vertex_id,residual,threshold,pass\n";
  for (const DiagnosticRow& r : rows) {
    out << r.check << ',' << r.vertex << ',' << fmt(r.residual) << ','
        << fmt(r.threshold) << ',' << (r.pass ? "1" : "0") << '\n';
  }
}

void write_diagnostics_csv_file(const std::string& path,
                                const std::vector<DiagnosticRow>& rows) {
  auto out = open_out(path);
  write_diagnostics_csv(out, rows);
}

}  // namespace oum
