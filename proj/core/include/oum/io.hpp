#ifndef OUM_IO_HPP
#define OUM_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "oum/analysis.hpp"
#include "oum/mesh.hpp"
#include "oum/solver.hpp"

namespace oum {

// All writers format numbers with "%.17g": byte-identical output for
// identical doubles, which the determinism guarantees rest on.

// Header `vertex_id,x,y,value`, one row per vertex.
void write_solution_csv(std::ostream& out, const TriMesh& mesh, const Solution& solution);
void write_solution_csv_file(const std::string& path, const TriMesh& mesh,
                             const Solution& solution);

// Legacy-VTK unstructured grid with the value field as point-data scalars.
void write_solution_vtk(std::ostream& out, const TriMesh& mesh, const Solution& solution);
void write_solution_vtk_file(const std::string& path, const TriMesh& mesh,
                             const Solution& solution);

// Header `vertices,triangles,h_max,avg_error,r_avg,max_error,r_max`;
// undefined first-row rates print as `-`.
void write_study_csv(std::ostream& out, const ConvergenceReport& report);
void write_study_csv_file(const std::string& path, const ConvergenceReport& report);

struct DiagnosticRow {
  std::string check;
  VertexId vertex = -1;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Header `check,vertex_id,residual,threshold,pass`.
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows);
void write_diagnostics_csv_file(const std::string& path,
                                const std::vector<DiagnosticRow>& rows);

}  // namespace oum

#endif
