#pragma once

#include <string>

#include "semlab/dirichlet.hpp"
#include "semlab/space.hpp"

namespace semlab {

struct GeneratedSpace {
  MetricMeasureSpace space;
  DirichletStructure dirichlet;
};

// Family descriptor, e.g. "cycle:n=12" or "random_geometric:n=20,radius=0.4,seed=3".
struct FamilySpec {
  std::string family;
  std::map<std::string, std::string> params;

  static FamilySpec parse(const std::string& text);
  std::string to_string() const;
  double number(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
};

// Build a connected test space: unit conductances and masses unless the family
// says otherwise, shortest-path metric on edge lengths, then calibrated.
GeneratedSpace generate_space(const FamilySpec& spec);
GeneratedSpace generate_space(const std::string& spec);

// Rescale d so that Q(x) = (1/(2m(x))) sum_y w_xy d(x,y)^2 has maximum 1.
MetricMeasureSpace calibrate_metric(const MetricMeasureSpace& space,
                                    const DirichletStructure& dirichlet);

// max_x Q(x) for the current metric; 1 on a tightly calibrated space.
double calibration_ratio(const MetricMeasureSpace& space, const DirichletStructure& dirichlet);

// Shortest-path metric from a matrix of edge lengths (0 or inf = no edge).
Matrix shortest_path_metric(const Matrix& edge_lengths);

// Space files: JSON object with keys n, d (row-major), m, w (row-major).
GeneratedSpace load_space_file(const std::string& path);
void save_space_file(const std::string& path, const GeneratedSpace& generated);
std::string space_to_json(const GeneratedSpace& generated);
GeneratedSpace space_from_json(const std::string& text);

// A "file:<path>" spec or an existing path loads a space file; anything else
// is a generator family.
GeneratedSpace resolve_space(const std::string& spec);

}  // namespace semlab
