#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "linfembed/analysis.hpp"
#include "linfembed/generate.hpp"
#include "linfembed/amalgam.hpp"
#include "linfembed/geometry.hpp"
#include "linfembed/io.hpp"

namespace py = pybind11;
using namespace linfembed;

// The python surface runs in float mode; exact rational certification stays
// with the CLI, which the JSON documents interoperate with.
using Space = MetricSpace<double>;
using Emb = Embedding<double>;

namespace {

Space make_space_py(std::vector<std::string> points, std::vector<std::vector<double>> rows,
                    const std::string& basepoint) {
  std::vector<double> flat;
  for (const auto& row : rows) {
    if (row.size() != points.size()) throw InputError("distance rows must match point count");
    for (double v : row) flat.push_back(v);
  }
  int base = -1;
  for (size_t i = 0; i < points.size(); ++i)
    if (points[i] == basepoint) base = static_cast<int>(i);
  if (base < 0) throw InputError("basepoint '" + basepoint + "' is not a point");
  return make_space<double>(std::move(points), std::move(flat), base);
}

Space generate_py(const std::string& family, int dim, int radius, int n, double p,
                  uint64_t seed) {
  if (family == "grid") return generate<double>(GridFamily{dim, radius});
  if (family == "random_graph") return generate<double>(RandomGraphFamily{n, p, seed});
  if (family == "random_tree") return generate<double>(RandomTreeFamily{n, seed});
  if (family == "uniform_points") return generate<double>(UniformPointsFamily{n, dim, seed});
  throw InputError("unknown family '" + family + "'");
}

Space from_graph_py(std::vector<std::string> nodes,
                    std::vector<std::tuple<std::string, std::string, double>> edges,
                    const std::string& basepoint) {
  WeightedGraph<double> g;
  g.nodes = std::move(nodes);
  auto find = [&](const std::string& name) {
    for (size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i] == name) return static_cast<int>(i);
    throw InputError("unknown node '" + name + "'");
  };
  for (const auto& [u, v, w] : edges) g.edges.push_back({find(u), find(v), w});
  g.basepoint = find(basepoint);
  return shortest_path_metric(g);
}

std::vector<std::string> validate_py(const Space& m) {
  auto report = validate(m);
  std::vector<std::string> out;
  if (!report.structural_ok) {
    out.push_back("structural: distance table does not match the point list");
    return out;
  }
  for (const auto& v : report.violations) out.push_back(describe(v, m));
  return out;
}

Emb embed_py(const Space& m, const std::string& operators, uint64_t seed) {
  auto violations = validate_py(m);
  if (!violations.empty()) throw InputError("not a metric space: " + violations.front());
  auto mode = operator_mode_from(operators);
  if (!mode) throw InputError("unknown operator mode '" + operators + "'");
  auto scaled = rescale_to_unit_gap(m);
  return embed(scaled.space, make_operators(scaled.space, *mode, seed), scaled.scale);
}

int point_index(const Space& m, const std::string& name) {
  int idx = m.index_of(name);
  if (idx < 0) throw InputError("unknown point '" + name + "'");
  return idx;
}

py::dict distortion_py(const Emb& e) {
  auto r = distortion(e);
  py::dict out;
  out["pair_count"] = r.pair_count;
  out["injective"] = r.injective;
  out["lip"] = r.lip;
  out["lip_witness"] = py::make_tuple(e.space.points[r.lip_i], e.space.points[r.lip_j]);
  if (r.injective) {
    out["colip"] = r.colip;
    out["colip_witness"] =
        py::make_tuple(e.space.points[r.colip_i], e.space.points[r.colip_j]);
    out["dist"] = r.dist;
  }
  out["pass"] = r.pass();
  return out;
}

py::dict certify_py(const Emb& e) {
  auto ledger = certify_cases(e);
  py::dict out;
  out["pair_count"] = ledger.pair_count;
  out["all_pass"] = ledger.all_pass;
  py::dict lip, inv;
  lip["basepoint"] = ledger.lip_counts[0];
  lip["radial_gap"] = ledger.lip_counts[1];
  lip["same_shell"] = ledger.lip_counts[2];
  lip["adjacent_shell"] = ledger.lip_counts[3];
  inv["basepoint"] = ledger.inv_counts[0];
  inv["same_shell"] = ledger.inv_counts[1];
  inv["adjacent_shell"] = ledger.inv_counts[2];
  inv["split_shell"] = ledger.inv_counts[3];
  out["lip_cases"] = lip;
  out["inv_cases"] = inv;
  py::list failures;
  for (const auto& f : ledger.failures)
    failures.append(py::make_tuple(e.space.points[f.i], e.space.points[f.j]));
  out["failures"] = failures;
  return out;
}

py::dict envelope_py(const Emb& e) {
  auto env = envelope_check(e);
  py::dict out;
  out["ok"] = env.ok;
  if (env.has_points) {
    out["min_ratio"] = env.min_ratio;
    out["min_witness"] = e.space.points[env.min_i];
    out["max_ratio"] = env.max_ratio;
    out["max_witness"] = e.space.points[env.max_i];
  }
  return out;
}

py::list moduli_py(const Emb& e, std::optional<std::vector<double>> thresholds) {
  auto prof = moduli(e, thresholds ? *thresholds : default_thresholds(e, 20));
  py::list out;
  for (const auto& entry : prof.entries) {
    py::dict row;
    row["t"] = entry.threshold;
    row["omega"] = entry.omega;
    if (entry.rho_finite)
      row["rho"] = entry.rho;
    else
      row["rho"] = py::none();
    row["omega_le_9t"] = entry.omega_bound_ok;
    row["rho_ge_t_over_24"] = entry.rho_bound_ok;
    out.append(row);
  }
  return out;
}

py::dict image_py(const Emb& e, const std::string& name) {
  int idx = point_index(e.space, name);
  py::dict out;
  for (const auto& [blk, vec] : e.image_of(idx).blocks) {
    py::dict coords;
    for (size_t k = 0; k < vec.values.size(); ++k)
      coords[py::str(e.space.points[(*vec.support)[k]])] = vec.values[k];
    out[py::int_(blk)] = coords;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bi-Lipschitz embeddings of finite pointed metric spaces into sup-norm "
            "block sums, with certified distortion bounds (float mode; the CLI adds "
            "exact rational certification).";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<CertificationError>(m, "CertificationError", PyExc_RuntimeError);

  py::class_<Space>(m, "MetricSpace")
      .def(py::init(&make_space_py), py::arg("points"), py::arg("dist"), py::arg("basepoint"))
      .def_property_readonly("points", [](const Space& s) { return s.points; })
      .def_property_readonly("basepoint",
                             [](const Space& s) { return s.points[s.basepoint]; })
      .def("__len__", &Space::size)
      .def("distance",
           [](const Space& s, const std::string& a, const std::string& b) {
             return s.d(point_index(s, a), point_index(s, b));
           })
      .def("matrix",
           [](const Space& s) {
             std::vector<std::vector<double>> rows;
             for (int i = 0; i < s.size(); ++i) {
               std::vector<double> row;
               for (int j = 0; j < s.size(); ++j) row.push_back(s.d(i, j));
               rows.push_back(std::move(row));
             }
             return rows;
           })
      .def("validate", &validate_py, "list of violated axioms; empty means valid")
      .def("to_json", [](const Space& s) { return dump_json(space_to_json(s)); })
      .def_static("from_json", [](const std::string& text) {
        return space_from_json<double>(parse_json(text, "from_json"));
      });

  py::class_<Emb>(m, "Embedding")
      .def_property_readonly("scale", [](const Emb& e) { return e.scale; })
      .def_property_readonly("points", [](const Emb& e) { return e.space.points; })
      .def("shell",
           [](const Emb& e, const std::string& name) {
             int idx = point_index(e.space, name);
             if (!e.shells.entries[idx]) throw InputError("the basepoint has no shell");
             return py::make_tuple(e.shells.entries[idx]->shell,
                                   e.shells.entries[idx]->lambda);
           },
           "shell index and interpolation weight of a point")
      .def("image", &image_py, "blocks of f(point): {shell: {point: value}}")
      .def("image_distance",
           [](const Emb& e, const std::string& a, const std::string& b) {
             return pairwise_image_distance(e, a, b);
           })
      .def("distortion", &distortion_py)
      .def("certify", &certify_py, "evaluate every case inequality for every pair")
      .def("envelope", &envelope_py)
      .def("moduli", &moduli_py, py::arg("thresholds") = py::none())
      .def("boundary_check",
           [](const Emb& e) {
             auto rep = boundary_consistency_check(e.space, e.operators);
             return py::make_tuple(rep.ok, rep.checked);
           })
      .def("to_json", [](const Emb& e) { return dump_json(embedding_to_json(e)); })
      .def_static("from_json", [](const std::string& text) {
        return embedding_from_json<double>(parse_json(text, "from_json"));
      });

  m.def("generate", &generate_py, py::arg("family"), py::arg("dim") = 2,
        py::arg("radius") = 2, py::arg("n") = 16, py::arg("p") = 0.2, py::arg("seed") = 0);
  m.def("from_graph", &from_graph_py, py::arg("nodes"), py::arg("edges"),
        py::arg("basepoint"), "shortest-path metric of a weighted graph");
  m.def("embed", &embed_py, py::arg("space"), py::arg("operators") = "identity",
        py::arg("seed") = 0,
        "validate, rescale to the unit-gap form and build the two-block embedding");
  m.def("amalgamate",
        [](const std::vector<Space>& parts) { return amalgamate(parts).composite; },
        "glue pointed spaces so each part embeds isometrically");
  m.def("geometry_profile",
        [](const Space& s, const std::vector<double>& radii) {
          auto prof = geometry_profile(s, radii);
          std::vector<std::pair<double, int>> out;
          for (size_t k = 0; k < prof.radii.size(); ++k)
            out.push_back({prof.radii[k], prof.counts[k]});
          return out;
        },
        "largest closed-ball cardinality C(r) per radius");
  m.def("kuratowski", [](const Space& s) {
    auto K = kuratowski(s);
    py::dict out;
    for (int t = 0; t < s.size(); ++t) out[py::str(s.points[t])] = K[t].values;
    return out;
  });

  m.attr("__version__") = "0.1.0";
}
