#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linfembed/amalgam.hpp"
#include "linfembed/analysis.hpp"
#include "linfembed/geometry.hpp"
#include "linfembed/glue.hpp"

namespace linfembed {

using ojson = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

// ---------------------------------------------------------------------------
// scalars: rationals travel as "p/q" strings, floats as plain numbers

template <class S>
ojson scalar_to_json(const S& x);

template <>
inline ojson scalar_to_json<Rat>(const Rat& x) {
  return to_string_scalar(x);
}

template <>
inline ojson scalar_to_json<double>(const double& x) {
  return x;
}

template <class S>
S scalar_from_json(const ojson& j) {
  if (j.is_string()) {
    auto v = parse_scalar<S>(j.get<std::string>());
    if (!v) throw InputError("cannot parse scalar '" + j.get<std::string>() + "'");
    return *v;
  }
  if (j.is_number_integer()) return S(static_cast<long long>(j.get<int64_t>()));
  if (j.is_number_unsigned()) return S(static_cast<long long>(j.get<uint64_t>()));
  if (j.is_number_float()) return S(j.get<double>());  // exact binary value
  throw InputError("expected a number or fraction string, got: " + j.dump());
}

template <class S>
std::vector<S> parse_scalar_list(const std::string& text) {
  std::vector<S> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    auto v = parse_scalar<S>(token);
    if (!v) throw InputError("cannot parse list entry '" + token + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw InputError("empty scalar list");
  return out;
}

// ---------------------------------------------------------------------------
// files

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
}

inline std::string dump_json(const ojson& j) { return j.dump(2) + "\n"; }

inline ojson parse_json(const std::string& text, const std::string& what) {
  ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("malformed JSON in " + what);
  return j;
}

// ---------------------------------------------------------------------------
// metric spaces

template <class S>
ojson space_to_json(const MetricSpace<S>& m) {
  ojson j;
  j["schema_version"] = schema_version;
  j["kind"] = "metric_space";
  j["arith"] = scalar_traits<S>::mode_name();
  j["points"] = m.points;
  j["basepoint"] = m.points[m.basepoint];
  ojson rows = ojson::array();
  for (int i = 0; i < m.size(); ++i) {
    ojson row = ojson::array();
    for (int k = 0; k < m.size(); ++k) row.push_back(scalar_to_json<S>(m.d(i, k)));
    rows.push_back(std::move(row));
  }
  j["dist"] = std::move(rows);
  if (!m.metadata.empty()) {
    ojson meta;
    for (const auto& [k, v] : m.metadata) meta[k] = v;
    j["metadata"] = std::move(meta);
  }
  return j;
}

template <class S>
MetricSpace<S> space_table_from_json(const ojson& j) {
  if (!j.contains("points") || !j.contains("dist"))
    throw InputError("metric space document needs 'points' and 'dist'");
  std::vector<std::string> points = j.at("points").get<std::vector<std::string>>();
  const ojson& rows = j.at("dist");
  if (!rows.is_array() || rows.size() != points.size())
    throw InputError("'dist' must have one row per point");
  std::vector<S> table;
  table.reserve(points.size() * points.size());
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != points.size())
      throw InputError("'dist' rows must have one entry per point");
    for (const auto& cell : row) table.push_back(scalar_from_json<S>(cell));
  }
  std::string base = j.value("basepoint", points.empty() ? "" : points[0]);
  int base_idx = -1;
  for (size_t i = 0; i < points.size(); ++i)
    if (points[i] == base) base_idx = static_cast<int>(i);
  if (base_idx < 0) throw InputError("basepoint '" + base + "' is not a point");
  MetricSpace<S> m = make_space<S>(std::move(points), std::move(table), base_idx);
  if (j.contains("metadata"))
    for (auto it = j.at("metadata").begin(); it != j.at("metadata").end(); ++it)
      m.metadata[it.key()] = it.value().is_string() ? it.value().get<std::string>()
                                                    : it.value().dump();
  return m;
}

template <class S>
MetricSpace<S> graph_from_json(const ojson& j) {
  if (!j.contains("nodes") || !j.contains("edges"))
    throw InputError("graph document needs 'nodes' and 'edges'");
  WeightedGraph<S> g;
  g.nodes = j.at("nodes").get<std::vector<std::string>>();
  auto find_node = [&](const std::string& name) {
    for (size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i] == name) return static_cast<int>(i);
    throw InputError("edge references unknown node '" + name + "'");
  };
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3)
      throw InputError("each edge must be [u, v, w]");
    g.edges.push_back({find_node(e[0].get<std::string>()), find_node(e[1].get<std::string>()),
                       scalar_from_json<S>(e[2])});
  }
  if (!j.contains("basepoint")) throw InputError("graph document needs 'basepoint'");
  g.basepoint = find_node(j.at("basepoint").get<std::string>());
  return shortest_path_metric(g);
}

// Accepts both document shapes: a distance table or a weighted graph.
template <class S>
MetricSpace<S> space_from_json(const ojson& j) {
  if (!j.is_object()) throw InputError("space document must be a JSON object");
  if (j.contains("edges")) return graph_from_json<S>(j);
  return space_table_from_json<S>(j);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::string(trim(cell)));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

// Header row: point names. Following rows: the distance matrix. Names must
// not contain commas; the basepoint arrives separately.
template <class S>
MetricSpace<S> space_from_csv(const std::string& text, const std::string& basepoint) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!detail::trim(line).empty()) lines.push_back(line);
  }
  if (lines.size() < 2) throw InputError("CSV needs a header row and at least one data row");
  std::vector<std::string> names = detail::split_csv_line(lines[0]);
  const size_t n = names.size();
  if (lines.size() != n + 1)
    throw InputError("CSV has " + std::to_string(lines.size() - 1) + " data rows for " +
                     std::to_string(n) + " points");
  std::vector<S> table;
  table.reserve(n * n);
  for (size_t r = 1; r < lines.size(); ++r) {
    auto cells = detail::split_csv_line(lines[r]);
    if (cells.size() != n)
      throw InputError("CSV row " + std::to_string(r) + " has " +
                       std::to_string(cells.size()) + " cells, expected " + std::to_string(n));
    for (const auto& cell : cells) {
      auto v = parse_scalar<S>(cell);
      if (!v) throw InputError("CSV cell '" + cell + "' is not a number or 'p/q'");
      table.push_back(*v);
    }
  }
  int base_idx = -1;
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == basepoint) base_idx = static_cast<int>(i);
  if (base_idx < 0)
    throw InputError("basepoint '" + basepoint + "' does not appear in the CSV header");
  return make_space<S>(std::move(names), std::move(table), base_idx);
}

// ---------------------------------------------------------------------------
// embeddings

template <class S>
ojson embedding_to_json(const Embedding<S>& e) {
  const auto& m = e.space;
  ojson j;
  j["schema_version"] = schema_version;
  j["kind"] = "embedding";
  j["arith"] = scalar_traits<S>::mode_name();
  j["scale"] = scalar_to_json<S>(e.scale);
  j["basepoint"] = m.points[m.basepoint];
  j["space"] = space_to_json(m);
  ojson shells;
  for (int i = 0; i < m.size(); ++i) {
    if (!e.shells.entries[i]) continue;
    ojson cell;
    cell["n"] = e.shells.entries[i]->shell;
    cell["lambda"] = scalar_to_json<S>(e.shells.entries[i]->lambda);
    shells[m.points[i]] = std::move(cell);
  }
  j["shells"] = std::move(shells);
  ojson ops = ojson::array();
  for (const auto& op : e.operators) {
    ojson o;
    o["shell"] = op.shell;
    o["mode"] = to_string(op.mode);
    o["seed"] = op.seed;
    ojson ball_names = ojson::array();
    for (int idx : *op.support) ball_names.push_back(m.points[idx]);
    o["ball"] = std::move(ball_names);
    o["norm_bound"] = scalar_to_json<S>(op.norm_bound);
    o["conorm_bound"] = scalar_to_json<S>(op.conorm_bound);
    if (op.matrix) {
      ojson rows = ojson::array();
      for (int r = 0; r < op.matrix->n; ++r) {
        ojson row = ojson::array();
        for (int c = 0; c < op.matrix->n; ++c)
          row.push_back(scalar_to_json<S>(op.matrix->at(r, c)));
        rows.push_back(std::move(row));
      }
      o["matrix"] = std::move(rows);
    }
    ops.push_back(std::move(o));
  }
  j["operators"] = std::move(ops);
  ojson image;
  for (int i = 0; i < m.size(); ++i) {
    ojson blocks;
    for (const auto& [nblk, vec] : e.image_of(i).blocks) {
      ojson cell;
      for (size_t k = 0; k < vec.support->size(); ++k)
        cell[m.points[(*vec.support)[k]]] = scalar_to_json<S>(vec.values[k]);
      blocks[std::to_string(nblk)] = std::move(cell);
    }
    image[m.points[i]] = std::move(blocks);
  }
  j["image"] = std::move(image);
  return j;
}

template <class S>
Embedding<S> embedding_from_json(const ojson& j) {
  if (j.value("kind", "") != "embedding") throw InputError("not an embedding document");
  Embedding<S> e;
  e.space = space_table_from_json<S>(j.at("space"));
  e.scale = scalar_from_json<S>(j.at("scale"));
  const auto& m = e.space;

  for (const auto& o : j.at("operators")) {
    BlockOperator<S> op;
    op.shell = o.at("shell").get<int>();
    auto mode = operator_mode_from(o.at("mode").get<std::string>());
    if (!mode) throw InputError("unknown operator mode '" + o.at("mode").dump() + "'");
    op.mode = *mode;
    op.seed = o.value("seed", 0ULL);
    std::vector<int> support;
    for (const auto& nm : o.at("ball")) {
      int idx = m.index_of(nm.get<std::string>());
      if (idx < 0) throw InputError("operator ball names unknown point '" +
                                    nm.get<std::string>() + "'");
      support.push_back(idx);
    }
    op.support = std::make_shared<const std::vector<int>>(std::move(support));
    op.norm_bound = scalar_from_json<S>(o.at("norm_bound"));
    op.conorm_bound = scalar_from_json<S>(o.at("conorm_bound"));
    if (op.mode == OperatorMode::half) {
      // nothing stored; bounds already carried
    } else if (op.mode == OperatorMode::random) {
      if (!o.contains("matrix"))
        throw InputError("random operator for shell " + std::to_string(op.shell) +
                         " lacks its matrix");
      Matrix<S> mat;
      mat.n = static_cast<int>(op.support->size());
      for (const auto& row : o.at("matrix"))
        for (const auto& cell : row) mat.a.push_back(scalar_from_json<S>(cell));
      if (mat.a.size() != static_cast<size_t>(mat.n) * mat.n)
        throw InputError("operator matrix shape mismatch for shell " +
                         std::to_string(op.shell));
      op.matrix = std::move(mat);
    }
    e.operators.push_back(std::move(op));
  }

  e.shells.entries.resize(m.size());
  const ojson& shells = j.at("shells");
  for (int i = 0; i < m.size(); ++i) {
    if (i == m.basepoint) continue;
    auto it = shells.find(m.points[i]);
    if (it == shells.end())
      throw InputError("embedding lacks a shell entry for point '" + m.points[i] + "'");
    ShellInfo<S> info;
    info.shell = it->at("n").template get<int>();
    info.lambda = scalar_from_json<S>(it->at("lambda"));
    if (info.shell < 0 || !(info.lambda > S{0}) || !(info.lambda <= S{1}))
      throw InputError("shell entry for '" + m.points[i] + "' is out of range");
    e.shells.entries[i] = info;
    e.shells.max_shell = std::max(e.shells.max_shell, info.shell);
  }

  auto support_of_shell = [&](int shell) -> Support {
    for (const auto& op : e.operators)
      if (op.shell == shell) return op.support;
    throw InputError("embedding lacks an operator for shell " + std::to_string(shell));
  };
  const ojson& image = j.at("image");
  e.image.resize(m.size());
  for (int i = 0; i < m.size(); ++i) {
    auto it = image.find(m.points[i]);
    if (it == image.end())
      throw InputError("embedding lacks an image for point '" + m.points[i] + "'");
    for (auto block_it = it->begin(); block_it != it->end(); ++block_it) {
      int shell = std::stoi(block_it.key());
      CoordVector<S> vec;
      vec.support = support_of_shell(shell);
      vec.values.reserve(vec.support->size());
      for (int idx : *vec.support) {
        auto cell = block_it->find(m.points[idx]);
        if (cell == block_it->end())
          throw InputError("image block " + block_it.key() + " of '" + m.points[i] +
                           "' misses coordinate '" + m.points[idx] + "'");
        vec.values.push_back(scalar_from_json<S>(*cell));
      }
      if (block_it->size() != vec.support->size())
        throw InputError("image block " + block_it.key() + " of '" + m.points[i] +
                         "' has extra coordinates");
      e.image[i].blocks.emplace(shell, std::move(vec));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// reports

template <class S>
ojson distortion_to_json(const DistortionReport<S>& r, const MetricSpace<S>& m) {
  ojson j;
  j["schema_version"] = schema_version;
  j["kind"] = "distortion_report";
  j["arith"] = scalar_traits<S>::mode_name();
  j["pair_count"] = r.pair_count;
  j["injective"] = r.injective;
  if (!r.injective)
    j["collision"] = ojson::array({m.points[r.collision_i], m.points[r.collision_j]});
  j["lip"] = scalar_to_json<S>(r.lip);
  j["lip_witness"] = ojson::array({m.points[r.lip_i], m.points[r.lip_j]});
  if (r.injective) {
    j["colip"] = scalar_to_json<S>(r.colip);
    j["colip_witness"] = ojson::array({m.points[r.colip_i], m.points[r.colip_j]});
    j["dist"] = scalar_to_json<S>(r.dist);
  } else {
    j["colip"] = "inf";
    j["dist"] = "inf";
  }
  ojson bounds;
  bounds["lip_le_9"] = r.lip_bound_ok;
  bounds["colip_le_24"] = r.colip_bound_ok;
  bounds["dist_le_216"] = r.dist_bound_ok;
  bounds["pass"] = r.pass();
  j["bounds"] = std::move(bounds);
  return j;
}

template <class S>
ojson pair_certificate_to_json(const PairCertificate<S>& c, const MetricSpace<S>& m,
                               bool failed_checks_only) {
  ojson j;
  j["t"] = m.points[c.i];
  j["t_prime"] = m.points[c.j];
  j["d"] = scalar_to_json<S>(c.d);
  j["image_dist"] = scalar_to_json<S>(c.image_dist);
  j["lip_case"] = to_label(c.lip_case);
  j["inv_case"] = to_label(c.inv_case);
  j["pass"] = c.pass;
  ojson checks = ojson::array();
  for (const auto& chk : c.checks) {
    if (failed_checks_only && chk.pass) continue;
    ojson one;
    one["label"] = chk.label;
    one["relation"] = chk.rel == 'L' ? "<=" : chk.rel == 'G' ? ">=" : "==";
    one["lhs"] = scalar_to_json<S>(chk.lhs);
    one["rhs"] = scalar_to_json<S>(chk.rhs);
    one["pass"] = chk.pass;
    checks.push_back(std::move(one));
  }
  j[failed_checks_only ? "failed_checks" : "checks"] = std::move(checks);
  return j;
}

template <class S>
ojson verification_to_json(const CaseLedger<S>& ledger, const EnvelopeReport<S>& env,
                           const ModuliProfile<S>& prof, const MetricSpace<S>& m) {
  ojson j;
  j["schema_version"] = schema_version;
  j["kind"] = "verification_report";
  j["arith"] = scalar_traits<S>::mode_name();

  ojson cases;
  cases["pair_count"] = ledger.pair_count;
  cases["all_pass"] = ledger.all_pass;
  ojson lipc, invc;
  const char* lip_names[] = {"basepoint", "radial_gap", "same_shell", "adjacent_shell"};
  const char* inv_names[] = {"basepoint", "same_shell", "adjacent_shell", "split_shell"};
  for (size_t k = 0; k < 4; ++k) {
    lipc[lip_names[k]] = ledger.lip_counts[k];
    invc[inv_names[k]] = ledger.inv_counts[k];
  }
  cases["lip_cases"] = std::move(lipc);
  cases["inv_cases"] = std::move(invc);
  ojson failures = ojson::array();
  for (const auto& f : ledger.failures)
    failures.push_back(pair_certificate_to_json(f, m, /*failed_checks_only=*/true));
  cases["failures"] = std::move(failures);
  j["cases"] = std::move(cases);

  ojson envelope;
  envelope["ok"] = env.ok;
  if (env.has_points) {
    envelope["min_ratio"] = scalar_to_json<S>(env.min_ratio);
    envelope["min_witness"] = m.points[env.min_i];
    envelope["max_ratio"] = scalar_to_json<S>(env.max_ratio);
    envelope["max_witness"] = m.points[env.max_i];
  }
  j["envelope"] = std::move(envelope);

  ojson mod;
  mod["ok"] = prof.pass();
  mod["monotone"] = prof.monotone;
  ojson entries = ojson::array();
  for (const auto& entry : prof.entries) {
    ojson one;
    one["t"] = scalar_to_json<S>(entry.threshold);
    one["rho"] = entry.rho_finite ? scalar_to_json<S>(entry.rho) : ojson("inf");
    one["omega"] = scalar_to_json<S>(entry.omega);
    one["omega_le_9t"] = entry.omega_bound_ok;
    one["rho_ge_t_over_24"] = entry.rho_bound_ok;
    entries.push_back(std::move(one));
  }
  mod["entries"] = std::move(entries);
  j["moduli"] = std::move(mod);

  j["pass"] = ledger.all_pass && env.ok && prof.pass();
  return j;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace detail

// One row per unordered pair: t, t', d, ||f(t)-f(t')||, cases, pass flags.
template <class S>
std::string ledger_to_csv(const CaseLedger<S>& ledger, const MetricSpace<S>& m) {
  std::ostringstream os;
  os << "t,t_prime,d,image_dist,lip_case,inv_case,lip_pass,inv_pass\n";
  for (const auto& c : ledger.entries) {
    os << detail::csv_escape(m.points[c.i]) << "," << detail::csv_escape(m.points[c.j]) << ","
       << to_string_scalar(c.d) << "," << to_string_scalar(c.image_dist) << ","
       << to_label(c.lip_case) << "," << to_label(c.inv_case) << ","
       << (c.lip_pass() ? "1" : "0") << "," << (c.inv_pass() ? "1" : "0") << "\n";
  }
  return os.str();
}

template <class S>
ojson amalgam_certificate_to_json(const AmalgamSpace<S>& a,
                                  const std::vector<MetricSpace<S>>& parts) {
  ojson j;
  j["schema_version"] = schema_version;
  j["kind"] = "amalgam_certificate";
  j["parts"] = parts.size();
  ojson devs = ojson::array();
  S worst{0};
  for (size_t p = 0; p < parts.size(); ++p) {
    S dev = part_isometry_defect(a, parts[p], static_cast<int>(p) + 1);
    if (dev > worst) worst = dev;
    devs.push_back(scalar_to_json<S>(dev));
  }
  j["per_part_max_deviation"] = std::move(devs);
  j["max_deviation"] = scalar_to_json<S>(worst);
  j["isometric"] = worst == S{0};
  return j;
}

template <class S>
ojson profile_to_json(const GeometryProfile<S>& prof) {
  ojson j;
  j["schema_version"] = schema_version;
  j["kind"] = "geometry_profile";
  ojson radii = ojson::array();
  for (const auto& r : prof.radii) radii.push_back(scalar_to_json<S>(r));
  j["radii"] = std::move(radii);
  j["counts"] = prof.counts;
  return j;
}

}  // namespace linfembed
