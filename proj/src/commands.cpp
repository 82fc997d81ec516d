#include "linfembed/commands.hpp"

#include <iostream>

#include "linfembed/generate.hpp"
#include "linfembed/io.hpp"

namespace linfembed {

namespace {

Family family_from_config(const RunConfig& cfg) {
  const std::string& f = *cfg.family;
  if (f == "grid") return GridFamily{cfg.dim, cfg.radius};
  if (!cfg.family_seed) throw InputError("family '" + f + "' needs --seed");
  uint64_t seed = *cfg.family_seed;
  if (f == "random_graph") return RandomGraphFamily{cfg.n, cfg.p, seed};
  if (f == "random_tree") return RandomTreeFamily{cfg.n, seed};
  if (f == "uniform_points") return UniformPointsFamily{cfg.n, cfg.dim, seed};
  throw InputError("unknown family '" + f + "' (grid, random_graph, random_tree, uniform_points)");
}

// Everything is parsed exactly first; float mode converts afterwards, so
// both modes see the same inputs.
MetricSpace<Rat> load_space_exact(const RunConfig& cfg) {
  if (cfg.input_path && cfg.family) throw InputError("give either --input or --family, not both");
  if (cfg.family) return generate<Rat>(family_from_config(cfg));
  if (!cfg.input_path) throw InputError("no input: give --input FILE or --family NAME");
  const std::string& path = *cfg.input_path;
  std::string text = read_text_file(path);
  bool is_csv = path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  MetricSpace<Rat> m;
  if (is_csv) {
    if (!cfg.basepoint) throw InputError("CSV input needs --basepoint NAME");
    m = space_from_csv<Rat>(text, *cfg.basepoint);
  } else {
    m = space_from_json<Rat>(parse_json(text, path));
    if (cfg.basepoint) {
      int idx = m.index_of(*cfg.basepoint);
      if (idx < 0) throw InputError("basepoint '" + *cfg.basepoint + "' is not a point");
      m.basepoint = idx;
    }
  }
  return m;
}

MetricSpace<double> to_float_space(const MetricSpace<Rat>& m) {
  MetricSpace<double> out;
  out.points = m.points;
  out.basepoint = m.basepoint;
  out.metadata = m.metadata;
  out.dist.reserve(m.dist.size());
  for (const auto& v : m.dist) out.dist.push_back(to_double(v));
  return out;
}

bool use_rational(const RunConfig& cfg, int points) {
  if (cfg.arith == "rational") return true;
  if (cfg.arith == "float") return false;
  if (cfg.arith == "auto") return points <= 64;
  throw InputError("unknown arith mode '" + cfg.arith + "' (auto, rational, float)");
}

int report_validation_failure(const ValidationReport<Rat>& report, const MetricSpace<Rat>& m) {
  if (!report.structural_ok) {
    std::cerr << "structural error: distance table does not match the point list\n";
    return exit_input;
  }
  std::cerr << "metric validation failed: " << report.violations.size() << " violation(s)\n";
  size_t shown = 0;
  for (const auto& v : report.violations) {
    std::cerr << "  " << describe(v, m) << "\n";
    if (++shown == 10) {
      if (report.violations.size() > shown)
        std::cerr << "  ... " << report.violations.size() - shown << " more\n";
      break;
    }
  }
  return exit_metric;
}

// validate -> rescale -> operators -> embed
template <class S>
Embedding<S> build_embedding(const RunConfig& cfg, const MetricSpace<S>& input) {
  auto mode = operator_mode_from(cfg.operators);
  if (!mode)
    throw InputError("unknown operator mode '" + cfg.operators +
                     "' (identity, half, random)");
  if (*mode == OperatorMode::random && !cfg.operator_seed)
    throw InputError("--operators random needs --operator-seed");
  RescaleResult<S> scaled = rescale_to_unit_gap(input);
  auto ops = make_operators(scaled.space, *mode, cfg.operator_seed.value_or(0));
  return embed(scaled.space, std::move(ops), scaled.scale);
}

template <class S>
int embed_and_report(const RunConfig& cfg, const MetricSpace<S>& input) {
  Embedding<S> e = build_embedding(cfg, input);
  DistortionReport<S> report = distortion(e, cfg.threads);
  write_text_file(cfg.out_embedding, dump_json(embedding_to_json(e)));
  write_text_file(cfg.out_report, dump_json(distortion_to_json(report, e.space)));
  std::cout << "points=" << e.space.size() << " pairs=" << report.pair_count
            << " lip=" << to_string_scalar(report.lip);
  if (report.injective)
    std::cout << " colip=" << to_string_scalar(report.colip)
              << " dist=" << to_string_scalar(report.dist);
  else
    std::cout << " colip=inf dist=inf";
  std::cout << " pass=" << (report.pass() ? "yes" : "no") << "\n";
  if (!report.pass()) {
    std::cerr << "distortion bounds violated (lip<=9, colip<=24, dist<=216)\n";
    return exit_bounds;
  }
  return exit_ok;
}

template <class S>
int verify_embedding(const RunConfig& cfg, const Embedding<S>& e) {
  const bool keep_entries = cfg.full_ledger.has_value();
  CaseLedger<S> ledger = certify_cases(e, keep_entries, cfg.threads);
  EnvelopeReport<S> env = envelope_check(e);
  std::vector<S> ts = cfg.thresholds ? parse_scalar_list<S>(*cfg.thresholds)
                                     : default_thresholds(e);
  ModuliProfile<S> prof = moduli(e, ts, cfg.threads);
  write_text_file(cfg.out_report, dump_json(verification_to_json(ledger, env, prof, e.space)));
  if (keep_entries) write_text_file(*cfg.full_ledger, ledger_to_csv(ledger, e.space));
  std::cout << "pairs=" << ledger.pair_count << " cases_pass=" << (ledger.all_pass ? "yes" : "no")
            << " envelope=" << (env.ok ? "ok" : "violated")
            << " moduli=" << (prof.pass() ? "ok" : "violated") << "\n";
  if (!ledger.all_pass) {
    const auto& f = ledger.failures.front();
    std::cerr << "inequality failure at pair (" << e.space.points[f.i] << ","
              << e.space.points[f.j] << ")";
    for (const auto& chk : f.checks)
      if (!chk.pass) {
        std::cerr << ": " << chk.label << " " << to_string_scalar(chk.lhs)
                  << (chk.rel == 'L' ? " <= " : chk.rel == 'G' ? " >= " : " == ")
                  << to_string_scalar(chk.rhs);
        break;
      }
    std::cerr << "\n";
    return exit_bounds;
  }
  if (!env.ok || !prof.pass()) {
    std::cerr << (!env.ok ? "norm envelope violated\n" : "moduli bounds violated\n");
    return exit_bounds;
  }
  return exit_ok;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_input;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_input;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_input;
  } catch (const CertificationError& e) {
    std::cerr << "operator certification failed: " << e.what() << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

}  // namespace

int run_embed(const RunConfig& cfg) {
  return guarded([&] {
    MetricSpace<Rat> exact = load_space_exact(cfg);
    ValidationReport<Rat> report = validate(exact);
    if (!report.ok()) return report_validation_failure(report, exact);
    if (use_rational(cfg, exact.size())) return embed_and_report<Rat>(cfg, exact);
    return embed_and_report<double>(cfg, to_float_space(exact));
  });
}

int run_verify(const RunConfig& cfg) {
  return guarded([&] {
    if (cfg.embedding_path) {
      ojson j = parse_json(read_text_file(*cfg.embedding_path), *cfg.embedding_path);
      if (j.value("arith", "") == "rational")
        return verify_embedding<Rat>(cfg, embedding_from_json<Rat>(j));
      return verify_embedding<double>(cfg, embedding_from_json<double>(j));
    }
    MetricSpace<Rat> exact = load_space_exact(cfg);
    ValidationReport<Rat> report = validate(exact);
    if (!report.ok()) return report_validation_failure(report, exact);
    if (use_rational(cfg, exact.size())) {
      Embedding<Rat> e = build_embedding(cfg, exact);
      return verify_embedding<Rat>(cfg, e);
    }
    Embedding<double> e = build_embedding(cfg, to_float_space(exact));
    return verify_embedding<double>(cfg, e);
  });
}

int run_generate(const RunConfig& cfg) {
  return guarded([&] {
    if (!cfg.family) throw InputError("generate needs --family");
    MetricSpace<Rat> m = generate<Rat>(family_from_config(cfg));
    ValidationReport<Rat> report = validate(m);
    if (!report.ok()) return report_validation_failure(report, m);
    if (use_rational(cfg, m.size()))
      write_text_file(cfg.out_space, dump_json(space_to_json(m)));
    else
      write_text_file(cfg.out_space, dump_json(space_to_json(to_float_space(m))));
    std::cout << "generated " << m.size() << " points -> " << cfg.out_space << "\n";
    return exit_ok;
  });
}

int run_amalgamate(const RunConfig& cfg) {
  return guarded([&] {
    if (cfg.parts.empty()) throw InputError("amalgamate needs at least one part file");
    std::vector<MetricSpace<Rat>> parts;
    int total = 0;
    for (const auto& path : cfg.parts) {
      MetricSpace<Rat> part = space_from_json<Rat>(parse_json(read_text_file(path), path));
      ValidationReport<Rat> rep = validate(part);
      if (!rep.ok()) {
        std::cerr << "part '" << path << "':\n";
        return report_validation_failure(rep, part);
      }
      total += part.size();
      parts.push_back(std::move(part));
    }
    AmalgamSpace<Rat> a = amalgamate(parts);
    ValidationReport<Rat> rep = validate(a.composite);
    if (!rep.ok()) return report_validation_failure(rep, a.composite);
    ojson cert = amalgam_certificate_to_json(a, parts);
    if (use_rational(cfg, total))
      write_text_file(cfg.out_space, dump_json(space_to_json(a.composite)));
    else
      write_text_file(cfg.out_space, dump_json(space_to_json(to_float_space(a.composite))));
    if (cfg.out_cert) write_text_file(*cfg.out_cert, dump_json(cert));
    bool isometric = cert.at("isometric").get<bool>();
    std::cout << "amalgam of " << parts.size() << " parts, " << a.composite.size()
              << " points, max isometry deviation "
              << cert.at("max_deviation").get<std::string>() << "\n";
    return isometric ? exit_ok : exit_bounds;
  });
}

int run_profile(const RunConfig& cfg) {
  return guarded([&] {
    if (!cfg.radii) throw InputError("profile needs --radii r1,r2,...");
    MetricSpace<Rat> m = load_space_exact(cfg);
    ValidationReport<Rat> report = validate(m);
    if (!report.ok()) return report_validation_failure(report, m);
    std::vector<Rat> radii = parse_scalar_list<Rat>(*cfg.radii);
    GeometryProfile<Rat> prof = geometry_profile(m, radii);
    std::string doc = dump_json(profile_to_json(prof));
    if (cfg.out_profile) {
      write_text_file(*cfg.out_profile, doc);
    } else {
      std::cout << doc;
    }
    return exit_ok;
  });
}

}  // namespace linfembed
