#include <string>

#include <CLI11.hpp>

#include "linfembed/commands.hpp"

namespace {

void add_input_options(CLI::App* cmd, linfembed::RunConfig& cfg) {
  cmd->add_option("--input", cfg.input_path,
                  "space file: .csv distance matrix, or JSON (distance table / weighted graph)");
  cmd->add_option("--basepoint", cfg.basepoint,
                  "basepoint name (required for CSV, overrides JSON)");
  cmd->add_option("--family", cfg.family,
                  "generator family: grid, random_graph, random_tree, uniform_points");
  cmd->add_option("--dim", cfg.dim, "grid / uniform_points dimension");
  cmd->add_option("--radius", cfg.radius, "grid radius");
  cmd->add_option("--n", cfg.n, "point / node count for random families");
  cmd->add_option("--p", cfg.p, "edge probability for random_graph");
  cmd->add_option("--seed", cfg.family_seed, "generator seed (required for random families)");
  cmd->add_option("--arith", cfg.arith,
                  "arithmetic: auto (rational up to 64 points), rational, float");
}

void add_operator_options(CLI::App* cmd, linfembed::RunConfig& cfg) {
  cmd->add_option("--operators", cfg.operators, "block operators: identity, half, random");
  cmd->add_option("--operator-seed", cfg.operator_seed, "seed for random operators");
  cmd->add_option("--threads", cfg.threads, "worker threads for pair scans (0 = auto)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Constructive bi-Lipschitz embeddings of finite pointed metric spaces into "
      "sup-norm block sums, with exact distortion measurement and inequality "
      "certification."};
  app.require_subcommand(1);
  linfembed::RunConfig cfg;

  CLI::App* generate = app.add_subcommand("generate", "emit a metric space file");
  add_input_options(generate, cfg);
  generate->add_option("--out", cfg.out_space, "output space file");

  CLI::App* embed = app.add_subcommand("embed", "build the embedding and measure distortion");
  add_input_options(embed, cfg);
  add_operator_options(embed, cfg);
  embed->add_option("--out-embedding", cfg.out_embedding, "serialized embedding path");
  embed->add_option("--out-report", cfg.out_report, "distortion report path");

  CLI::App* verify =
      app.add_subcommand("verify", "certify every case inequality, envelope and moduli");
  add_input_options(verify, cfg);
  add_operator_options(verify, cfg);
  verify->add_option("--embedding", cfg.embedding_path,
                     "verify a serialized embedding instead of re-embedding");
  verify->add_option("--out-report", cfg.out_report, "verification report path");
  verify->add_option("--full-ledger", cfg.full_ledger, "write one CSV row per pair");
  verify->add_option("--thresholds", cfg.thresholds,
                     "comma-separated moduli thresholds (default: 20 samples)");

  CLI::App* amalgamate =
      app.add_subcommand("amalgamate", "glue part spaces into one locally finite space");
  amalgamate->add_option("parts", cfg.parts, "part space files (JSON)");
  amalgamate->add_option("--out", cfg.out_space, "composite space path");
  amalgamate->add_option("--cert", cfg.out_cert, "isometry certificate path");
  amalgamate->add_option("--arith", cfg.arith, "arithmetic for the emitted file");

  CLI::App* profile = app.add_subcommand("profile", "ball-growth profile C(r)");
  add_input_options(profile, cfg);
  profile->add_option("--radii", cfg.radii, "comma-separated radii (required)");
  profile->add_option("--out", cfg.out_profile, "profile path (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : linfembed::exit_input;
  }

  if (generate->parsed()) return linfembed::run_generate(cfg);
  if (embed->parsed()) return linfembed::run_embed(cfg);
  if (verify->parsed()) return linfembed::run_verify(cfg);
  if (amalgamate->parsed()) return linfembed::run_amalgamate(cfg);
  if (profile->parsed()) return linfembed::run_profile(cfg);
  return linfembed::exit_input;
}
