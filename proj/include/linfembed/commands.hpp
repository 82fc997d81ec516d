#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace linfembed {

// Exit codes shared by every subcommand:
//   0 success, 1 operational failure, 2 input error,
//   3 metric validation failure, 4 certified-bound violation.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_input = 2;
inline constexpr int exit_metric = 3;
inline constexpr int exit_bounds = 4;

struct RunConfig {
  // input: exactly one of input_path / family (verify also accepts embedding_path)
  std::optional<std::string> input_path;
  std::optional<std::string> family;
  int dim = 2;
  int radius = 2;
  int n = 16;
  double p = 0.2;
  std::optional<uint64_t> family_seed;

  std::optional<std::string> basepoint;  // required for CSV, overrides JSON
  std::string operators = "identity";
  std::optional<uint64_t> operator_seed;  // required iff operators == random
  std::string arith = "auto";             // auto | rational | float
  int threads = 0;

  std::string out_embedding = "embedding.json";
  std::string out_report = "report.json";
  std::string out_space = "space.json";
  std::optional<std::string> out_cert;
  std::optional<std::string> full_ledger;
  std::optional<std::string> embedding_path;
  std::optional<std::string> thresholds;  // comma-separated list
  std::optional<std::string> radii;       // comma-separated list (profile)
  std::optional<std::string> out_profile;  // stdout when absent
  std::vector<std::string> parts;          // amalgamate inputs
};

int run_embed(const RunConfig& cfg);
int run_verify(const RunConfig& cfg);
int run_generate(const RunConfig& cfg);
int run_amalgamate(const RunConfig& cfg);
int run_profile(const RunConfig& cfg);

}  // namespace linfembed
