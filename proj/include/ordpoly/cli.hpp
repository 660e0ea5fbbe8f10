#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ordpoly/extensions.hpp"
#include "ordpoly/sampler.hpp"

namespace ordpoly::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitContradiction = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitInput = 3;

struct QueryRequest {
  /// check | close | decompose | dim | volume | interpolate | marginal | topk | sample
  std::string command;
  /// Constraint file, or "-" for standard input.
  std::string input_path;
  /// Variables to report (interpolate) or the variable of a marginal; empty means all.
  std::vector<std::string> variables;
  /// topk selection; empty selects every variable.
  std::vector<std::string> selection;
  std::size_t k = 1;
  std::string semantics = "local";
  std::string scheme = "uniform";
  std::string engine = "auto";
  bool containment = false;
  std::size_t count = 10;
  std::uint64_t max_extensions = kDefaultMaxExtensions;
  unsigned threads = 1;
  SamplerConfig sampler;
  /// When set, the per-extension volume table is written there as JSON lines.
  std::optional<std::string> dump_extensions;
};

struct QueryResponse {
  int exit_code = kExitOk;
  /// Written to standard output (or the --output file); null when the query failed.
  nlohmann::json result;
  /// Written to standard error; null on success.
  nlohmann::json error;
};

/// Runs one query. Never throws for query failures; they are reported through
/// exit_code and error.
QueryResponse run(const QueryRequest& request);

/// Command-line entry point of the `ordpoly` tool.
int main_entry(int argc, char** argv);

}  // namespace ordpoly::cli
