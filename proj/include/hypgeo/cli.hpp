#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hypgeo::cli {

// Shared command-line options; per-command settings live in the JSON config
// and the flags here override matching config fields.
struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<double> slack;
  std::optional<int> budget_radius;
  std::optional<std::vector<double>> grid;
};

// Each returns a process exit code:
//   0 success, 1 invalid representation / failed certificate,
//   2 validation or malformed config, 3 enumeration budget exhausted,
//   4 solver failure.
int run_surface(const RunOptions& opts);
int run_verify_lemma(const RunOptions& opts);
int run_ukmap(const RunOptions& opts);
int run_project(const RunOptions& opts);
int run_duality(const RunOptions& opts);

}  // namespace hypgeo::cli
