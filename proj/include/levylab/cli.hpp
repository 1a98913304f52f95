#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace levylab {

struct CliRequest {
  std::string subcommand; // check-psi | sample | krylov | resolvent | converge
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

/// Runs one subcommand and writes its CSV files plus SUMMARY.csv.
/// Returns 0 when every verdict passes, 1 when one fails, 2 on a usage,
/// configuration or precondition error.
int run(const CliRequest &request, std::ostream &log, std::ostream &err);

/// argv front end for run().
int run_cli(int argc, char **argv);

} // namespace levylab
