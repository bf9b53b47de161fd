#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "selfcomm/spectral.hpp"

namespace selfcomm::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kPass = 0,
  kInputError = 1,
  kInvariantFailure = 2,
};

struct DecomposeArgs {
  std::filesystem::path input;
  std::filesystem::path out;
  bool recenter = false;
  std::optional<Index> projection;  // column of the ascending eigenbasis
  Tolerances tol;
};

/// Writes A.json, B.json, U.json, Y.json and report.json into `out`.
int cmd_decompose(const DecomposeArgs& args, std::ostream& log);

struct VerifyArgs {
  std::filesystem::path x;
  std::optional<std::filesystem::path> a, b, u, y;
  std::optional<std::filesystem::path> report;
  Tolerances tol;
};

/// Re-checks a claimed decomposition {A, B, U} and/or witness {Y} of X from
/// the files alone.
int cmd_verify(const VerifyArgs& args, std::ostream& log);

struct PipelineArgs {
  std::filesystem::path input;
  std::filesystem::path out;
  std::vector<Index> schedule;
  unsigned workers = 1;
  Tolerances tol;
};

/// Writes pipeline.csv and report.json into `out`.
int cmd_pipeline(const PipelineArgs& args, std::ostream& log);

struct QuantizeArgs {
  std::filesystem::path input;
  Index n = 2;
  std::optional<std::filesystem::path> out;  // stdout when absent
};

int cmd_quantize(const QuantizeArgs& args, std::ostream& out, std::ostream& log);

struct EquivArgs {
  std::filesystem::path a, b;
  std::optional<std::size_t> approx;  // moment order, defaults to dim
  double tol = 1e-9;
  std::optional<std::filesystem::path> report;
};

int cmd_equiv(const EquivArgs& args, std::ostream& log);

struct WitnessArgs {
  std::filesystem::path a, u;
  std::optional<std::filesystem::path> x;  // verify the witness against X
  std::optional<double> t;
  std::filesystem::path out;
  Tolerances tol;
};

int cmd_witness(const WitnessArgs& args, std::ostream& log);

/// Parses "2,4,8" into a schedule. Throws InvalidArgument.
std::vector<Index> parse_schedule(const std::string& text);

}  // namespace selfcomm::cli
