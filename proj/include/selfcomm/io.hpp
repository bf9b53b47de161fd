#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "selfcomm/checks.hpp"
#include "selfcomm/ii1.hpp"
#include "selfcomm/spectral.hpp"

namespace selfcomm::io {

inline constexpr std::string_view kSchemaVersion = "1";

// Matrix files: {"schema_version": "1", "dim": n, "hermitian": bool,
//                "entries": [[re, im], ...]}  (row-major, n * n pairs)
nlohmann::json matrix_to_json(const Matrix& m, bool hermitian);
/// Throws ParseError on malformed input. When `enforce_hint` is set and the
/// file claims to be Hermitian, the hermiticity check runs as well.
Matrix matrix_from_json(const nlohmann::json& j, bool enforce_hint = true, bool* hermitian_hint = nullptr);

// Spectral element files: {"schema_version": "1", "atoms": [{"alpha": a, "mu": w}, ...]}
nlohmann::json element_to_json(const SpectralElement& elem);
/// Atoms are sorted by alpha. A weight total off by at most 1e-9 is
/// renormalized silently, up to 1e-6 with a warning appended to `warnings`,
/// beyond that ParseError.
SpectralElement element_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);

nlohmann::json approximation_to_json(const DyadicApproximation& approx);

std::string read_text(const std::filesystem::path& path);
/// Writes `text` followed by nothing else; creates parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

Matrix read_matrix(const std::filesystem::path& path, bool enforce_hint = true);
HermitianMatrix read_hermitian(const std::filesystem::path& path, double tol = Tolerances{}.hermiticity);
void write_matrix(const std::filesystem::path& path, const Matrix& m, bool hermitian);
SpectralElement read_element(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// %.17g; round-trips every finite double.
std::string format_double(double v);

/// Columns: n, delta_q, bound_q, d, bound_d, max_norm, norm_budget, decomposition_pass.
std::string pipeline_csv(const std::vector<PipelineStage>& stages);

/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

/// Machine-readable verification report.
struct Report {
  std::string command;
  std::map<std::string, std::string> inputs;  // path -> digest
  CheckList checks;
  std::vector<std::string> notes;
  std::map<std::string, double> timings_ms;
  nlohmann::json details = nlohmann::json::object();

  bool pass() const { return checks.pass(); }
  void add_input(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

}  // namespace selfcomm::io
