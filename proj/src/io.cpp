#include "selfcomm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace selfcomm::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

void require_schema(const json& j) {
  if (!j.is_object()) parse_error("top-level value must be an object");
  if (!j.contains("schema_version") || !j["schema_version"].is_string()) parse_error("missing schema_version");
  if (j["schema_version"].get<std::string>() != kSchemaVersion) {
    parse_error("unsupported schema_version " + j["schema_version"].get<std::string>());
  }
}

double number(const json& v, const char* what) {
  if (!v.is_number()) parse_error(std::string(what) + " must be a number");
  return v.get<double>();
}

}  // namespace

json matrix_to_json(const Matrix& m, bool hermitian) {
  json entries = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return json{{"schema_version", kSchemaVersion}, {"dim", m.rows()}, {"hermitian", hermitian}, {"entries", entries}};
}

Matrix matrix_from_json(const json& j, bool enforce_hint, bool* hermitian_hint) {
  require_schema(j);
  if (!j.contains("dim") || !j["dim"].is_number_integer()) parse_error("dim must be an integer");
  const auto dim = j["dim"].get<long long>();
  if (dim < 1) parse_error("dim must be >= 1");
  if (!j.contains("entries") || !j["entries"].is_array()) parse_error("entries must be an array");
  const json& entries = j["entries"];
  if (entries.size() != static_cast<std::size_t>(dim * dim)) {
    parse_error("expected " + std::to_string(dim * dim) + " entries, found " + std::to_string(entries.size()));
  }
  const bool hint = j.value("hermitian", false);
  if (hermitian_hint) *hermitian_hint = hint;

  Matrix m(dim, dim);
  for (Index k = 0; k < dim * dim; ++k) {
    const json& e = entries[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2) parse_error("entry " + std::to_string(k) + " must be [re, im]");
    m(k / dim, k % dim) = Complex(number(e[0], "re"), number(e[1], "im"));
  }
  if (hint && enforce_hint) (void)HermitianMatrix(m);
  return m;
}

json element_to_json(const SpectralElement& elem) {
  json atoms = json::array();
  for (const auto& a : elem.atoms()) atoms.push_back({{"alpha", a.alpha}, {"mu", a.mu}});
  return json{{"schema_version", kSchemaVersion}, {"atoms", atoms}};
}

SpectralElement element_from_json(const json& j, std::vector<std::string>* warnings) {
  require_schema(j);
  if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty()) parse_error("atoms must be a non-empty array");
  std::vector<Atom> atoms;
  double total = 0.0;
  for (const json& a : j["atoms"]) {
    if (!a.is_object() || !a.contains("alpha") || !a.contains("mu")) parse_error("atom needs alpha and mu");
    atoms.push_back({number(a["alpha"], "alpha"), number(a["mu"], "mu")});
    if (!(atoms.back().mu > 0.0)) parse_error("atom weights must be positive");
    total += atoms.back().mu;
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.alpha < y.alpha; });
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i].alpha == atoms[i - 1].alpha) parse_error("duplicate atom value");
  }
  const double drift = std::abs(total - 1.0);
  if (drift > 1e-6) parse_error("atom weights sum to " + format_double(total));
  if (drift > 1e-9 && warnings) warnings->push_back("atom weights sum to " + format_double(total) + "; renormalized");
  if (drift > 0.0) {
    for (auto& a : atoms) a.mu /= total;
  }
  try {
    return SpectralElement(std::move(atoms));
  } catch (const Error& e) {
    parse_error(e.what());
  }
}

json approximation_to_json(const DyadicApproximation& approx) {
  auto vec = [](const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return json{{"schema_version", kSchemaVersion}, {"n", approx.n},
              {"theta", approx.theta},           {"counts", approx.counts},
              {"beta", approx.beta},             {"beta_n", approx.beta_n},
              {"h_diagonal", vec(approx.h_diagonal)}, {"b_diagonal", vec(approx.b_diagonal)}};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

Matrix read_matrix(const std::filesystem::path& path, bool enforce_hint) {
  try {
    return matrix_from_json(read_json(path), enforce_hint);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) parse_error(path.string() + ": " + e.what());
    throw;
  }
}

HermitianMatrix read_hermitian(const std::filesystem::path& path, double tol) {
  return HermitianMatrix(read_matrix(path, false), tol);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m, bool hermitian) {
  write_json(path, matrix_to_json(m, hermitian));
}

SpectralElement read_element(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  return element_from_json(read_json(path), warnings);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pipeline_csv(const std::vector<PipelineStage>& stages) {
  std::string out = "n,delta_q,bound_q,d,bound_d,max_norm,norm_budget,decomposition_pass\n";
  for (const auto& s : stages) {
    const ApproximationRow& r = s.row;
    out += std::to_string(r.n);
    for (double v : {r.delta_q, r.bound_q, r.d, r.bound_d, r.max_norm, r.norm_budget}) {
      out += ',';
      out += format_double(v);
    }
    out += r.decomposition_pass ? ",true\n" : ",false\n";
  }
  return out;
}

std::string file_digest(const std::filesystem::path& path) {
  const std::string bytes = read_text(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "digest failed for " + path.string());
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

void Report::add_input(const std::filesystem::path& path) { inputs[path.string()] = file_digest(path); }

json Report::to_json() const {
  json checks_json = json::array();
  for (const auto& c : checks.checks) {
    // JSON has no NaN or infinity.
    const json residual = std::isfinite(c.residual) ? json(c.residual) : json(format_double(c.residual));
    checks_json.push_back({{"name", c.name}, {"residual", residual}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"inputs", inputs},
              {"checks", checks_json},
              {"pass", pass()},
              {"notes", notes},
              {"timings_ms", timings_ms},
              {"details", details}};
}

}  // namespace selfcomm::io
