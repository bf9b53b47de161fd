#include "selfcomm/commands.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <ostream>
#include <sstream>

#include "selfcomm/decompose.hpp"
#include "selfcomm/equiv.hpp"
#include "selfcomm/ii1.hpp"
#include "selfcomm/io.hpp"

namespace selfcomm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::InternalInvariantBroken ? kInvariantFailure : kInputError;
}

int guarded(const std::function<int()>& body, std::ostream& log) {
  try {
    return body();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kInputError;
  }
}

void append(CheckList& into, const CheckList& from, const std::string& prefix = "") {
  for (const auto& c : from.checks) into.add(prefix + c.name, c.residual, c.tolerance);
}

int finish(const io::Report& report, std::ostream& log) {
  for (const auto& note : report.notes) log << "note: " << note << "\n";
  for (const auto& c : report.checks.checks) {
    log << (c.pass() ? "PASS " : "FAIL ") << c.name << " residual=" << io::format_double(c.residual)
        << " tol=" << io::format_double(c.tolerance) << "\n";
  }
  log << (report.pass() ? "result: pass" : "result: FAIL") << "\n";
  return report.pass() ? kPass : kInvariantFailure;
}

json sorted_spectrum(const HermitianMatrix& m) {
  const RealVector ev = eigenvalues(m);
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

json trace_to_json(const std::vector<RecursionLevel>& levels) {
  json out = json::array();
  for (const auto& l : levels) {
    out.push_back({{"p_slot", l.p_slot},
                   {"q_slot", l.q_slot},
                   {"alpha_i0", l.alpha_i0},
                   {"alpha_i1", l.alpha_i1},
                   {"corner_trace", l.corner_trace}});
  }
  return out;
}

}  // namespace

std::vector<Index> parse_schedule(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad schedule entry '" + item + "'");
    }
    if (used != item.size() || v < 2) throw Error(ErrorCode::InvalidArgument, "bad schedule entry '" + item + "'");
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty schedule");
  return out;
}

int cmd_decompose(const DecomposeArgs& args, std::ostream& log) {
  return guarded([&] {
    Stopwatch clock;
    io::Report report;
    report.command = "decompose";
    const HermitianMatrix x = io::read_hermitian(args.input, args.tol.hermiticity);
    report.add_input(args.input);

    CommutatorDecomposition dec;
    std::optional<Projection> p;
    if (args.projection) {
      const Index n = x.dim();
      const double shift = args.recenter ? normalized_trace(x) : 0.0;
      const HermitianMatrix target(Matrix(x.matrix() - shift * Matrix::Identity(n, n)));
      const SpectralDecomposition sd = eigendecompose(target, args.tol);
      if (*args.projection < 0 || *args.projection >= n) {
        throw Error(ErrorCode::InvalidArgument, "--projection must index an eigenvector in [0, n)");
      }
      p = Projection::from_basis(sd.basis.col(*args.projection), n);
      dec = decompose_with_projection(target, *p, args.tol);
      dec.recentered_by = shift;
    } else {
      dec = decompose_traceless(x, args.tol, args.recenter);
      p = dec.avoided_projection();
    }
    const double decompose_ms = clock.elapsed_ms();

    const Index n = x.dim();
    const HermitianMatrix target(Matrix(x.matrix() - dec.recentered_by * Matrix::Identity(n, n)));
    const HermitianMatrix a = dec.a();
    const HermitianMatrix b = dec.b();
    const Matrix u = dec.u();
    const Witness w = build_witness(dec, std::nullopt, args.tol);

    append(report.checks, verify_decomposition(target, a, b, u, p ? &*p : nullptr, args.tol));
    append(report.checks, verify_witness(target.matrix(), w.y, args.tol).checks);

    io::write_matrix(args.out / "A.json", a.matrix(), true);
    io::write_matrix(args.out / "B.json", b.matrix(), true);
    io::write_matrix(args.out / "U.json", u, false);
    io::write_matrix(args.out / "Y.json", w.y, false);

    if (dec.recentered_by != 0.0) report.notes.push_back("input recentered by trace/n = " + io::format_double(dec.recentered_by));
    report.details = {{"dim", n},
                      {"recentered_by", dec.recentered_by},
                      {"witness_shift", w.t},
                      {"avoided_slot", dec.avoided_slot.value_or(-1)},
                      {"basis_trace", trace_to_json(dec.basis_trace)},
                      {"a_spectrum", sorted_spectrum(a)},
                      {"b_spectrum", sorted_spectrum(b)}};
    report.timings_ms = {{"decompose", decompose_ms}, {"total", clock.elapsed_ms()}};
    io::write_json(args.out / "report.json", report.to_json());
    return finish(report, log);
  }, log);
}

int cmd_verify(const VerifyArgs& args, std::ostream& log) {
  return guarded([&] {
    Stopwatch clock;
    io::Report report;
    report.command = "verify";
    const HermitianMatrix x = io::read_hermitian(args.x, args.tol.hermiticity);
    report.add_input(args.x);
    const Index n = x.dim();

    const bool any_abu = args.a || args.b || args.u;
    const bool all_abu = args.a && args.b && args.u;
    if ((any_abu && !all_abu) || (!all_abu && !args.y)) {
      throw Error(ErrorCode::InvalidArgument, "verify needs all of --a --b --u, or --y, or both");
    }
    auto load = [&](const fs::path& path) {
      Matrix m = io::read_matrix(path, false);
      if (m.rows() != n) throw Error(ErrorCode::DimensionMismatch, path.string() + " does not match X");
      report.add_input(path);
      return m;
    };

    if (all_abu) {
      const Matrix am = load(*args.a);
      const Matrix bm = load(*args.b);
      const Matrix um = load(*args.u);
      for (const auto& [name, m] : {std::pair<const char*, const Matrix*>{"hermiticity_A", &am}, {"hermiticity_B", &bm}}) {
        report.checks.add(name, (*m - m->adjoint()).norm(), args.tol.hermiticity * (1.0 + m->norm()));
      }
      const HermitianMatrix a(Matrix((am + am.adjoint()) / 2.0));
      const HermitianMatrix b(Matrix((bm + bm.adjoint()) / 2.0));
      append(report.checks, verify_decomposition(x, a, b, um, nullptr, args.tol));
    }
    if (args.y) {
      const Matrix y = load(*args.y);
      const WitnessReport wr = verify_witness(x.matrix(), y, args.tol);
      append(report.checks, wr.checks);
      report.details["normalized_trace_x"] = wr.normalized_trace_x;
    }
    report.timings_ms = {{"total", clock.elapsed_ms()}};
    if (args.report) io::write_json(*args.report, report.to_json());
    return finish(report, log);
  }, log);
}

int cmd_pipeline(const PipelineArgs& args, std::ostream& log) {
  return guarded([&] {
    Stopwatch clock;
    io::Report report;
    report.command = "pipeline";
    const SpectralElement elem = io::read_element(args.input, &report.notes);
    report.add_input(args.input);

    const std::vector<PipelineStage> stages = pipeline(elem, args.schedule, args.tol, args.workers);
    for (const auto& s : stages) {
      const ApproximationRow& r = s.row;
      const std::string tag = "n=" + std::to_string(r.n) + " ";
      report.checks.add(tag + "delta_q", r.delta_q, r.bound_q);
      report.checks.add(tag + "d", r.d, r.bound_d);
      report.checks.add(tag + "max_norm", r.max_norm, r.norm_budget);
      report.checks.add(tag + "decomposition", r.decomposition_pass ? 0.0 : 1.0, 0.0);
    }
    io::write_text(args.out / "pipeline.csv", io::pipeline_csv(stages));
    report.details = {{"atoms", elem.size()}, {"norm", elem.norm()}, {"quasitrace", elem.quasitrace()}};
    report.timings_ms = {{"total", clock.elapsed_ms()}};
    io::write_json(args.out / "report.json", report.to_json());
    return finish(report, log);
  }, log);
}

int cmd_quantize(const QuantizeArgs& args, std::ostream& out, std::ostream& log) {
  return guarded([&] {
    std::vector<std::string> warnings;
    const SpectralElement elem = io::read_element(args.input, &warnings);
    for (const auto& w : warnings) log << "note: " << w << "\n";
    const DyadicApproximation approx = quantize(elem, args.n);
    const ApproxError err = approx_error(elem, approx);

    json j = io::approximation_to_json(approx);
    j["delta_q"] = err.delta_q;
    j["d"] = err.d;
    j["bound_q"] = bound_q(elem, args.n);
    j["bound_d"] = bound_d(elem, args.n);
    const bool ok = err.delta_q <= j["bound_q"].get<double>() && err.d <= j["bound_d"].get<double>();
    j["pass"] = ok;
    if (args.out) {
      io::write_json(*args.out, j);
    } else {
      out << j.dump(2) << "\n";
    }
    log << (ok ? "result: pass" : "result: FAIL") << "\n";
    return ok ? kPass : kInvariantFailure;
  }, log);
}

int cmd_equiv(const EquivArgs& args, std::ostream& log) {
  return guarded([&] {
    io::Report report;
    report.command = "equiv";
    const HermitianMatrix a = io::read_hermitian(args.a);
    const HermitianMatrix b = io::read_hermitian(args.b);
    report.add_input(args.a);
    report.add_input(args.b);
    if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "matrices differ in dimension");

    const auto dim = static_cast<std::size_t>(a.dim());
    const std::size_t order = args.approx.value_or(dim);
    const bool exact = unitary_equiv_exact(a, b, args.tol).has_value();
    const double discrepancy = moment_discrepancy(a, b, order);
    const bool approx = discrepancy <= args.tol;
    if (order >= dim) {
      // With K >= dim the moment criterion decides exact equivalence.
      report.checks.add("verdicts agree", exact == approx ? 0.0 : 1.0, 0.0);
    } else {
      report.notes.push_back("moment order below dimension; verdicts may legitimately differ");
    }
    report.details = {{"exact", exact}, {"approximate", approx}, {"order", order}, {"moment_discrepancy", discrepancy}};
    log << "exact: " << (exact ? "true" : "false") << "\n";
    log << "approximate: " << (approx ? "true" : "false") << "\n";
    if (args.report) io::write_json(*args.report, report.to_json());
    return finish(report, log);
  }, log);
}

int cmd_witness(const WitnessArgs& args, std::ostream& log) {
  return guarded([&] {
    io::Report report;
    report.command = "witness";
    const HermitianMatrix a = io::read_hermitian(args.a, args.tol.hermiticity);
    const Matrix u = io::read_matrix(args.u, false);
    const Witness w = build_witness(a, u, args.t, args.tol);
    io::write_matrix(args.out, w.y, false);
    log << "t: " << io::format_double(w.t) << "\n";
    if (args.x) {
      const HermitianMatrix x = io::read_hermitian(*args.x, args.tol.hermiticity);
      if (x.dim() != a.dim()) throw Error(ErrorCode::DimensionMismatch, "X does not match A");
      append(report.checks, verify_witness(x.matrix(), w.y, args.tol).checks);
    }
    return finish(report, log);
  }, log);
}

}  // namespace selfcomm::cli
