#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "selfcomm/commands.hpp"

namespace {

void add_tolerance_flags(CLI::App* cmd, selfcomm::Tolerances& tol) {
  cmd->add_option("--tol", tol.residual, "residual tolerance (relative)")->check(CLI::PositiveNumber);
  cmd->add_option("--trace-tol", tol.trace_zero, "trace-zero tolerance (relative, per dimension)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cluster-gap", tol.cluster_gap, "eigenvalue cluster gap (relative)")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace selfcomm::cli;

  CLI::App app{"Abelian self-commutator decompositions of traceless Hermitian matrices"};
  app.require_subcommand(1);
  int status = kPass;

  DecomposeArgs dec;
  auto* decompose = app.add_subcommand("decompose", "split X into commuting unitarily equivalent A - B");
  decompose->add_option("input", dec.input, "matrix file")->required()->check(CLI::ExistingFile);
  decompose->add_option("--out", dec.out, "output directory")->required();
  decompose->add_flag("--recenter", dec.recenter, "subtract trace(X)/n first");
  decompose->add_option("--projection", dec.projection, "eigenvector index (ascending order) of the avoided projection");
  add_tolerance_flags(decompose, dec.tol);
  decompose->callback([&] { status = cmd_decompose(dec, std::cout); });

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "re-check claimed artifacts against X");
  verify->add_option("--x", ver.x, "source matrix")->required()->check(CLI::ExistingFile);
  verify->add_option("--a", ver.a, "claimed A");
  verify->add_option("--b", ver.b, "claimed B");
  verify->add_option("--u", ver.u, "claimed U");
  verify->add_option("--y", ver.y, "claimed witness Y");
  verify->add_option("--report", ver.report, "write the JSON report here");
  add_tolerance_flags(verify, ver.tol);
  verify->callback([&] { status = cmd_verify(ver, std::cout); });

  PipelineArgs pipe;
  std::string schedule = "2,4,8,16,32,64,128,256,512,1024";
  auto* pipeline = app.add_subcommand("pipeline", "quantize and decompose a spectral element along a schedule");
  pipeline->add_option("input", pipe.input, "spectral element file")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--schedule", schedule, "comma-separated subfactor orders")->capture_default_str();
  pipeline->add_option("--out", pipe.out, "output directory")->required();
  pipeline->add_option("--workers", pipe.workers, "concurrent stages")->check(CLI::Range(1u, 64u));
  add_tolerance_flags(pipeline, pipe.tol);
  pipeline->callback([&] {
    try {
      pipe.schedule = parse_schedule(schedule);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      status = kInputError;
      return;
    }
    status = cmd_pipeline(pipe, std::cout);
  });

  QuantizeArgs quant;
  auto* quantize = app.add_subcommand("quantize", "round a spectral element onto the 1/n grid");
  quantize->add_option("input", quant.input, "spectral element file")->required()->check(CLI::ExistingFile);
  quantize->add_option("--n", quant.n, "subfactor order")->required()->check(CLI::Range(2, 1 << 20));
  quantize->add_option("--out", quant.out, "output file (stdout when absent)");
  quantize->callback([&] { status = cmd_quantize(quant, std::cout, std::cerr); });

  EquivArgs eq;
  auto* equiv = app.add_subcommand("equiv", "exact and moment-based unitary equivalence");
  equiv->add_option("a", eq.a, "first matrix")->required()->check(CLI::ExistingFile);
  equiv->add_option("b", eq.b, "second matrix")->required()->check(CLI::ExistingFile);
  equiv->add_option("--approx", eq.approx, "moment order K (default: dimension)")->check(CLI::PositiveNumber);
  equiv->add_option("--tol", eq.tol, "comparison tolerance")->check(CLI::PositiveNumber);
  equiv->add_option("--report", eq.report, "write the JSON report here");
  equiv->callback([&] { status = cmd_equiv(eq, std::cout); });

  WitnessArgs wit;
  auto* witness = app.add_subcommand("witness", "build Y = (A + tI)^(1/2) U*");
  witness->add_option("--a", wit.a, "A")->required()->check(CLI::ExistingFile);
  witness->add_option("--u", wit.u, "U")->required()->check(CLI::ExistingFile);
  witness->add_option("--x", wit.x, "verify YY* - Y*Y against X")->check(CLI::ExistingFile);
  witness->add_option("--t", wit.t, "shift (default ||A||)");
  witness->add_option("--out", wit.out, "output file for Y")->required();
  add_tolerance_flags(witness, wit.tol);
  witness->callback([&] { status = cmd_witness(wit, std::cout); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }
  return status;
}
