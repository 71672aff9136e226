// Command-line front end: classify weighted trigonometric systems, build
// and verify their dual families, compute generalized Fourier
// coefficients and reconstructions, and sweep parameter grids.

#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "gfs2d/cli.hpp"

namespace {

void add_common_flags(CLI::App* cmd, gfs2d::cli::Options& o) {
  cmd->add_option("--weight", o.weight, "weight family: examplex|examplesum|const1|constant|csv")
      ->capture_default_str();
  cmd->add_option("--x0", o.x0, "singular abscissa of the weight");
  cmd->add_option("--y0", o.y0, "singular ordinate (examplesum)");
  cmd->add_option("--alpha", o.alpha, "weight exponent alpha > 0")->capture_default_str();
  cmd->add_option("--value", o.const_value, "value for the constant family");
  cmd->add_option("--csv", o.weight_csv, "CSV path for tabulated weights");
  cmd->add_option("--p", o.p, "Lebesgue exponent p > 1")->capture_default_str();
  cmd->add_option("--pattern", o.pattern, "exclusion pattern: point|column|column0")
      ->capture_default_str();
  cmd->add_option("--nu", o.nu, "excluded k for the point pattern");
  cmd->add_option("--mu", o.mu, "excluded m for the point pattern");
  cmd->add_option("--grid", o.grid, "per-axis grid size")->capture_default_str();
  cmd->add_option("--jmin", o.j_min, "first exclusion level (radius 2^-jmin)")
      ->capture_default_str();
  cmd->add_option("--jmax", o.j_max, "last exclusion level")->capture_default_str();
  cmd->add_option("--rho", o.rho, "increment growth slack")->capture_default_str();
  cmd->add_option("--tol", o.tol, "stabilization tolerance")->capture_default_str();
  cmd->add_option("--phase", o.phase, "phase P spec: const:<x0>|firstharmonic");
  cmd->add_option("--q-phase", o.q_phase, "phase Q spec (column0 pattern)");
  cmd->add_option("--out", o.out_prefix, "output file prefix")->capture_default_str();
  cmd->add_option("--json", o.json_path, "JSON report path ('-' = stdout)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classification and generalized Fourier series for weighted double "
               "trigonometric systems on the torus"};
  app.require_subcommand(1);
  gfs2d::cli::Options o;

  CLI::App* classify = app.add_subcommand("classify", "evaluate the system's verdict");
  add_common_flags(classify, o);

  CLI::App* dual = app.add_subcommand("dual", "build a dual family and verify biorthogonality");
  add_common_flags(dual, o);
  dual->add_option("--window", o.window, "window radius max(|k|,|m|)")->capture_default_str();
  dual->add_flag("--force", o.force, "build the dual even without a minimality certificate");

  CLI::App* coeffs = app.add_subcommand("coeffs", "generalized Fourier coefficients");
  add_common_flags(coeffs, o);
  coeffs->add_option("--window", o.window, "window radius")->capture_default_str();
  coeffs->add_option("--span", o.span, "input g = M * sum: 'k,m,re[,im];...'");
  coeffs->add_option("--input-csv", o.input_csv, "tabulated input g (experimental)");
  coeffs->add_flag("--force", o.force, "proceed without a minimality certificate");

  CLI::App* reconstruct = app.add_subcommand("reconstruct", "partial-sum reconstruction errors");
  add_common_flags(reconstruct, o);
  reconstruct->add_option("--window", o.window, "coefficient window radius")
      ->capture_default_str();
  reconstruct->add_option("--span", o.span, "input g = M * sum: 'k,m,re[,im];...'");
  reconstruct->add_option("--input-csv", o.input_csv, "tabulated input g (experimental)");
  reconstruct->add_option("--nlist", o.n_list, "truncation radii, comma separated")
      ->capture_default_str();
  reconstruct->add_flag("--force", o.force, "proceed without a minimality certificate");

  CLI::App* sweep = app.add_subcommand("sweep", "phase-diagram sweep over (p, alpha)");
  add_common_flags(sweep, o);
  sweep->add_option("--alphas", o.alphas, "alpha grid, comma separated")->capture_default_str();
  sweep->add_option("--ps", o.ps, "p grid, comma separated (default: --p)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return gfs2d::cli::kExitUsage;
  }

  try {
    if (classify->parsed()) return gfs2d::cli::cmd_classify(o);
    if (dual->parsed()) return gfs2d::cli::cmd_dual(o);
    if (coeffs->parsed()) return gfs2d::cli::cmd_coeffs(o);
    if (reconstruct->parsed()) return gfs2d::cli::cmd_reconstruct(o);
    if (sweep->parsed()) return gfs2d::cli::cmd_sweep(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gfs2d::cli::kExitUsage;
  } catch (const gfs2d::UnsupportedExponent& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gfs2d::cli::kExitUsage;
  } catch (const gfs2d::NotMinimal& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gfs2d::cli::kExitBlocked;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return gfs2d::cli::kExitUsage;
}
