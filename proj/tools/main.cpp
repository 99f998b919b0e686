#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypgeo/cli.hpp"
#include "hypgeo/errors.hpp"

namespace {

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size())
      throw hypgeo::validation_error("bad --grid entry: " + tok);
    out.push_back(v);
  }
  if (out.empty()) throw hypgeo::validation_error("--grid needs at least one value");
  return out;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const hypgeo::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hypgeo::budget_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hypgeo::rep_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hypgeo::solver_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "genus-2 hyperbolic surfaces: earthquake paths, measured laminations, "
      "inverse-earthquake maps and de Sitter polar duality"};
  app.require_subcommand(1);

  hypgeo::cli::RunOptions opts;
  std::string grid_str;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    sub->add_option("--seed", opts.seed, "override the run seed");
    sub->add_option("--out", opts.out_dir, "output directory (default: .)");
    sub->add_option("--slack", opts.slack, "override certificate slack");
    sub->add_option("--budget-radius", opts.budget_radius,
                    "override the enumeration budget radius");
    sub->add_option("--grid", grid_str, "comma-separated earthquake time grid");
  };

  CLI::App* s_surface = app.add_subcommand(
      "surface", "build and validate holonomies from Fenchel-Nielsen data");
  CLI::App* s_lemma = app.add_subcommand(
      "verify-lemma", "earthquake length-change certificates over seeded sweeps");
  CLI::App* s_ukmap = app.add_subcommand(
      "ukmap", "inverse-earthquake u_K maps and their convergence sweep");
  CLI::App* s_project = app.add_subcommand(
      "project", "project a measured current to its length-minimizing surface");
  CLI::App* s_duality = app.add_subcommand(
      "duality", "hyperbolic/de Sitter polar duality dictionary checks");
  for (CLI::App* s : {s_surface, s_lemma, s_ukmap, s_project, s_duality})
    add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  int (*fn)(const hypgeo::cli::RunOptions&) = nullptr;
  CLI::App* sub = nullptr;
  if (s_surface->parsed()) { fn = hypgeo::cli::run_surface; sub = s_surface; }
  if (s_lemma->parsed()) { fn = hypgeo::cli::run_verify_lemma; sub = s_lemma; }
  if (s_ukmap->parsed()) { fn = hypgeo::cli::run_ukmap; sub = s_ukmap; }
  if (s_project->parsed()) { fn = hypgeo::cli::run_project; sub = s_project; }
  if (s_duality->parsed()) { fn = hypgeo::cli::run_duality; sub = s_duality; }

  return guarded([&] {
    // An explicitly given empty grid is an error, not "use the default".
    if (sub->count("--grid") > 0) opts.grid = parse_grid(grid_str);
    return fn(opts);
  });
}
