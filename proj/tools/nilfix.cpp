#include "nilfix/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
  using nilfix::cli::Command;
  using nilfix::cli::Format;

  CLI::App app{"Reidemeister and Nielsen numbers of affine n-valued maps on nilmanifolds"};
  app.require_subcommand(1);

  nilfix::cli::AnalysisRequest req;
  const std::map<std::string, Format> formats{{"text", Format::text}, {"json", Format::json}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input,-i,--input", req.input, "JSON input file")->required();
    sub->add_option("--format", req.format, "text or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_option("--samples", req.sample_count, "samples for randomized checks")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", req.seed, "seed for randomized checks");
    sub->add_option("--box", req.box_bound, "largest box bound for the twisted census")
        ->check(CLI::Range(2, 6));
  };

  auto* validate = app.add_subcommand("validate", "group axioms, homomorphisms, disjointness, sigma cocycle");
  auto* analyze = app.add_subcommand("analyze", "Reidemeister and Nielsen numbers with per-component data");
  auto* fixed = app.add_subcommand("fixed-points", "exact fixed points of a map on a torus");
  auto* oracle = app.add_subcommand("oracle", "brute-force twisted conjugacy class counts");
  for (auto* sub : {validate, analyze, fixed, oracle}) add_common(sub);
  fixed->add_flag("--skip-singular", req.skip_singular, "leave out lifts with det(I - M) = 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : nilfix::cli::exit_malformed;
  }

  if (validate->parsed()) req.command = Command::validate;
  if (analyze->parsed()) req.command = Command::analyze;
  if (fixed->parsed()) req.command = Command::fixed_points;
  if (oracle->parsed()) req.command = Command::oracle;
  return nilfix::cli::run(req, std::cout, std::cerr);
}
