// Command-line front end: model generation, exact forgetful pushforward,
// total variation, coupled sampling and the verification suites.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "undirectify/json_io.hpp"
#include "undirectify/verify.hpp"

namespace {

using undirectify::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

json load_json_file(const std::string& path) {
  return json::parse(undirectify::read_file(path));
}

struct GenerateArgs {
  std::string spec_path, out_path;
  long count = 1;
};
struct PhiArgs {
  std::string spec_path, out_path;
};
struct TvArgs {
  std::string a_path, b_path, out_path;
};
struct CoupleArgs {
  std::string pair, spec_path, out_path;
  long replicates = 10'000;
  long keep = 0;
};
struct VerifyArgs {
  std::string suite, config_path, out_path;
  std::string format = "json";
};

int run_generate(const GenerateArgs& args, std::uint64_t seed, bool validate_only) {
  const auto file = undirectify::spec_file_from_json(load_json_file(args.spec_path));
  if (validate_only) {
    std::puts("spec ok");
    return kExitOk;
  }
  const std::uint64_t used_seed = file.seed.value_or(seed);
  std::string lines;
  undirectify::Rng base(used_seed);
  for (long k = 0; k < args.count; ++k) {
    undirectify::Rng rng = base.split(static_cast<std::uint64_t>(k));
    const json row = file.spec.directed()
                         ? undirectify::to_json(undirectify::sample_digraph(file.spec, rng))
                         : undirectify::to_json(undirectify::sample_graph(file.spec, rng));
    lines += row.dump();
    lines += '\n';
  }
  if (args.out_path.empty()) {
    std::fputs(lines.c_str(), stdout);
  } else {
    undirectify::atomic_write_file(args.out_path, lines);
  }
  return kExitOk;
}

int run_phi(const PhiArgs& args, std::uint64_t seed, bool validate_only) {
  const auto file = undirectify::spec_file_from_json(load_json_file(args.spec_path));
  if (!file.spec.directed())
    throw std::invalid_argument("phi: spec must be a directed model (IAG or ASRG)");
  if (validate_only) {
    std::puts("spec ok");
    return kExitOk;
  }
  const auto exact =
      undirectify::exact_model_distribution(file.spec, file.seed.value_or(seed));
  const undirectify::GraphDistribution push = undirectify::phi_pushforward(exact.dist);
  json out;
  if (exact.conditioned_on_types) {
    const std::vector<int> types = undirectify::int_types(exact.vertices);
    out = undirectify::to_json(push, &types);
  } else {
    out = undirectify::to_json(push);
  }
  const std::string text = out.dump(2) + "\n";
  if (args.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    undirectify::atomic_write_file(args.out_path, text);
  }
  return kExitOk;
}

int run_tv(const TvArgs& args, bool validate_only) {
  const auto a = undirectify::distribution_from_json(load_json_file(args.a_path));
  const auto b = undirectify::distribution_from_json(load_json_file(args.b_path));
  if (validate_only) {
    std::puts("distributions ok");
    return kExitOk;
  }
  const double tv = undirectify::tv_distance(a, b);
  std::printf("%.17g\n", tv);
  if (!args.out_path.empty()) {
    undirectify::atomic_write_file(args.out_path, json{{"tv", tv}}.dump(2) + "\n");
  }
  return kExitOk;
}

int run_couple(const CoupleArgs& args, std::uint64_t seed, bool validate_only) {
  const auto file = undirectify::spec_file_from_json(load_json_file(args.spec_path));
  if (validate_only) {
    std::puts("spec ok");
    return kExitOk;
  }
  const auto report = undirectify::run_coupling_report(
      args.pair, file.spec, args.replicates, file.seed.value_or(seed), args.keep);
  const std::string text = undirectify::to_json(report).dump(2) + "\n";
  if (args.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    undirectify::atomic_write_file(args.out_path, text);
  }
  bool pass = true;
  for (const auto& check : report.bound_checks)
    if (!check.informational && !check.pass) pass = false;
  return pass ? kExitOk : kExitCheckFailure;
}

int run_verify(const VerifyArgs& args, std::uint64_t seed, bool seed_from_cli,
               bool validate_only) {
  std::uint64_t used_seed = seed;
  if (!args.config_path.empty()) {
    const json config = load_json_file(args.config_path);
    if (!seed_from_cli) {
      if (config.contains("seed"))
        used_seed = config.at("seed").get<std::uint64_t>();
      else if (config.contains("base_seed"))
        used_seed = config.at("base_seed").get<std::uint64_t>();
    }
  }
  if (validate_only) {
    std::puts("config ok");
    return kExitOk;
  }
  const undirectify::SuiteResult result = undirectify::run_suite(args.suite, used_seed);
  for (const auto& check : result.checks) {
    std::printf("[%s]%s %s (value=%.6g bound=%.6g)\n", check.pass ? "PASS" : "FAIL",
                check.informational ? " (info)" : "", check.name.c_str(), check.value,
                check.bound);
  }
  std::printf("suite %s: %s (%ld hard failure%s)\n", result.suite.c_str(),
              result.all_hard_pass() ? "PASS" : "FAIL", result.hard_failures(),
              result.hard_failures() == 1 ? "" : "s");
  if (!args.out_path.empty()) {
    if (args.format == "csv") {
      undirectify::atomic_write_file(
          args.out_path,
          undirectify::csv_to_string(undirectify::emit_series(undirectify::to_json(result))));
    } else {
      undirectify::atomic_write_file(args.out_path,
                                     undirectify::to_json(result).dump(2) + "\n");
    }
  }
  return result.all_hard_pass() ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"directed/undirected random graph model equivalence toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = undirectify::kDefaultSeed;
  bool validate_only = false;
  app.add_option("--seed", seed, "base seed (default 0xDEADBEEF)");
  app.add_flag("--validate-only", validate_only, "validate inputs and exit");

  GenerateArgs generate_args;
  auto* generate = app.add_subcommand("generate", "sample graphs from a model spec");
  generate->fallthrough();
  generate->add_option("--spec", generate_args.spec_path, "model spec JSON")->required();
  generate->add_option("--count", generate_args.count, "number of samples")->required();
  generate->add_option("--out", generate_args.out_path, "output JSONL path (default stdout)");

  PhiArgs phi_args;
  auto* phi = app.add_subcommand("phi", "exact forgetful pushforward of a directed model");
  phi->fallthrough();
  phi->add_option("--spec", phi_args.spec_path, "directed model spec JSON")->required();
  phi->add_option("--out", phi_args.out_path, "output distribution JSON (default stdout)");

  TvArgs tv_args;
  auto* tv = app.add_subcommand("tv", "total variation distance between two distributions");
  tv->fallthrough();
  tv->add_option("--a", tv_args.a_path, "first distribution JSON")->required();
  tv->add_option("--b", tv_args.b_path, "second distribution JSON")->required();
  tv->add_option("--out", tv_args.out_path, "optional output JSON");

  CoupleArgs couple_args;
  auto* couple = app.add_subcommand("couple", "run a location coupling with error accounting");
  couple->fallthrough();
  couple
      ->add_option("--pair", couple_args.pair, "iag-ieg-exact | iag-ieg-approx | asrg-esrg")
      ->required()
      ->check(CLI::IsMember({"iag-ieg-exact", "iag-ieg-approx", "asrg-esrg"}));
  couple->add_option("--spec", couple_args.spec_path, "directed model spec JSON")->required();
  couple->add_option("--replicates", couple_args.replicates, "replicate count")->required();
  couple->add_option("--keep-replicates", couple_args.keep, "echo the first K replicates");
  couple->add_option("--out", couple_args.out_path, "output report JSON (default stdout)");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "run a named verification suite");
  verify->fallthrough();
  verify->add_option("--suite", verify_args.suite, "suite name")
      ->required()
      ->check(CLI::IsMember(undirectify::suite_names()));
  verify->add_option("--config", verify_args.config_path, "optional config JSON with a seed");
  verify->add_option("--out", verify_args.out_path, "output report path");
  verify->add_option("--format", verify_args.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return run_generate(generate_args, seed, validate_only);
    if (*phi) return run_phi(phi_args, seed, validate_only);
    if (*tv) return run_tv(tv_args, validate_only);
    if (*couple) return run_couple(couple_args, seed, validate_only);
    if (*verify)
      return run_verify(verify_args, seed, app.count("--seed") > 0, validate_only);
  } catch (const undirectify::json::exception& e) {
    std::fprintf(stderr, "error: malformed JSON: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: infeasible spec: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheckFailure;
  }
  return kExitUsage;
}
