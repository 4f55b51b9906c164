#include "powl/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "powl/behavior.hpp"
#include "powl/convert.hpp"
#include "powl/generate.hpp"
#include "powl/io.hpp"

namespace wfpowl {
namespace {

// Raised for unreadable or malformed inputs; maps to kExitInvalidInput.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* verdict_text(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

struct Common {
  std::string silent_token = "tau";
  bool fuzzy_silent = false;
  std::size_t states = kDefaultStateBudget;

  WorkflowNet load_net(const std::string& path) const {
    std::string text;
    try {
      text = read_file(path);
    } catch (const std::runtime_error& e) {
      throw InputError(e.what());
    }
    try {
      return parse_pnml(text, PnmlOptions{silent_token, fuzzy_silent});
    } catch (const ParseError& e) {
      throw InputError(path + ": " + e.what());
    } catch (const NotAWorkflowNet& e) {
      throw InputError(path + ": " + e.what());
    } catch (const UnsupportedFeature& e) {
      throw InputError(path + ": unsupported: " + e.what());
    }
  }

  PowlNode load_model(const std::string& path) const {
    try {
      return parse_powl(read_file(path));
    } catch (const std::exception& e) {
      throw InputError(path + ": " + e.what());
    }
  }
};

struct ConvertArgs {
  std::string input, output, fail_diagnostics, rules = "dup,split,join";
  bool no_preprocess = false, no_check = false, verify_projections = false;
  std::size_t verify_len = 0;
};

int run_convert(const ConvertArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  auto wf = c.load_net(a.input);
  if (!a.no_check) {
    auto safe = check_safe(wf, c.states);
    auto sound = safe.safe() ? check_sound(wf, c.states) : SoundnessVerdict{};
    if (safe.status == Verdict::No || sound.status == Verdict::No) {
      err << a.input << ": input must be safe and sound (safe: " << verdict_text(safe.status)
          << ", sound: " << verdict_text(sound.status) << ")\n";
      return kExitInvalidInput;
    }
    if (!sound.sound()) err << "warning: could not establish safeness and soundness\n";
  }
  ConversionOptions opts;
  opts.preprocess = !a.no_preprocess;
  opts.rules = PreprocessRules::parse(a.rules);
  opts.verify_projections = a.verify_projections;
  opts.state_budget = c.states;

  VerifiedConversion result = a.verify_len > 0
                                  ? convert_and_verify(wf, opts, a.verify_len)
                                  : VerifiedConversion{convert(wf, opts), std::nullopt};
  const auto& report = result.report;
  if (!report.success()) {
    err << "conversion failed: " << report.failure->describe() << "\n";
    if (!a.fail_diagnostics.empty()) write_file(a.fail_diagnostics, write_pnml(report.failure->fragment));
    return kExitConversionFailure;
  }
  auto doc = serialize_powl(*report.model);
  if (a.output.empty()) out << doc;
  else write_file(a.output, doc);
  err << "converted in " << report.stats.wall_ms << " ms: " << report.stats.partial_orders
      << " partial orders, " << report.stats.choice_graphs << " choice graphs, depth "
      << report.stats.depth << "\n";
  if (result.equivalence) {
    const auto& eq = *result.equivalence;
    if (!eq.equal) {
      err << "language mismatch at bound " << eq.bound << ": <" << to_string(*eq.counterexample)
          << "> only in the " << (eq.counterexample_in_left ? "net" : "model") << "\n";
      return kExitVerificationFailure;
    }
    err << "languages agree up to length " << eq.bound << "\n";
  }
  return kExitOk;
}

int run_verify(const std::string& input, const Common& c, std::ostream& out) {
  auto wf = c.load_net(input);
  auto safe = check_safe(wf, c.states);
  out << "safe: " << verdict_text(safe.status);
  if (safe.witness) out << " (" << safe.witness->to_string(wf.net()) << ")";
  out << "\n";
  if (!safe.safe()) {
    out << "sound: unknown (requires a safe net)\n";
    return kExitVerificationFailure;
  }
  auto sound = check_sound(wf, c.states);
  out << "sound: " << verdict_text(sound.status);
  if (sound.status == Verdict::No) out << " (violates " << to_string(sound.violated) << "; witness: " << sound.witness << ")";
  if (sound.status == Verdict::Unknown) out << " (" << sound.reason << ")";
  out << "\n";
  return sound.sound() ? kExitOk : kExitVerificationFailure;
}

int run_equiv(const std::string& net_path, const std::string& model_path, std::size_t len,
              const Common& c, std::ostream& out) {
  auto wf = c.load_net(net_path);
  auto model = c.load_model(model_path);
  auto eq = bounded_equal(enumerate_language(wf, len, c.states), language_bounded(model, len));
  if (eq.equal) {
    out << "equal up to length " << eq.bound << "\n";
    return kExitOk;
  }
  out << "different: <" << to_string(*eq.counterexample) << "> only in the "
      << (eq.counterexample_in_left ? "net" : "model") << "\n";
  return kExitVerificationFailure;
}

struct GenerateArgs {
  std::uint64_t seed = 1;
  std::size_t transitions = 20, depth = 4, count = 1;
  std::string dir = ".";
};

int run_generate(const GenerateArgs& a, std::ostream& out) {
  std::filesystem::create_directories(a.dir);
  for (std::size_t i = 0; i < a.count; ++i) {
    auto seed = a.seed + i;
    auto g = generate_with_transitions(seed, a.transitions, a.depth);
    auto base = (std::filesystem::path(a.dir) / ("net_" + std::to_string(seed))).string();
    write_file(base + ".pnml", write_pnml(g.net, "net_" + std::to_string(seed)));
    write_file(base + ".powl.json", serialize_powl(g.reference));
    out << base << ".pnml (" << g.net.net().transition_count() << " transitions)\n";
  }
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::size_t> sizes{25, 50, 100, 200, 350};
  std::size_t per_size = 5;
  std::uint64_t seed_base = 1;
  std::string csv;
};

int run_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  auto rows = bench_run(a.sizes, a.per_size, a.seed_base);
  auto csv = bench_csv(rows);
  if (a.csv.empty()) out << csv;
  else write_file(a.csv, csv);
  std::size_t failed = 0;
  double worst = 0;
  for (const auto& r : rows) {
    failed += !r.success;
    worst = std::max(worst, r.wall_ms);
  }
  err << rows.size() << " nets, " << failed << " failed, slowest " << worst << " ms\n";
  return failed ? kExitConversionFailure : kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convert safe and sound workflow nets into POWL models"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--silent-token", common.silent_token, "Transition name treated as silent");
  app.add_flag("--fuzzy-silent", common.fuzzy_silent,
               "Also treat names like skip/silent/invisible as silent");
  app.add_option("--states", common.states, "State budget for reachability analysis");

  ConvertArgs conv;
  auto* convert_cmd = app.add_subcommand("convert", "Convert a PNML net into a POWL document");
  convert_cmd->add_option("input", conv.input, "Input PNML file")->required();
  convert_cmd->add_option("-o,--output", conv.output, "Output file (default: stdout)");
  convert_cmd->add_flag("--no-preprocess", conv.no_preprocess, "Skip the reduction rules");
  convert_cmd->add_option("--rules", conv.rules, "Reduction rules to apply (dup,split,join)");
  convert_cmd->add_option("--verify", conv.verify_len,
                          "Compare bounded languages of net and model up to this length");
  convert_cmd->add_option("--fail-diagnostics", conv.fail_diagnostics,
                          "On failure, write the irreducible fragment as PNML");
  convert_cmd->add_flag("--verify-projections", conv.verify_projections,
                        "Check every projection for safeness and soundness");
  convert_cmd->add_flag("--no-check", conv.no_check, "Skip the input safeness/soundness check");
  convert_cmd->add_option("--states", common.states, "State budget for reachability analysis");

  std::string verify_input;
  auto* verify_cmd = app.add_subcommand("verify", "Report safeness and soundness of a net");
  verify_cmd->add_option("input", verify_input, "Input PNML file")->required();
  verify_cmd->add_option("--states", common.states, "State budget for reachability analysis");

  std::string equiv_net, equiv_model;
  std::size_t max_len = 8;
  auto* equiv_cmd = app.add_subcommand("equiv", "Compare bounded languages of a net and a model");
  equiv_cmd->add_option("net", equiv_net, "PNML file")->required();
  equiv_cmd->add_option("model", equiv_model, "POWL document")->required();
  equiv_cmd->add_option("--max-len", max_len, "Maximum trace length");
  equiv_cmd->add_option("--states", common.states, "State budget for reachability analysis");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate random separable nets");
  gen_cmd->add_option("--seed", gen.seed, "First seed");
  gen_cmd->add_option("--transitions", gen.transitions, "Approximate transition count");
  gen_cmd->add_option("--depth", gen.depth, "Maximum model depth");
  gen_cmd->add_option("--count", gen.count, "Number of nets (consecutive seeds)");
  gen_cmd->add_option("-o,--output", gen.dir, "Output directory");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time conversion of generated nets");
  bench_cmd->add_option("--sizes", bench.sizes, "Target transition counts")->delimiter(',');
  bench_cmd->add_option("--per-size", bench.per_size, "Nets per size");
  bench_cmd->add_option("--seed-base", bench.seed_base, "First seed");
  bench_cmd->add_option("--csv", bench.csv, "CSV output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (*convert_cmd) return run_convert(conv, common, out, err);
    if (*verify_cmd) return run_verify(verify_input, common, out);
    if (*equiv_cmd) return run_equiv(equiv_net, equiv_model, max_len, common, out);
    if (*gen_cmd) return run_generate(gen, out);
    if (*bench_cmd) return run_bench(bench, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerificationFailure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace wfpowl
