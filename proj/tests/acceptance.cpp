// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "powl/convert.hpp"
#include "powl/generate.hpp"
#include "powl/io.hpp"

using namespace wfpowl;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

WorkflowNet fixture(const std::string& name) {
  return parse_pnml(read_file(std::string(FIXTURE_DIR) + "/" + name + ".pnml"));
}

bool violates(const AttemptDiagnostic& d, PartitionCondition c) {
  for (const auto& v : d.violations)
    if (v.condition == c) return true;
  return false;
}

struct Result {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail.clear();
    ok = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

int failures = 0;

void report(int n, const char* name, const std::function<Result()>& body) {
  auto start = Clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.fail(std::string("exception: ") + e.what());
  }
  failures += !r.ok;
  std::cout << fmt::format("{} {} {}: {} [{:.0f} ms]", r.ok ? "PASS" : "FAIL", n, name, r.detail,
                           ms_since(start))
            << std::endl;
}

// Criterion 4's corpus: seeds 1..200 with target sizes cycling through 5..40.
struct CorpusEntry {
  std::uint64_t seed;
  std::size_t size;
  GeneratedNet net;
};

std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> out;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    std::size_t size = 5 + (seed - 1) % 36;
    out.push_back({seed, size, generate_with_transitions(seed, size)});
  }
  return out;
}

std::vector<std::string> corpus_models(const std::vector<CorpusEntry>& c) {
  std::vector<std::string> docs;
  for (const auto& e : c) {
    auto r = convert(e.net.net);
    docs.push_back(r.success() ? serialize_powl(*r.model) : "failure\n");
  }
  return docs;
}

std::string without_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    if (cols.size() > 4) cols.erase(cols.begin() + 4);
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
  }
  return out;
}

}  // namespace

int main() {
  report(1, "fig1a converts to a choice graph with one nested partial order", [] {
    Result r;
    auto wf = fixture("fig1a");
    auto start = Clock::now();
    auto v = convert_and_verify(wf, {}, 12);
    double elapsed = ms_since(start);
    if (!v.report.success()) {
      r.fail("conversion failed");
      return r;
    }
    const auto& m = *v.report.model;
    std::size_t pos = 0;
    for (const auto& c : m.children()) pos += c.is_partial_order();
    if (!m.is_choice_graph()) r.fail("root is not a choice graph");
    if (pos != 1) r.fail(fmt::format("{} partial-order children", pos));
    if (!v.equivalence->equal) r.fail("languages differ at L=12: <" + to_string(*v.equivalence->counterexample) + ">");
    if (elapsed >= 1000) r.fail(fmt::format("took {:.0f} ms", elapsed));
    if (r.ok)
      r.detail = fmt::format("{} children, languages equal at L=12, convert+verify {:.1f} ms",
                             m.children().size(), elapsed);
    return r;
  });

  report(2, "fig9a-d fail with the expected conditions; fig2 fails without preprocessing", [] {
    Result r;
    using O = AttemptDiagnostic::Outcome;
    using PC = PartitionCondition;
    auto expect = [&](const char* name, bool preprocess,
                      const std::function<bool(const ConversionFailure&)>& ok, const char* what) {
      ConversionOptions o;
      o.preprocess = preprocess;
      auto rep = convert(fixture(name), o);
      if (rep.success()) return r.fail(std::string(name) + " converted");
      if (!ok(*rep.failure)) r.fail(std::string(name) + ": expected " + what + ", got " + rep.failure->describe());
    };
    auto single_exit_then_single_part = [](const ConversionFailure& f) {
      return violates(f.partial_order, PC::SingleExit) && f.choice_graph.outcome == O::SinglePart;
    };
    auto single_entry_then_stall = [](const ConversionFailure& f) {
      return violates(f.partial_order, PC::SingleEntry) && f.choice_graph.outcome == O::NoProgress;
    };
    expect("fig9a", true, single_exit_then_single_part, "single exit, then a single choice-graph part");
    expect("fig9b", true, single_exit_then_single_part, "single exit, then a single choice-graph part");
    expect("fig9c", true, single_entry_then_stall, "single entry, then a projection without progress");
    expect("fig9d", true, single_entry_then_stall, "single entry, then a projection without progress");
    expect("fig2", false, [](auto&) { return true; }, "failure");
    if (r.ok) r.detail = "9a/9b single exit + single part, 9c/9d single entry + no progress, fig2 falls through";
    return r;
  });

  report(3, "fig8a needs preprocessing and keeps its language", [] {
    Result r;
    auto wf = fixture("fig8a");
    ConversionOptions raw;
    raw.preprocess = false;
    if (convert(wf, raw).success()) r.fail("converted without preprocessing");
    auto rep = convert(wf);
    if (!rep.success()) {
      r.fail("failed with preprocessing");
      return r;
    }
    auto orig = enumerate_language(wf, 8), pre = enumerate_language(*rep.converted_net, 8);
    auto model = language_bounded(*rep.model, 8);
    if (!bounded_equal(orig, pre).equal) r.fail("preprocessed net language differs");
    if (!bounded_equal(orig, model).equal) r.fail("model language differs");
    if (r.ok) r.detail = fmt::format("{} traces at L=8 on original, preprocessed net and model", orig.size());
    return r;
  });

  auto build_start = Clock::now();
  auto nets = corpus();
  std::vector<ConversionReport> reports;
  for (const auto& e : nets) reports.push_back(convert(e.net.net));
  double corpus_ms = ms_since(build_start);

  report(4, "converted models match the nets' bounded languages (200 nets)", [&] {
    Result r;
    std::size_t at8 = 0, at5 = 0;
    for (std::size_t i = 0; i < nets.size(); ++i) {
      if (!reports[i].success()) continue;
      const auto& e = nets[i];
      std::size_t len = 8;
      TraceSet ref;
      try {
        ref = language_bounded(e.net.reference, 8, 50'000);
        ++at8;
      } catch (const LanguageTooLarge&) {
        len = 5;
        ref = language_bounded(e.net.reference, 5);
        ++at5;
      }
      auto net_lang = enumerate_language(e.net.net, len);
      auto model_lang = language_bounded(*reports[i].model, len);
      auto eq = bounded_equal(net_lang, model_lang);
      if (!eq.equal)
        r.fail(fmt::format("seed {} L={}: <{}>", e.seed, len, to_string(*eq.counterexample)));
      if (!bounded_equal(net_lang, ref).equal) r.fail(fmt::format("seed {}: reference differs", e.seed));
    }
    if (r.ok) r.detail = fmt::format("{} nets at L=8, {} at L=5, no counterexample", at8, at5);
    return r;
  });

  report(5, "every generated net converts (200 nets)", [&] {
    Result r;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < nets.size(); ++i) {
      if (reports[i].success()) ++ok;
      else r.fail(fmt::format("seed {} size {}", nets[i].seed, nets[i].size));
    }
    if (r.ok) r.detail = fmt::format("{}/{} converted in {:.0f} ms total", ok, nets.size(), corpus_ms);
    return r;
  });

  report(6, "projections are sound workflow nets (50 nets)", [&] {
    Result r;
    ConversionOptions o;
    o.verify_projections = true;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < 50; ++i) {
      auto rep = convert(nets[i * 4].net.net, o);
      if (!rep.success()) r.fail(fmt::format("seed {} failed", nets[i * 4].seed));
      checked += rep.stats.projections_verified;
    }
    if (r.ok) r.detail = fmt::format("{} projections validated, safe and sound", checked);
    return r;
  });

  report(7, "order-preserving shuffle", [] {
    Result r;
    std::set<Trace> expected{{"a", "b", "c", "d", "e"}, {"a", "b", "d", "c", "e"}, {"a", "b", "d", "e", "c"}};
    if (shuffle({{"a", "b"}, {"c"}, {"d", "e"}}, OrderStruct(3, {{0, 1}, {0, 2}})) != expected)
      r.fail("worked example differs");
    std::size_t fact = 1;
    for (std::size_t n = 1; n <= 5; ++n) {
      fact *= n;
      std::vector<Trace> seqs;
      for (std::size_t i = 0; i < n; ++i) seqs.push_back({std::string(1, char('a' + i))});
      auto got = shuffle(seqs, OrderStruct(n, {})).size();
      if (got != fact) r.fail(fmt::format("n={}: {} interleavings", n, got));
    }
    if (r.ok) r.detail = "3 interleavings for the worked example, n! for n <= 5";
    return r;
  });

  std::string bench_first;
  report(8, "bench at 25..350 transitions, 5 seeds each", [&] {
    Result r;
    auto start = Clock::now();
    auto rows = bench_run({25, 50, 100, 200, 350}, 5);
    double total = ms_since(start);
    bench_first = bench_csv(rows);
    double worst = 0;
    std::size_t largest = 0;
    for (const auto& row : rows) {
      if (!row.success) r.fail(fmt::format("size {} seed {} failed", row.size, row.seed));
      worst = std::max(worst, row.wall_ms);
      largest = std::max(largest, row.transitions);
      if (row.wall_ms >= 5000) r.fail(fmt::format("size {} seed {} took {:.0f} ms", row.size, row.seed, row.wall_ms));
    }
    if (total >= 300'000) r.fail(fmt::format("bench took {:.0f} ms", total));
    if (r.ok)
      r.detail = fmt::format("{} nets up to {} transitions, slowest {:.1f} ms, total {:.0f} ms", rows.size(),
                             largest, worst, total);
    return r;
  });

  report(9, "repeated runs are identical", [&] {
    Result r;
    std::vector<std::string> first;
    for (const auto& rep : reports) first.push_back(rep.success() ? serialize_powl(*rep.model) : "failure\n");
    auto again = corpus();
    for (std::size_t i = 0; i < again.size(); ++i)
      if (write_pnml(again[i].net.net) != write_pnml(nets[i].net.net))
        r.fail(fmt::format("seed {} net differs", again[i].seed));
    if (corpus_models(again) != first) r.fail("serialized models differ");
    auto second = bench_csv(bench_run({25, 50, 100, 200, 350}, 5));
    if (without_timing(second) != without_timing(bench_first)) r.fail("bench CSV differs");
    if (r.ok) r.detail = "200 models byte-identical, bench CSV identical apart from wall_ms";
    return r;
  });

  std::cout << (failures ? fmt::format("{} criteria failed", failures) : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
