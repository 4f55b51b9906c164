#include "powl/convert.hpp"

#include <chrono>
#include <sstream>

namespace wfpowl {
namespace {

using Outcome = AttemptDiagnostic::Outcome;

// Unwinds the recursion once a fragment falls through.
struct FallThrough {
  ConversionFailure failure;
};

class Converter {
 public:
  Converter(const ConversionOptions& opts, ConversionStats& stats, FreshIds& ids)
      : opts_(opts), stats_(stats), ids_(ids) {}

  PowlNode run(const WorkflowNet& input, std::size_t depth) {
    stats_.depth = std::max(stats_.depth, depth);
    WorkflowNet wf = input;
    if (depth > 0 && opts_.preprocess && opts_.preprocess_every_level)
      wf = preprocess_net(wf, opts_.rules, ids_).net;

    if (auto t = is_base_case(wf)) {
      ++stats_.leaves;
      return PowlNode::leaf(*t, wf.net().label(*t));
    }

    AttemptDiagnostic po;
    po.partition = po_partition(wf, opts_.reflexive_reach);
    if (auto projections = attempt(wf, po, is_conflict_hiding, [&](const IdSet& part) {
          return po_project(wf, part, ids_);
        })) {
      auto order = execution_order(wf, po.partition);
      ++stats_.partial_orders;
      return PowlNode::partial_order(std::move(order), recurse(*projections, depth));
    }

    AttemptDiagnostic cg;
    cg.partition = cg_partition(wf, opts_.cg_avoidance);
    if (auto projections = attempt(wf, cg, is_concurrency_hiding, [&](const IdSet& part) {
          return cg_project(wf, part, ids_);
        })) {
      auto flow = execution_flow(wf, cg.partition);
      ++stats_.choice_graphs;
      return PowlNode::choice_graph(std::move(flow), recurse(*projections, depth));
    }

    throw FallThrough{ConversionFailure{wf, std::move(po), std::move(cg), depth}};
  }

 private:
  template <class Check, class Project>
  std::optional<std::vector<WorkflowNet>> attempt(const WorkflowNet& wf, AttemptDiagnostic& diag,
                                                  Check check, Project project) {
    if (diag.partition.size() <= 1) {
      diag.outcome = Outcome::SinglePart;
      return std::nullopt;
    }
    auto verdict = check(wf, diag.partition);
    if (!verdict.ok()) {
      diag.outcome = Outcome::ConditionsViolated;
      diag.violations = std::move(verdict.violations);
      return std::nullopt;
    }
    std::vector<WorkflowNet> out;
    for (std::size_t i = 0; i < diag.partition.size(); ++i) {
      WorkflowNet sub = [&] {
        try {
          return project(diag.partition.part(i));
        } catch (const DecompositionError& e) {
          throw InternalInvariant(std::string("projection of a valid partition failed: ") +
                                  e.what());
        }
      }();
      if (stalls(wf.net(), sub.net())) {
        diag.outcome = Outcome::NoProgress;
        diag.stalled_part = i;
        return std::nullopt;
      }
      out.push_back(std::move(sub));
    }
    if (opts_.verify_projections)
      for (const auto& sub : out) verify(sub);
    return out;
  }

  // Counts first; a search that runs out of budget counts as no progress so
  // that the recursion always terminates.
  static bool stalls(const PetriNet& net, const PetriNet& sub) {
    if (net.place_count() != sub.place_count() ||
        net.transition_count() != sub.transition_count() ||
        net.arcs().size() != sub.arcs().size())
      return false;
    return isomorphism(net, sub) != IsoResult::NotIsomorphic;
  }

  void verify(const WorkflowNet& sub) {
    if (!validate_wf_net(sub.net()))
      throw InternalInvariant("projection is not a workflow net");
    auto safe = check_safe(sub, opts_.state_budget);
    if (safe.status == Verdict::No)
      throw InternalInvariant("projection is unsafe, e.g. " +
                              safe.witness->to_string(sub.net()));
    auto sound = check_sound(sub, opts_.state_budget);
    if (sound.status == Verdict::No)
      throw InternalInvariant(std::string("projection is unsound (") + to_string(sound.violated) +
                              ": " + sound.witness + ")");
    if (safe.status == Verdict::Unknown || sound.status == Verdict::Unknown)
      throw InternalInvariant("projection could not be verified within the state budget");
    ++stats_.projections_verified;
  }

  std::vector<PowlNode> recurse(const std::vector<WorkflowNet>& parts, std::size_t depth) {
    std::vector<PowlNode> children;
    children.reserve(parts.size());
    for (const auto& p : parts) children.push_back(run(p, depth + 1));
    return children;
  }

  const ConversionOptions& opts_;
  ConversionStats& stats_;
  FreshIds& ids_;
};

}  // namespace

const char* to_string(AttemptDiagnostic::Outcome o) {
  switch (o) {
    case Outcome::SinglePart: return "single part";
    case Outcome::ConditionsViolated: return "conditions violated";
    case Outcome::NoProgress: return "no structural progress";
  }
  return "?";
}

std::string AttemptDiagnostic::describe() const {
  std::ostringstream out;
  out << to_string(outcome) << " (" << partition.size() << " parts)";
  if (stalled_part) out << "; projection of part " << *stalled_part << " is isomorphic to the net";
  for (const auto& v : violations) out << "\n  " << v.describe(partition);
  return out.str();
}

std::string ConversionFailure::describe() const {
  std::ostringstream out;
  out << "irreducible fragment at depth " << depth << " (" << fragment.net().transition_count()
      << " transitions, " << fragment.net().place_count() << " places)\n"
      << "partial order: " << partial_order.describe() << "\n"
      << "choice graph: " << choice_graph.describe();
  return out.str();
}

std::optional<std::string> is_base_case(const WorkflowNet& wf) {
  const auto& net = wf.net();
  if (net.transition_count() != 1 || net.place_count() != 2 || net.arcs().size() != 2)
    return std::nullopt;
  const auto& t = net.transitions()[0];
  if (!net.arcs().count({wf.source(), t}) || !net.arcs().count({t, wf.sink()}))
    return std::nullopt;
  return t;
}

ConversionReport convert(const WorkflowNet& wf, const ConversionOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  ConversionReport report;
  FreshIds ids("_");
  ids.reserve(wf.net());
  WorkflowNet root = wf;
  if (opts.preprocess) {
    root = preprocess_net(wf, opts.rules, ids).net;
    ids.reserve(root.net());
  }
  report.converted_net = root;
  try {
    Converter c(opts, report.stats, ids);
    report.model = c.run(root, 0);
  } catch (FallThrough& f) {
    report.failure = std::move(f.failure);
  }
  report.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (report.model) {
    auto check = validate_powl(*report.model);
    if (!check) throw InternalInvariant("converted model is invalid at " + check.path + ": " +
                                        check.violation);
  }
  return report;
}

VerifiedConversion convert_and_verify(const WorkflowNet& wf, const ConversionOptions& opts,
                                      std::size_t max_len) {
  VerifiedConversion out{convert(wf, opts), std::nullopt};
  if (!out.report.model) return out;
  auto net_lang = enumerate_language(wf, max_len, opts.state_budget);
  auto model_lang = language_bounded(*out.report.model, max_len);
  out.equivalence = bounded_equal(net_lang, model_lang);
  return out;
}

}  // namespace wfpowl
