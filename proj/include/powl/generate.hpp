#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "powl/convert.hpp"
#include "powl/model.hpp"
#include "powl/net.hpp"

namespace wfpowl {

class UnsatisfiableParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GenParams {
  std::uint64_t seed = 1;
  /// Number of leaves of the generated model.
  std::size_t target_leaves = 10;
  std::size_t max_depth = 4;
  double leaf_weight = 1.0;  // only consulted when a single leaf is requested
  double partial_order_weight = 1.0;
  double choice_graph_weight = 1.0;
  std::size_t max_children = 5;
  double silent_probability = 0.1;
  double cycle_probability = 0.3;
  /// Extra forward edges in partial orders and choice graphs.
  double edge_density = 0.3;

  void validate() const;  // throws UnsatisfiableParams
};

/// Random POWL model with exactly target_leaves leaves, deterministic in the
/// params. Leaf ids are "t<i>", visible labels "a<i>".
PowlNode random_powl(const GenParams& params);

struct GeneratedNet {
  WorkflowNet net;
  PowlNode reference;
};

GeneratedNet generate_separable_net(const GenParams& params);

/// Picks the leaf count so that the generated net has close to
/// `transitions` transitions (routing transitions included).
GeneratedNet generate_with_transitions(std::uint64_t seed, std::size_t transitions,
                                       std::size_t max_depth = 4);

struct BenchRow {
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::size_t transitions = 0;
  std::size_t places = 0;
  double wall_ms = 0.0;
  bool success = false;
  std::size_t po_nodes = 0;
  std::size_t cg_nodes = 0;
};

std::vector<BenchRow> bench_run(const std::vector<std::size_t>& sizes, std::size_t per_size,
                                std::uint64_t seed_base = 1, const ConversionOptions& opts = {});

inline constexpr const char* kBenchCsvHeader =
    "size,seed,transitions,places,wall_ms,success,po_nodes,cg_nodes";

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace wfpowl
