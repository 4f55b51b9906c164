#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "powl/model.hpp"
#include "powl/net.hpp"

namespace wfpowl {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(line ? "line " + std::to_string(*line) + ": " + what : what),
        line(line) {}
  std::optional<std::size_t> line;
};

class NotAWorkflowNet : public std::runtime_error {
 public:
  explicit NotAWorkflowNet(WfDiagnostic d)
      : std::runtime_error("not a workflow net: " + d.message()), diagnostic(std::move(d)) {}
  WfDiagnostic diagnostic;
};

class UnsupportedFeature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PnmlOptions {
  /// Transition names equal to this are silent, as are empty or absent names.
  std::string silent_token = "tau";
  /// Also treat "skip", "silent", "invisible" and "tau_*" style names as silent.
  bool fuzzy_silent = false;
};

/// Reads a single-net, single-page P/T PNML document. Graphics and markings
/// are ignored.
PetriNet parse_pnml_net(const std::string& text, const PnmlOptions& opts = {});
/// parse_pnml_net followed by workflow-net validation.
WorkflowNet parse_pnml(const std::string& text, const PnmlOptions& opts = {});

/// Deterministic PNML; silent transitions get an empty name and the source
/// place carries one token.
std::string write_pnml(const PetriNet& net, const std::string& net_id = "net");
std::string write_pnml(const WorkflowNet& wf, const std::string& net_id = "net");

std::string serialize_powl(const PowlNode& model);
/// Throws ParseError on malformed documents and ModelError when the decoded
/// model fails validate_powl.
PowlNode parse_powl(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace wfpowl
