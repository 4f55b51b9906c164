#include "powl/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

namespace wfpowl {
namespace {

namespace pt = boost::property_tree;
using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string attr(const pt::ptree& node, const std::string& name) {
  auto v = node.get_optional<std::string>("<xmlattr>." + name);
  return v ? *v : std::string();
}

std::string text_of(const pt::ptree& node, const std::string& child) {
  auto v = node.get_optional<std::string>(child + ".text");
  return v ? trim(*v) : std::string();
}

bool is_silent_name(const std::string& name, const PnmlOptions& opts) {
  if (name.empty() || name == opts.silent_token) return true;
  if (!opts.fuzzy_silent) return false;
  auto n = lower(name);
  for (const char* w : {"tau", "skip", "silent", "invisible"}) {
    std::string word = w;
    if (n == word || n.rfind(word + "_", 0) == 0 || n.rfind(word + " ", 0) == 0) return true;
  }
  return false;
}

bool prom_invisible(const pt::ptree& transition) {
  for (const auto& [tag, child] : transition)
    if (tag == "toolspecific" && attr(child, "activity") == "$invisible$") return true;
  return false;
}

const pt::ptree& single_child(const pt::ptree& parent, const std::string& tag,
                              const std::string& what) {
  const pt::ptree* found = nullptr;
  for (const auto& [t, child] : parent) {
    if (t != tag) continue;
    if (found) throw UnsupportedFeature("multiple " + what + " in one document");
    found = &child;
  }
  if (!found) throw ParseError("missing <" + tag + "> element");
  return *found;
}

// PNML arcs carry their weight as an inscription; anything but 1 is rejected.
void check_weight(const pt::ptree& arc, const std::string& id) {
  auto w = arc.get_optional<std::string>("inscription.text");
  if (!w) return;
  auto v = trim(*w);
  if (!v.empty() && v != "1") throw UnsupportedFeature("arc " + id + " has weight " + v);
}

json to_json(const PowlNode& node) {
  json j;
  if (node.is_leaf()) {
    const auto& l = node.as_leaf();
    j["kind"] = "transition";
    j["id"] = l.id;
    j["label"] = l.label.is_silent() ? json(nullptr) : json(l.label.name());
    return j;
  }
  json children = json::array();
  for (const auto& c : node.children()) children.push_back(to_json(c));
  if (node.is_partial_order()) {
    j["kind"] = "partial_order";
    j["children"] = std::move(children);
    json order = json::array();
    for (auto [a, b] : node.as_partial_order().order.relation()) order.push_back({a, b});
    j["order"] = std::move(order);
  } else {
    j["kind"] = "choice_graph";
    j["children"] = std::move(children);
    auto endpoint = [](long v) -> json {
      if (v == ChoiceGraphStruct::kStart) return "start";
      if (v == ChoiceGraphStruct::kEnd) return "end";
      return v;
    };
    json edges = json::array();
    for (auto [a, b] : node.as_choice_graph().graph.edges())
      edges.push_back({endpoint(a), endpoint(b)});
    j["edges"] = std::move(edges);
  }
  return j;
}

class PowlDecoder {
 public:
  PowlNode decode(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "node is not an object");
    auto kind = field(j, "kind", path);
    if (!kind.is_string()) fail(path, "\"kind\" must be a string");
    auto k = kind.get<std::string>();
    if (k == "transition") {
      auto id = field(j, "id", path);
      if (!id.is_string()) fail(path, "\"id\" must be a string");
      auto label = field(j, "label", path);
      if (label.is_null()) return PowlNode::leaf(id.get<std::string>(), Label::silent());
      if (!label.is_string() || label.get<std::string>().empty())
        fail(path, "\"label\" must be a non-empty string or null");
      return PowlNode::leaf(id.get<std::string>(), Label::activity(label.get<std::string>()));
    }
    if (k != "partial_order" && k != "choice_graph") fail(path, "unknown kind \"" + k + "\"");
    auto children_json = field(j, "children", path);
    if (!children_json.is_array()) fail(path, "\"children\" must be an array");
    std::vector<PowlNode> children;
    for (std::size_t i = 0; i < children_json.size(); ++i)
      children.push_back(decode(children_json[i], path + "/" + std::to_string(i)));
    const std::size_t n = children.size();
    if (k == "partial_order") {
      auto order = field(j, "order", path);
      if (!order.is_array()) fail(path, "\"order\" must be an array");
      std::set<std::pair<std::size_t, std::size_t>> rel;
      for (const auto& e : order) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
            !e[1].is_number_unsigned())
          fail(path, "order entries must be pairs of child indices");
        rel.insert({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
      }
      try {
        return PowlNode::partial_order(OrderStruct(n, rel), std::move(children));
      } catch (const ModelError& e) {
        throw ModelError(path_of(path) + ": " + e.what());
      }
    }
    auto edges_json = field(j, "edges", path);
    if (!edges_json.is_array()) fail(path, "\"edges\" must be an array");
    std::set<ChoiceGraphStruct::Edge> edges;
    for (const auto& e : edges_json) {
      if (!e.is_array() || e.size() != 2) fail(path, "edges must be pairs");
      edges.insert({endpoint(e[0], path), endpoint(e[1], path)});
    }
    return PowlNode::choice_graph(ChoiceGraphStruct(n, std::move(edges)), std::move(children));
  }

 private:
  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ParseError(path_of(path) + ": " + what);
  }
  static std::string path_of(const std::string& path) { return path.empty() ? "/" : path; }

  static const json& field(const json& j, const char* name, const std::string& path) {
    auto it = j.find(name);
    if (it == j.end()) fail(path, std::string("missing \"") + name + "\"");
    return *it;
  }

  static long endpoint(const json& v, const std::string& path) {
    if (v.is_string()) {
      auto s = v.get<std::string>();
      if (s == "start") return ChoiceGraphStruct::kStart;
      if (s == "end") return ChoiceGraphStruct::kEnd;
      fail(path, "unknown edge endpoint \"" + s + "\"");
    }
    if (!v.is_number_unsigned()) fail(path, "edge endpoints are child indices, \"start\" or \"end\"");
    return static_cast<long>(v.get<std::size_t>());
  }
};

}  // namespace

PetriNet parse_pnml_net(const std::string& text, const PnmlOptions& opts) {
  pt::ptree doc;
  try {
    std::istringstream in(text);
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  const auto& root = single_child(doc, "pnml", "documents");
  const auto& net = single_child(root, "net", "nets");
  const pt::ptree* content = &net;
  if (net.count("page") > 1) throw UnsupportedFeature("multiple pages in one net");
  if (net.count("page") == 1) {
    content = &net.get_child("page");
    if (content->count("page")) throw UnsupportedFeature("nested pages");
  }

  NetBuilder b;
  std::vector<std::pair<std::string, std::string>> arcs;
  std::set<std::string> seen;
  auto claim = [&](const std::string& id, const char* what) {
    if (id.empty()) throw ParseError(std::string(what) + " without id");
    if (!seen.insert(id).second) throw ParseError("duplicate id \"" + id + "\"");
  };
  for (const auto& [tag, node] : *content) {
    if (tag == "place") {
      auto id = attr(node, "id");
      claim(id, "place");
      b.place(id);
    } else if (tag == "transition") {
      auto id = attr(node, "id");
      claim(id, "transition");
      auto name = text_of(node, "name");
      bool silent = prom_invisible(node) || is_silent_name(name, opts);
      b.transition(id, silent ? Label::silent() : Label::activity(name));
    } else if (tag == "arc") {
      auto id = attr(node, "id");
      check_weight(node, id);
      arcs.emplace_back(attr(node, "source"), attr(node, "target"));
    }
  }
  try {
    for (const auto& [s, t] : arcs) b.arc(s, t);
    return b.build();
  } catch (const NetError& e) {
    throw ParseError(e.what());
  }
}

WorkflowNet parse_pnml(const std::string& text, const PnmlOptions& opts) {
  auto check = validate_wf_net(parse_pnml_net(text, opts));
  if (!check) throw NotAWorkflowNet(*check.diagnostic);
  return std::move(*check.net);
}

std::string write_pnml(const PetriNet& net, const std::string& net_id) {
  auto sources = std::count_if(net.places().begin(), net.places().end(),
                               [&](const std::string& p) { return preset(net, p).empty(); });
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<pnml>\n"
      << "  <net id=\"" << net_id
      << "\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n"
      << "    <page id=\"page0\">\n";
  auto escape = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      switch (c) {
        case '&': r += "&amp;"; break;
        case '<': r += "&lt;"; break;
        case '>': r += "&gt;"; break;
        case '"': r += "&quot;"; break;
        default: r += c;
      }
    }
    return r;
  };
  for (const auto& p : net.places()) {
    out << "      <place id=\"" << escape(p) << "\">\n"
        << "        <name><text>" << escape(p) << "</text></name>\n";
    if (sources == 1 && preset(net, p).empty())
      out << "        <initialMarking><text>1</text></initialMarking>\n";
    out << "      </place>\n";
  }
  for (const auto& t : net.transitions()) {
    const auto& l = net.label(t);
    out << "      <transition id=\"" << escape(t) << "\">\n"
        << "        <name><text>" << (l.is_silent() ? "" : escape(l.name())) << "</text></name>\n"
        << "      </transition>\n";
  }
  std::size_t i = 0;
  for (const auto& a : net.arcs())
    out << "      <arc id=\"a" << i++ << "\" source=\"" << escape(a.source) << "\" target=\""
        << escape(a.target) << "\"/>\n";
  out << "    </page>\n  </net>\n</pnml>\n";
  return out.str();
}

std::string write_pnml(const WorkflowNet& wf, const std::string& net_id) {
  return write_pnml(wf.net(), net_id);
}

std::string serialize_powl(const PowlNode& model) { return to_json(model).dump(2) + "\n"; }

PowlNode parse_powl(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  auto model = PowlDecoder().decode(j, "");
  auto check = validate_powl(model);
  if (!check) throw ModelError((check.path.empty() ? "/" : check.path) + ": " + check.violation);
  return model;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace wfpowl
