#include <json.hpp>

#include "flowsim/error.hpp"
#include "flowsim/synth.hpp"

namespace flowsim {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::LayoutInvalid, what);
}

const json& require(const json& obj, const char* field, const std::string& where) {
  if (!obj.is_object() || !obj.contains(field)) invalid(where + ": missing '" + field + "'");
  return obj.at(field);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) invalid(where + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) invalid(where + ": expected an integer");
  return v.get<int>();
}

Vec2 pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) invalid(where + ": expected [x, y]");
  return {number(v[0], where), number(v[1], where)};
}

NodeSpec parse_node(const json& n, const std::string& where) {
  NodeSpec node;
  const auto& role = require(n, "role", where);
  if (!role.is_string()) invalid(where + ": role must be a string");
  const auto parsed = role_from_string(role.get<std::string>());
  if (!parsed) invalid(where + ": unknown role '" + role.get<std::string>() + "'");
  node.role = *parsed;
  node.center = pair(require(n, "center", where), where + ".center");

  const auto& size = require(n, "size", where);
  if (node.role == FlowchartRole::Connector) {
    // A bare number or a one-element array gives the radius.
    if (size.is_array() && size.size() == 1) {
      const double r = number(size[0], where + ".size");
      node.size = {r, r};
    } else if (size.is_number()) {
      const double r = size.get<double>();
      node.size = {r, r};
    } else {
      node.size = pair(size, where + ".size");
    }
  } else {
    node.size = pair(size, where + ".size");
  }

  if (n.contains("filled")) {
    if (!n.at("filled").is_boolean()) invalid(where + ": filled must be a boolean");
    node.filled = n.at("filled").get<bool>();
  }
  if (n.contains("label") && !n.at("label").is_null()) {
    const auto& l = n.at("label");
    LabelSpec label;
    if (l.contains("glyphs")) label.glyphs = integer(l.at("glyphs"), where + ".label.glyphs");
    if (l.contains("seed")) {
      if (!l.at("seed").is_number_unsigned()) invalid(where + ".label.seed: expected an unsigned integer");
      label.seed = l.at("seed").get<std::uint64_t>();
    }
    if (label.glyphs < 0) invalid(where + ".label.glyphs: must be >= 0");
    node.label = label;
  }
  return node;
}

EdgeSpec parse_edge(const json& e, const std::string& where) {
  EdgeSpec edge;
  const int from = integer(require(e, "from", where), where + ".from");
  const int to = integer(require(e, "to", where), where + ".to");
  if (from < 0 || to < 0) invalid(where + ": negative node index");
  edge.from = static_cast<std::size_t>(from);
  edge.to = static_cast<std::size_t>(to);
  if (e.contains("waypoints")) {
    const auto& w = e.at("waypoints");
    if (!w.is_array()) invalid(where + ".waypoints: expected an array");
    for (const auto& p : w) edge.waypoints.push_back(pair(p, where + ".waypoints"));
  }
  if (e.contains("arrowhead")) {
    if (!e.at("arrowhead").is_boolean()) invalid(where + ": arrowhead must be a boolean");
    edge.arrowhead = e.at("arrowhead").get<bool>();
  }
  return edge;
}

ordered_json pair_json(Vec2 v) { return ordered_json::array({v.x, v.y}); }

}  // namespace

Layout layout_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("layout is not JSON: ") + e.what());
  }
  if (!doc.is_object()) invalid("layout must be a JSON object");

  Layout layout;
  const auto& canvas = require(doc, "canvas", "layout");
  layout.canvas.width = integer(require(canvas, "width", "canvas"), "canvas.width");
  layout.canvas.height = integer(require(canvas, "height", "canvas"), "canvas.height");
  if (doc.contains("stroke_width")) layout.stroke_width = integer(doc.at("stroke_width"), "stroke_width");

  if (doc.contains("nodes")) {
    const auto& nodes = doc.at("nodes");
    if (!nodes.is_array()) invalid("nodes must be an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      layout.nodes.push_back(parse_node(nodes[i], "nodes[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("edges")) {
    const auto& edges = doc.at("edges");
    if (!edges.is_array()) invalid("edges must be an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      layout.edges.push_back(parse_edge(edges[i], "edges[" + std::to_string(i) + "]"));
    }
  }
  return layout;
}

std::string layout_to_json(const Layout& layout) {
  ordered_json doc;
  doc["canvas"] = {{"width", layout.canvas.width}, {"height", layout.canvas.height}};
  doc["stroke_width"] = layout.stroke_width;
  doc["nodes"] = ordered_json::array();
  for (const auto& n : layout.nodes) {
    ordered_json node;
    node["role"] = std::string(to_string(n.role));
    node["center"] = pair_json(n.center);
    node["size"] = pair_json(n.size);
    node["filled"] = n.filled;
    if (n.label) {
      ordered_json label;
      label["glyphs"] = n.label->glyphs;
      label["seed"] = n.label->seed;
      node["label"] = std::move(label);
    }
    doc["nodes"].push_back(std::move(node));
  }
  doc["edges"] = ordered_json::array();
  for (const auto& e : layout.edges) {
    ordered_json edge;
    edge["from"] = e.from;
    edge["to"] = e.to;
    edge["waypoints"] = ordered_json::array();
    for (const auto& w : e.waypoints) edge["waypoints"].push_back(pair_json(w));
    edge["arrowhead"] = e.arrowhead;
    doc["edges"].push_back(std::move(edge));
  }
  return doc.dump(2) + "\n";
}

std::string truth_to_json(const GroundTruth& truth) {
  ordered_json doc;
  doc["vector"] = {{"connector", truth.vector.connector},
                   {"start_stop", truth.vector.start_stop},
                   {"decision", truth.vector.decision},
                   {"process", truth.vector.process}};
  doc["nodes"] = ordered_json::array();
  for (const auto& n : truth.nodes) {
    ordered_json node;
    node["role"] = std::string(to_string(n.role));
    node["A"] = n.max_radius;
    node["B"] = n.min_radius;
    node["C"] = n.area;
    doc["nodes"].push_back(std::move(node));
  }
  ordered_json prov;
  const auto counts = truth.tag_counts();
  for (std::size_t i = 1; i < kPixelTagCount; ++i) {
    prov[std::string(to_string(static_cast<PixelTag>(i)))] = counts[i];
  }
  doc["provenance"] = std::move(prov);
  return doc.dump(2) + "\n";
}

}  // namespace flowsim
