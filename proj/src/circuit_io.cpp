#include "circlet/circuit.hpp"
#include "circlet/errors.hpp"
#include "serialize_util.hpp"

namespace circlet {

namespace {
constexpr int kCircuitFormatVersion = 1;

const char* kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::kSum: return "sum";
    case NodeKind::kProduct: return "product";
    case NodeKind::kLeaf: return "leaf";
  }
  return "?";
}

}  // namespace

void save_circuit(const Circuit& c, const std::filesystem::path& path) {
  validate(c);
  nlohmann::json j;
  j["format_version"] = kCircuitFormatVersion;
  j["var_count"] = c.var_count;
  j["root"] = c.root;

  auto nodes = nlohmann::json::array();
  for (std::uint32_t id = 0; id < c.nodes.size(); ++id) {
    const CircuitNode& n = c.nodes[id];
    nlohmann::json entry;
    entry["kind"] = kind_name(n.kind);
    if (n.kind == NodeKind::kLeaf) {
      entry["var"] = n.var;
      entry["log_p"] = {detail::encode_log(n.log_p[0]), detail::encode_log(n.log_p[1])};
    } else {
      entry["children"] = c.children_of(id);
      if (n.kind == NodeKind::kSum) {
        auto weights = nlohmann::json::array();
        for (double w : c.weights_of(id)) weights.push_back(detail::encode_log(w));
        entry["log_weights"] = std::move(weights);
      }
    }
    nodes.push_back(std::move(entry));
  }
  j["nodes"] = std::move(nodes);
  detail::write_json_file(j, path);
}

Circuit load_circuit(const std::filesystem::path& path) {
  const nlohmann::json j = detail::read_json_file(path);
  detail::require_version(j, kCircuitFormatVersion);

  Circuit c;
  c.var_count = j.at("var_count").get<std::int32_t>();
  c.root = j.at("root").get<std::uint32_t>();
  const auto& nodes = j.at("nodes");
  if (!nodes.is_array() || nodes.empty()) throw ModelError("nodes must be a non-empty array");

  for (std::uint32_t id = 0; id < nodes.size(); ++id) {
    const auto& entry = nodes[id];
    const std::string kind = entry.at("kind").get<std::string>();
    CircuitNode n;
    if (kind == "leaf") {
      n.kind = NodeKind::kLeaf;
      n.var = entry.at("var").get<std::int32_t>();
      const auto& log_p = entry.at("log_p");
      if (!log_p.is_array() || log_p.size() != 2)
        throw InvariantViolation(id, "log_p must have 2 entries");
      n.log_p = {detail::decode_log(log_p[0], "log_p"), detail::decode_log(log_p[1], "log_p")};
    } else if (kind == "sum" || kind == "product") {
      n.kind = kind == "sum" ? NodeKind::kSum : NodeKind::kProduct;
      const auto& children = entry.at("children");
      if (!children.is_array()) throw InvariantViolation(id, "children must be an array");
      n.edge_begin = static_cast<std::uint32_t>(c.edges.size());
      n.edge_count = static_cast<std::uint32_t>(children.size());
      for (const auto& child : children) c.edges.push_back(child.get<std::uint32_t>());
      if (n.kind == NodeKind::kSum) {
        const auto& weights = entry.at("log_weights");
        if (!weights.is_array() || weights.size() != children.size())
          throw InvariantViolation(id, "one weight per child required");
        for (const auto& w : weights)
          c.edge_log_weights.push_back(detail::decode_log(w, "log_weights"));
      } else {
        c.edge_log_weights.resize(c.edges.size(), 0.0);
      }
    } else {
      throw InvariantViolation(id, "unknown node kind \"" + kind + "\"");
    }
    c.nodes.push_back(n);
  }

  validate(c);  // rejects dangling children, empty or unnormalized sums
  c.scope = scope_of(c);
  return c;
}

}  // namespace circlet
