#include "circlet/clt.hpp"
#include "circlet/errors.hpp"
#include "serialize_util.hpp"

namespace circlet {

namespace {
constexpr int kCltFormatVersion = 1;
}

void save_clt(const Clt& model, const std::filesystem::path& path) {
  check_clt(model);
  nlohmann::json j;
  j["format_version"] = kCltFormatVersion;
  j["var_count"] = model.var_count;
  j["root"] = model.root;

  auto parents = nlohmann::json::array();
  for (std::int32_t p : model.parent) {
    if (p == -1)
      parents.push_back(nullptr);
    else
      parents.push_back(p);
  }
  j["parents"] = std::move(parents);

  auto factors = nlohmann::json::array();
  for (std::int32_t i = 0; i < model.var_count; ++i) {
    const auto& table = model.log_factors[static_cast<std::size_t>(i)];
    if (model.parent[static_cast<std::size_t>(i)] == -1) {
      factors.push_back({detail::encode_log(table[0][0]), detail::encode_log(table[0][1])});
    } else {
      factors.push_back({{detail::encode_log(table[0][0]), detail::encode_log(table[0][1])},
                         {detail::encode_log(table[1][0]), detail::encode_log(table[1][1])}});
    }
  }
  j["log_factors"] = std::move(factors);
  detail::write_json_file(j, path);
}

Clt load_clt(const std::filesystem::path& path) {
  const nlohmann::json j = detail::read_json_file(path);
  detail::require_version(j, kCltFormatVersion);

  Clt model;
  model.var_count = j.at("var_count").get<std::int32_t>();
  model.root = j.at("root").get<std::int32_t>();
  if (model.var_count < 1) throw ModelError("var_count must be >= 1");

  const auto& parents = j.at("parents");
  const auto& factors = j.at("log_factors");
  if (!parents.is_array() || parents.size() != static_cast<std::size_t>(model.var_count))
    throw ModelError("parents must list one entry per variable");
  if (!factors.is_array() || factors.size() != static_cast<std::size_t>(model.var_count))
    throw ModelError("log_factors must list one table per variable");

  if (model.root < 0 || model.root >= model.var_count)
    throw InvariantViolation(0, "root index out of range");
  model.parent.reserve(parents.size());
  for (const auto& p : parents) {
    const std::int32_t value = p.is_null() ? -1 : p.get<std::int32_t>();
    if (value < -1 || value >= model.var_count)
      throw InvariantViolation(static_cast<std::uint32_t>(model.parent.size()),
                               "parent index out of range");
    model.parent.push_back(value);
  }

  model.log_factors.assign(static_cast<std::size_t>(model.var_count), {});
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& entry = factors[i];
    auto& table = model.log_factors[i];
    if (model.parent[i] == -1) {
      if (!entry.is_array() || entry.size() != 2)
        throw InvariantViolation(static_cast<std::uint32_t>(i), "root prior must have 2 entries");
      table[0][0] = table[1][0] = detail::decode_log(entry[0], "log_factors");
      table[0][1] = table[1][1] = detail::decode_log(entry[1], "log_factors");
    } else {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array() ||
          entry[0].size() != 2 || !entry[1].is_array() || entry[1].size() != 2)
        throw InvariantViolation(static_cast<std::uint32_t>(i),
                                 "conditional table must be 2x2");
      for (int s = 0; s < 2; ++s)
        for (int v = 0; v < 2; ++v)
          table[s][v] = detail::decode_log(entry[s][v], "log_factors");
    }
  }

  model.rebuild_derived();
  if (model.topo_order.size() != static_cast<std::size_t>(model.var_count))
    throw InvariantViolation(0, "parent links do not form a single connected tree");

  check_clt(model);
  return model;
}

}  // namespace circlet
