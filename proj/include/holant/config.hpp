#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "holant/error.hpp"
#include "holant/graph.hpp"
#include "holant/instance.hpp"

// Instance config files: JSON with fields
//   graph      path to an edge-list file (resolved relative to the config)
//   model      "b_matching" | "b_edge_cover" | "custom"
//   b          integer or per-vertex array (b_matching); integer (b_edge_cover)
//   lambda     real or per-edge array; overrides the graph file's column
//   signatures custom only: object mapping vertex selectors to real arrays
//              or shorthand builders {"b_matching": b} / {"b_edge_cover": b}.
//              Selectors: "all", "degree:k", "ids:0,2,5". Applied in
//              specificity order: all, then degree (ascending k), then ids.
namespace holant {

struct LoadedModel {
  HolantInstance instance;   // for b_edge_cover: the complement instance
  std::string model;
  bool complemented = false; // sample outputs need S -> E \ S
  double cover_lambda = 1.0; // original lambda of the cover model
  int cover_b = 0;
};

namespace config_detail {

inline std::vector<int> parse_selector_ids(const std::string& sel) {
  std::vector<int> ids;
  std::string rest = sel.substr(4);  // after "ids:"
  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    ids.push_back(std::stoi(rest.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return ids;
}

inline Signature signature_for(const nlohmann::json& value, int degree) {
  if (value.is_array()) {
    std::vector<double> vals = value.get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != degree + 1)
      throw HolantError(Errc::parse_error,
                        "signature array length must equal vertex degree + 1");
    return Signature::checked(std::move(vals));
  }
  if (value.is_object()) {
    if (value.contains("b_matching"))
      return b_matching_signature(degree, value.at("b_matching").get<int>());
    if (value.contains("b_edge_cover"))
      return at_least_signature(degree, value.at("b_edge_cover").get<int>());
  }
  throw HolantError(Errc::parse_error, "signature spec must be an array or a shorthand object");
}

}  // namespace config_detail

inline LoadedModel load_model_config(const std::filesystem::path& config_path) {
  std::ifstream in(config_path);
  if (!in)
    throw HolantError(Errc::parse_error, "cannot open config file: " + config_path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, true);  // allow comments
  } catch (const nlohmann::json::exception& e) {
    throw HolantError(Errc::parse_error, "config JSON error: " + std::string(e.what()));
  }
  try {
    if (!doc.contains("graph"))
      throw HolantError(Errc::parse_error, "config missing \"graph\"");
    std::filesystem::path gpath = doc.at("graph").get<std::string>();
    if (gpath.is_relative()) gpath = config_path.parent_path() / gpath;
    std::ifstream gin(gpath);
    if (!gin)
      throw HolantError(Errc::parse_error, "cannot open graph file: " + gpath.string());
    ParsedGraph pg = parse_graph_text(gin);
    const Graph& g = pg.graph;
    int m = g.edge_count();

    std::vector<double> lambdas = pg.lambdas;
    if (doc.contains("lambda")) {
      const auto& lj = doc.at("lambda");
      if (lj.is_array()) {
        lambdas = lj.get<std::vector<double>>();
        if (static_cast<int>(lambdas.size()) != m)
          throw HolantError(Errc::parse_error, "lambda array length must equal edge count");
      } else {
        lambdas.assign(static_cast<std::size_t>(m), lj.get<double>());
      }
    }

    std::string model = doc.value("model", std::string("b_matching"));
    if (model == "b_matching") {
      std::vector<int> bs(static_cast<std::size_t>(g.vertex_count()), 1);
      if (doc.contains("b")) {
        const auto& bj = doc.at("b");
        if (bj.is_array()) {
          bs = bj.get<std::vector<int>>();
          if (static_cast<int>(bs.size()) != g.vertex_count())
            throw HolantError(Errc::parse_error, "b array length must equal vertex count");
        } else {
          bs.assign(static_cast<std::size_t>(g.vertex_count()), bj.get<int>());
        }
      }
      return LoadedModel{build_b_matching(g, bs, lambdas), model, false, 1.0, 0};
    }
    if (model == "b_edge_cover") {
      int b = doc.value("b", 1);
      double lam = lambdas.empty() ? 1.0 : lambdas.front();
      for (double l : lambdas)
        if (l != lam)
          throw HolantError(Errc::parse_error, "b_edge_cover requires a uniform lambda");
      BEdgeCoverModel cover = build_b_edge_cover(g, b, lam);
      return LoadedModel{std::move(cover.complement_instance), model, true, lam, b};
    }
    if (model == "custom") {
      if (!doc.contains("signatures"))
        throw HolantError(Errc::parse_error, "custom model requires \"signatures\"");
      const auto& sj = doc.at("signatures");
      std::vector<std::optional<Signature>> sigs(static_cast<std::size_t>(g.vertex_count()));
      auto apply = [&](const std::vector<int>& vs, const nlohmann::json& value) {
        for (int v : vs) {
          if (v < 0 || v >= g.vertex_count())
            throw HolantError(Errc::parse_error, "signature selector vertex out of range");
          sigs[static_cast<std::size_t>(v)] = config_detail::signature_for(value, g.degree(v));
        }
      };
      if (sj.contains("all")) {
        std::vector<int> all(static_cast<std::size_t>(g.vertex_count()));
        for (int v = 0; v < g.vertex_count(); ++v) all[static_cast<std::size_t>(v)] = v;
        apply(all, sj.at("all"));
      }
      std::map<int, nlohmann::json> by_degree;
      std::map<std::string, nlohmann::json> by_ids;
      for (auto it = sj.begin(); it != sj.end(); ++it) {
        const std::string& key = it.key();
        if (key == "all") continue;
        if (key.rfind("degree:", 0) == 0)
          by_degree[std::stoi(key.substr(7))] = it.value();
        else if (key.rfind("ids:", 0) == 0)
          by_ids[key] = it.value();
        else
          throw HolantError(Errc::parse_error, "unknown signature selector: " + key);
      }
      for (const auto& [deg, value] : by_degree) {
        std::vector<int> vs;
        for (int v = 0; v < g.vertex_count(); ++v)
          if (g.degree(v) == deg) vs.push_back(v);
        apply(vs, value);
      }
      for (const auto& [key, value] : by_ids) apply(config_detail::parse_selector_ids(key), value);
      std::vector<Signature> final_sigs;
      for (int v = 0; v < g.vertex_count(); ++v) {
        if (!sigs[static_cast<std::size_t>(v)])
          throw HolantError(Errc::parse_error,
                            "no signature assigned to vertex " + std::to_string(v));
        final_sigs.push_back(*sigs[static_cast<std::size_t>(v)]);
      }
      return LoadedModel{HolantInstance::make(g, std::move(final_sigs), lambdas), model, false,
                         1.0, 0};
    }
    throw HolantError(Errc::parse_error, "unknown model: " + model);
  } catch (const nlohmann::json::exception& e) {
    throw HolantError(Errc::parse_error, "config JSON error: " + std::string(e.what()));
  }
}

}  // namespace holant
