// Copyright 2026 The adv-linmdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advlin/mdp_json.h"

#include <vector>

#include "advlin/errors.h"

namespace advlin {

using nlohmann::json;

namespace {

const json& field(const json& obj, const std::string& name,
                  const std::string& path) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ConfigError(path + name, "missing field");
  }
  return obj.at(name);
}

int positive_int(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ConfigError(path, "expected a positive integer");
  }
  return v.get<int>();
}

Eigen::VectorXd vector_of(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ConfigError(path + "[" + std::to_string(i) + "]",
                        "expected a number");
    }
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

json array_of(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

std::string pair_key(const StateId& s, int a) {
  return std::to_string(s.layer) + ":" + std::to_string(s.index) + ":" +
         std::to_string(a);
}

json mdp_to_json(const LayeredMdp& mdp) {
  json doc;
  doc["H"] = mdp.horizon();
  doc["A"] = mdp.num_actions();
  doc["d"] = mdp.feature_dim();
  doc["layer_sizes"] = mdp.layer_sizes();
  json features = json::object();
  json transitions = json::object();
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    const StateId id = mdp.state_id(s);
    for (int a = 0; a < mdp.num_actions(); ++a) {
      features[pair_key(id, a)] = array_of(mdp.feature(s, a));
      if (id.layer < mdp.horizon()) {
        transitions[pair_key(id, a)] = array_of(mdp.transition(s, a));
      }
    }
  }
  doc["features"] = std::move(features);
  doc["transitions"] = std::move(transitions);
  return doc;
}

LayeredMdp mdp_from_json(const json& doc) {
  const int H = positive_int(field(doc, "H", ""), "H");
  const int A = positive_int(field(doc, "A", ""), "A");
  const int d = positive_int(field(doc, "d", ""), "d");
  const json& sizes_doc = field(doc, "layer_sizes", "");
  if (!sizes_doc.is_array() || static_cast<int>(sizes_doc.size()) != H) {
    throw ConfigError("layer_sizes", "expected an array of length H");
  }
  std::vector<int> sizes;
  for (std::size_t h = 0; h < sizes_doc.size(); ++h) {
    sizes.push_back(positive_int(
        sizes_doc[h], "layer_sizes[" + std::to_string(h) + "]"));
  }
  const json& fdoc = field(doc, "features", "");
  const json& tdoc = field(doc, "transitions", "");
  std::vector<Eigen::VectorXd> features;
  std::vector<Eigen::VectorXd> transitions;
  for (int h = 1; h <= H; ++h) {
    for (int i = 0; i < sizes[h - 1]; ++i) {
      for (int a = 0; a < A; ++a) {
        const std::string key = pair_key({h, i}, a);
        features.push_back(
            vector_of(field(fdoc, key, "features."), "features." + key));
        if (h < H) {
          transitions.push_back(vector_of(field(tdoc, key, "transitions."),
                                          "transitions." + key));
        }
      }
    }
  }
  try {
    return LayeredMdp(H, A, d, std::move(sizes), std::move(features),
                      std::move(transitions));
  } catch (const InputError& e) {
    throw ConfigError("mdp", e.what());
  }
}

json losses_to_json(const LayeredMdp& mdp, const LossTable& losses) {
  json doc;
  doc["K"] = losses.episodes();
  json episodes = json::object();
  for (int k = 0; k < losses.episodes(); ++k) {
    json table = json::object();
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      for (int a = 0; a < mdp.num_actions(); ++a) {
        table[pair_key(mdp.state_id(s), a)] = losses.at(k, s, a);
      }
    }
    episodes[std::to_string(k + 1)] = std::move(table);
  }
  doc["episodes"] = std::move(episodes);
  return doc;
}

LossTable losses_from_json(const LayeredMdp& mdp, const json& doc) {
  const int K = positive_int(field(doc, "K", ""), "K");
  const json& edoc = field(doc, "episodes", "");
  const int A = mdp.num_actions();
  std::vector<double> values(static_cast<std::size_t>(K) * mdp.num_states() *
                             A);
  for (int k = 0; k < K; ++k) {
    const std::string ek = std::to_string(k + 1);
    const json& table = field(edoc, ek, "episodes.");
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      for (int a = 0; a < A; ++a) {
        const std::string key = pair_key(mdp.state_id(s), a);
        const std::string path = "episodes." + ek + "." + key;
        const json& v = field(table, key, "episodes." + ek + ".");
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        const double x = v.get<double>();
        if (!(x >= 0.0 && x <= 1.0)) {
          throw ConfigError(path, "loss must lie in [0, 1]");
        }
        values[(static_cast<std::size_t>(k) * mdp.num_states() + s) * A + a] =
            x;
      }
    }
  }
  return LossTable(K, mdp.num_states(), A, std::move(values));
}

}  // namespace advlin
