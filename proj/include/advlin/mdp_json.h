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

#pragma once

#include <string>

#include "json.hpp"

#include "advlin/mdp.h"

// JSON documents for MDP instances and loss tables.
//
// State-action pairs are keyed "h:i:a" (layer 1-based, index and action
// 0-based). MDP:
//   {"H":2,"A":2,"d":4,"layer_sizes":[1,2],
//    "features":{"1:0:0":[...],...},"transitions":{"1:0:0":[p0,p1],...}}
// Losses:
//   {"K":3,"episodes":{"1":{"1:0:0":0.2,...},"2":{...},...}}
// Parse failures raise ConfigError naming the offending field.
namespace advlin {

std::string pair_key(const StateId& s, int a);

nlohmann::json mdp_to_json(const LayeredMdp& mdp);
LayeredMdp mdp_from_json(const nlohmann::json& doc);

nlohmann::json losses_to_json(const LayeredMdp& mdp, const LossTable& losses);
LossTable losses_from_json(const LayeredMdp& mdp, const nlohmann::json& doc);

}  // namespace advlin
