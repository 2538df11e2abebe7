// Copyright 2026 The vflcost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VFLCOST_VARIABLES_H_
#define VFLCOST_VARIABLES_H_

#include <string>
#include <vector>

#include "vflcost/infomath.h"

namespace vflcost {

inline constexpr char kLabelName[] = "Y";
inline constexpr char kSharedName[] = "Xhat";

// "X1", "X2", ... for agent k = 1..K.
inline std::string FeatureName(int agent) {
  return "X" + std::to_string(agent);
}

inline std::vector<infomath::VariableSpec> BinaryFeatures(int agents) {
  std::vector<infomath::VariableSpec> out;
  for (int k = 1; k <= agents; ++k) out.push_back({FeatureName(k), 2});
  return out;
}

inline infomath::VariableSpec BinaryLabel() { return {kLabelName, 2}; }

}  // namespace vflcost

#endif  // VFLCOST_VARIABLES_H_
