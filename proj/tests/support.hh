/*
 * Copyright (c) 2026, The Tosca Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TOSCA_TESTS_SUPPORT_HH_
#define TOSCA_TESTS_SUPPORT_HH_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tosca/error.hh"
#include "tosca/protocol.hh"
#include "tosca/simulation.hh"

namespace tosca::testing {

inline std::filesystem::path fixture(std::string_view rel) {
  return std::filesystem::path(TOSCA_FIXTURE_DIR) / rel;
}

inline std::vector<Protocol> protocols_in(std::string_view rel) {
  return parse_protocols(read_file(fixture(rel)));
}

inline Protocol protocol_in(std::string_view rel, std::string_view name) {
  for (auto& p : protocols_in(rel))
    if (p.name == name) return p;
  throw Error("no protocol " + std::string(name) + " in " + std::string(rel));
}

inline std::vector<CommitmentSpec> commitments_in(std::string_view rel) {
  CommitmentRegistry reg;
  return parse_commitments(read_file(fixture(rel)), reg);
}

inline CommitmentSpec commitment_in(std::string_view rel,
                                    std::string_view name) {
  for (auto& c : commitments_in(rel))
    if (c.name == name) return c;
  throw Error("no commitment " + std::string(name) + " in " +
              std::string(rel));
}

}  // namespace tosca::testing

#endif  // TOSCA_TESTS_SUPPORT_HH_
