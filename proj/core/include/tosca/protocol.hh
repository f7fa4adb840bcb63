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

#ifndef TOSCA_PROTOCOL_HH_
#define TOSCA_PROTOCOL_HH_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tosca {

enum class Adornment { kIn, kOut };

std::string_view to_string(Adornment a);

struct ParameterDecl {
  std::string name;
  Adornment adornment = Adornment::kOut;
  bool is_key = false;

  bool operator==(const ParameterDecl&) const = default;
};

/// An atomic two-role protocol `sender -> receiver: name[params]`.
struct MessageSchema {
  std::string name;
  std::string sender;
  std::string receiver;
  std::vector<ParameterDecl> params;

  const ParameterDecl* find_param(std::string_view param) const;
  std::vector<std::string> key_names() const;

  bool operator==(const MessageSchema&) const = default;
};

/// Use of another protocol, binding its public roles and public parameters
/// positionally.
struct ProtocolReference {
  std::string name;
  std::vector<std::string> role_arguments;
  std::vector<ParameterDecl> param_arguments;

  bool operator==(const ProtocolReference&) const = default;
};

using Reference = std::variant<MessageSchema, ProtocolReference>;

const std::string& reference_name(const Reference& ref);

struct Protocol {
  std::string name;
  std::vector<std::string> public_roles;
  std::vector<std::string> private_roles;
  std::vector<ParameterDecl> public_params;
  std::vector<ParameterDecl> private_params;
  std::vector<Reference> references;

  std::vector<std::string> all_roles() const;
  bool has_role(std::string_view role) const;
  const ParameterDecl* find_param(std::string_view param) const;
  std::vector<std::string> key_names() const;
  bool is_key(std::string_view param) const;

  /// Direct message schemas, in declaration order.
  std::vector<const MessageSchema*> schemas() const;
  const MessageSchema* find_schema(std::string_view schema) const;

  bool operator==(const Protocol&) const = default;
};

/// Throws WellFormednessError naming the first violated condition.
void validate(const Protocol& p);

/// Parses exactly one protocol declaration.
Protocol parse_protocol(std::string_view source);

/// Parses a file of flat top-level protocol declarations, in order.
std::vector<Protocol> parse_protocols(std::string_view source);

/// Canonical text: declaration order is preserved, one reference per line,
/// key markers only at the protocol level (schema keys are implied).
std::string print_protocol(const Protocol& p);

class ProtocolRegistry {
 public:
  ProtocolRegistry() = default;
  explicit ProtocolRegistry(const std::vector<Protocol>& protocols);

  /// Replaces any existing protocol of the same name.
  void add(Protocol p);
  const Protocol* find(std::string_view name) const;
  const Protocol& at(std::string_view name) const;
  const std::map<std::string, Protocol, std::less<>>& all() const {
    return protocols_;
  }

 private:
  std::map<std::string, Protocol, std::less<>> protocols_;
};

/// Universe of discourse: the roles and the message schemas reachable
/// through references, with names substituted per reference arguments.
struct Uod {
  std::vector<std::string> roles;
  std::vector<MessageSchema> schemas;

  bool has_role(std::string_view role) const;
  const MessageSchema* find_schema(std::string_view name) const;

  bool operator==(const Uod&) const = default;
};

Uod uod(const Protocol& p, const ProtocolRegistry& registry);

}  // namespace tosca

#endif  // TOSCA_PROTOCOL_HH_
