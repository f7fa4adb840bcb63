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

#include "tosca/protocol.hh"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lexer.hh"
#include "tosca/error.hh"

namespace tosca {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

std::string_view to_string(Adornment a) {
  return a == Adornment::kIn ? "in" : "out";
}

const ParameterDecl* MessageSchema::find_param(std::string_view param) const {
  for (const auto& p : params)
    if (p.name == param) return &p;
  return nullptr;
}

std::vector<std::string> MessageSchema::key_names() const {
  std::vector<std::string> keys;
  for (const auto& p : params)
    if (p.is_key) keys.push_back(p.name);
  return keys;
}

const std::string& reference_name(const Reference& ref) {
  return std::visit([](const auto& r) -> const std::string& { return r.name; },
                    ref);
}

std::vector<std::string> Protocol::all_roles() const {
  std::vector<std::string> roles = public_roles;
  roles.insert(roles.end(), private_roles.begin(), private_roles.end());
  return roles;
}

bool Protocol::has_role(std::string_view role) const {
  return std::find(public_roles.begin(), public_roles.end(), role) !=
             public_roles.end() ||
         std::find(private_roles.begin(), private_roles.end(), role) !=
             private_roles.end();
}

const ParameterDecl* Protocol::find_param(std::string_view param) const {
  for (const auto& p : public_params)
    if (p.name == param) return &p;
  for (const auto& p : private_params)
    if (p.name == param) return &p;
  return nullptr;
}

std::vector<std::string> Protocol::key_names() const {
  std::vector<std::string> keys;
  for (const auto& p : public_params)
    if (p.is_key) keys.push_back(p.name);
  return keys;
}

bool Protocol::is_key(std::string_view param) const {
  for (const auto& p : public_params)
    if (p.name == param) return p.is_key;
  return false;
}

std::vector<const MessageSchema*> Protocol::schemas() const {
  std::vector<const MessageSchema*> out;
  for (const auto& r : references)
    if (const auto* s = std::get_if<MessageSchema>(&r)) out.push_back(s);
  return out;
}

const MessageSchema* Protocol::find_schema(std::string_view schema) const {
  for (const auto* s : schemas())
    if (s->name == schema) return s;
  return nullptr;
}

namespace {

using Problem = std::optional<std::string>;

Problem check_header(const Protocol& p) {
  if (p.name.empty()) return "protocol name is empty";
  std::set<std::string, std::less<>> seen;
  for (const auto& r : p.all_roles()) {
    if (!seen.insert(r).second)
      return fmt::format("role {} declared twice", r);
  }
  seen.clear();
  for (const auto* list : {&p.public_params, &p.private_params}) {
    for (const auto& prm : *list) {
      if (prm.name.empty()) return std::string("parameter name is empty");
      if (!seen.insert(prm.name).second)
        return fmt::format("parameter {} declared twice", prm.name);
    }
  }
  for (const auto& prm : p.private_params) {
    if (prm.is_key)
      return fmt::format("private parameter {} cannot be a key", prm.name);
  }
  return std::nullopt;
}

// Conditions on a single reference, given the enclosing header.
Problem check_params_against(const Protocol& p, std::string_view owner,
                             const std::vector<ParameterDecl>& params) {
  std::set<std::string, std::less<>> seen;
  for (const auto& prm : params) {
    if (!seen.insert(prm.name).second)
      return fmt::format("parameter {} appears twice in {}", prm.name, owner);
    if (!p.find_param(prm.name))
      return fmt::format("parameter {} of {} is not declared by protocol {}",
                         prm.name, owner, p.name);
    if (prm.is_key != p.is_key(prm.name)) {
      return prm.is_key
                 ? fmt::format("{} marks {} as key but protocol {} does not",
                               owner, prm.name, p.name)
                 : fmt::format("key parameter {} of protocol {} is not a key "
                               "in {}",
                               prm.name, p.name, owner);
    }
  }
  return std::nullopt;
}

Problem check_schema(const Protocol& p, const MessageSchema& s) {
  if (s.name.empty()) return std::string("schema name is empty");
  if (s.sender == s.receiver)
    return fmt::format("schema {}: sender equals receiver ({})", s.name,
                       s.sender);
  for (const auto* role : {&s.sender, &s.receiver}) {
    if (!p.has_role(*role))
      return fmt::format("schema {}: role {} is not declared by protocol {}",
                         s.name, *role, p.name);
  }
  if (s.params.empty())
    return fmt::format("schema {} has no parameters", s.name);
  if (auto prob = check_params_against(p, "schema " + s.name, s.params))
    return prob;
  if (std::none_of(s.params.begin(), s.params.end(),
                   [](const ParameterDecl& d) { return d.is_key; }))
    return fmt::format("schema {} has no key parameter", s.name);
  return std::nullopt;
}

Problem check_reference(const Protocol& p, const ProtocolReference& r) {
  for (const auto& role : r.role_arguments) {
    if (!p.has_role(role))
      return fmt::format("reference {}: role {} is not declared by protocol {}",
                         r.name, role, p.name);
  }
  return check_params_against(p, "reference " + r.name, r.param_arguments);
}

Problem check_reference_name(const Protocol& p, std::size_t index) {
  const std::string& name = reference_name(p.references[index]);
  for (std::size_t i = 0; i < index; ++i) {
    if (reference_name(p.references[i]) == name)
      return fmt::format("reference name {} is used twice", name);
  }
  return std::nullopt;
}

Problem check_reference_at(const Protocol& p, std::size_t index) {
  if (auto prob = check_reference_name(p, index)) return prob;
  const Reference& ref = p.references[index];
  if (const auto* s = std::get_if<MessageSchema>(&ref))
    return check_schema(p, *s);
  return check_reference(p, std::get<ProtocolReference>(ref));
}

bool is_keyword(std::string_view w) {
  return w == "roles" || w == "parameters" || w == "private" || w == "in" ||
         w == "out" || w == "key";
}

class ProtocolParser {
 public:
  explicit ProtocolParser(std::string_view src)
      : ts_(detail::tokenize(src)) {}

  bool at_end() const { return ts_.at_end(); }

  Protocol parse() {
    Protocol p;
    const Token& head = ts_.peek();
    p.name = ts_.expect_ident("protocol name");
    ts_.expect_punct("{");
    ts_.expect_word("roles");
    p.public_roles = role_list();
    if (ts_.accept_word("private")) p.private_roles = role_list();
    ts_.expect_word("parameters");
    p.public_params = param_list();
    if (ts_.accept_word("private")) p.private_params = param_list();
    if (auto prob = check_header(p)) throw_wf(head, *prob);

    while (!ts_.accept_punct("}")) {
      const Token& start = ts_.peek();
      if (start.kind != TokenKind::kIdent)
        ts_.fail("expected a message schema or protocol reference");
      if (ts_.is_punct("->", 1)) {
        p.references.emplace_back(schema(p));
      } else if (ts_.is_punct("(", 1)) {
        p.references.emplace_back(reference(p));
      } else {
        ts_.next();
        ts_.fail("expected '->' or '('");
      }
      if (auto prob = check_reference_at(p, p.references.size() - 1))
        throw_wf(start, *prob);
    }
    return p;
  }

 private:
  [[noreturn]] static void throw_wf(const Token& at, const std::string& msg) {
    throw WellFormednessError(
        fmt::format("{}:{}: {}", at.line, at.column, msg));
  }

  std::string name(std::string_view what) {
    const Token& t = ts_.peek();
    std::string n = ts_.expect_ident(what);
    if (is_keyword(n)) ts_.fail_at(t, fmt::format("expected {}", what));
    return n;
  }

  std::vector<std::string> role_list() {
    std::vector<std::string> roles;
    const Token& t = ts_.peek();
    if (t.kind != TokenKind::kIdent || is_keyword(t.text)) return roles;
    roles.push_back(name("role name"));
    while (ts_.accept_punct(",")) roles.push_back(name("role name"));
    return roles;
  }

  ParameterDecl param() {
    ParameterDecl d;
    if (ts_.accept_word("in")) {
      d.adornment = Adornment::kIn;
    } else if (ts_.accept_word("out")) {
      d.adornment = Adornment::kOut;
    } else {
      ts_.fail("expected 'in' or 'out'");
    }
    d.name = name("parameter name");
    d.is_key = ts_.accept_word("key");
    return d;
  }

  std::vector<ParameterDecl> param_list() {
    std::vector<ParameterDecl> params;
    if (!ts_.is_word("in") && !ts_.is_word("out")) return params;
    params.push_back(param());
    while (ts_.accept_punct(",")) params.push_back(param());
    return params;
  }

  // Keys of a schema or reference follow the enclosing protocol; an explicit
  // `key` marker on a non-key parameter is kept so validation rejects it.
  static void inherit_keys(const Protocol& p, std::vector<ParameterDecl>& ps) {
    for (auto& d : ps) d.is_key = d.is_key || p.is_key(d.name);
  }

  MessageSchema schema(const Protocol& p) {
    MessageSchema s;
    s.sender = name("sender role");
    ts_.expect_punct("->");
    s.receiver = name("receiver role");
    ts_.expect_punct(":");
    s.name = name("message name");
    ts_.expect_punct("[");
    s.params.push_back(param());
    while (ts_.accept_punct(",")) s.params.push_back(param());
    ts_.expect_punct("]");
    inherit_keys(p, s.params);
    return s;
  }

  ProtocolReference reference(const Protocol& p) {
    ProtocolReference r;
    r.name = name("protocol name");
    ts_.expect_punct("(");
    do {
      if (ts_.is_word("in") || ts_.is_word("out")) {
        r.param_arguments.push_back(param());
      } else {
        if (!r.param_arguments.empty())
          ts_.fail("role arguments must precede parameter arguments");
        r.role_arguments.push_back(name("role argument"));
      }
    } while (ts_.accept_punct(","));
    ts_.expect_punct(")");
    inherit_keys(p, r.param_arguments);
    return r;
  }

  TokenStream ts_;
};

void append_params(std::string& out, const std::vector<ParameterDecl>& ps,
                   bool with_keys) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("{} {}", to_string(ps[i].adornment), ps[i].name);
    if (with_keys && ps[i].is_key) out += " key";
  }
}

std::string join(const std::vector<std::string>& xs) {
  return fmt::format("{}", fmt::join(xs, ", "));
}

}  // namespace

void validate(const Protocol& p) {
  if (auto prob = check_header(p)) throw WellFormednessError(*prob);
  for (std::size_t i = 0; i < p.references.size(); ++i) {
    if (auto prob = check_reference_at(p, i)) throw WellFormednessError(*prob);
  }
}

Protocol parse_protocol(std::string_view source) {
  ProtocolParser parser(source);
  Protocol p = parser.parse();
  if (!parser.at_end())
    throw ParseError("trailing input after protocol", 0, 0);
  return p;
}

std::vector<Protocol> parse_protocols(std::string_view source) {
  ProtocolParser parser(source);
  std::vector<Protocol> out;
  std::set<std::string, std::less<>> names;
  while (!parser.at_end()) {
    out.push_back(parser.parse());
    if (!names.insert(out.back().name).second)
      throw WellFormednessError(
          fmt::format("protocol {} is declared twice", out.back().name));
  }
  return out;
}

std::string print_protocol(const Protocol& p) {
  std::string out = fmt::format("{} {{\n  roles", p.name);
  if (!p.public_roles.empty()) out += " " + join(p.public_roles);
  if (!p.private_roles.empty()) out += " private " + join(p.private_roles);
  out += "\n  parameters";
  if (!p.public_params.empty()) {
    out += " ";
    append_params(out, p.public_params, true);
  }
  if (!p.private_params.empty()) {
    out += " private ";
    append_params(out, p.private_params, false);
  }
  out += "\n";
  for (const auto& ref : p.references) {
    if (const auto* s = std::get_if<MessageSchema>(&ref)) {
      out += fmt::format("  {} -> {}: {}[", s->sender, s->receiver, s->name);
      append_params(out, s->params, false);
      out += "]\n";
    } else {
      const auto& r = std::get<ProtocolReference>(ref);
      out += fmt::format("  {}(", r.name);
      std::vector<std::string> args = r.role_arguments;
      for (const auto& d : r.param_arguments)
        args.push_back(fmt::format("{} {}", to_string(d.adornment), d.name));
      out += join(args) + ")\n";
    }
  }
  out += "}\n";
  return out;
}

ProtocolRegistry::ProtocolRegistry(const std::vector<Protocol>& protocols) {
  for (const auto& p : protocols) add(p);
}

void ProtocolRegistry::add(Protocol p) {
  std::string name = p.name;
  protocols_.insert_or_assign(std::move(name), std::move(p));
}

const Protocol* ProtocolRegistry::find(std::string_view name) const {
  auto it = protocols_.find(name);
  return it == protocols_.end() ? nullptr : &it->second;
}

const Protocol& ProtocolRegistry::at(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw UnresolvedReference(fmt::format("unknown protocol {}", name));
}

bool Uod::has_role(std::string_view role) const {
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

const MessageSchema* Uod::find_schema(std::string_view name) const {
  for (const auto& s : schemas)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

void add_role(Uod& u, const std::string& role) {
  if (!u.has_role(role)) u.roles.push_back(role);
}

void add_schema(Uod& u, MessageSchema s) {
  if (const auto* existing = u.find_schema(s.name)) {
    if (*existing == s) return;
    throw WellFormednessError(fmt::format(
        "message schema {} is declared with two different signatures",
        s.name));
  }
  add_role(u, s.sender);
  add_role(u, s.receiver);
  u.schemas.push_back(std::move(s));
}

Uod expand(const Protocol& p, const ProtocolRegistry& registry,
           std::vector<std::string>& stack) {
  Uod u;
  for (const auto& r : p.all_roles()) add_role(u, r);
  for (const auto& ref : p.references) {
    if (const auto* s = std::get_if<MessageSchema>(&ref)) {
      add_schema(u, *s);
      continue;
    }
    const auto& r = std::get<ProtocolReference>(ref);
    const Protocol* callee = registry.find(r.name);
    if (!callee)
      throw UnresolvedReference(
          fmt::format("protocol {} references unknown protocol {}", p.name,
                      r.name));
    if (std::find(stack.begin(), stack.end(), r.name) != stack.end())
      throw CyclicReference(fmt::format("reference cycle through {}: {} -> {}",
                                        r.name, join(stack), r.name));
    if (r.role_arguments.size() != callee->public_roles.size() ||
        r.param_arguments.size() != callee->public_params.size())
      throw WellFormednessError(fmt::format(
          "reference {} in {} binds {} roles and {} parameters; {} declares {} "
          "and {}",
          r.name, p.name, r.role_arguments.size(), r.param_arguments.size(),
          r.name, callee->public_roles.size(), callee->public_params.size()));

    std::map<std::string, std::string, std::less<>> role_map;
    std::map<std::string, std::string, std::less<>> param_map;
    for (std::size_t i = 0; i < r.role_arguments.size(); ++i)
      role_map[callee->public_roles[i]] = r.role_arguments[i];
    for (std::size_t i = 0; i < r.param_arguments.size(); ++i) {
      const auto& formal = callee->public_params[i];
      const auto& actual = r.param_arguments[i];
      if (formal.adornment != actual.adornment)
        throw WellFormednessError(fmt::format(
            "reference {} in {}: argument {} is '{}' but {} declares {} as "
            "'{}'",
            r.name, p.name, actual.name, to_string(actual.adornment), r.name,
            formal.name, to_string(formal.adornment)));
      param_map[formal.name] = actual.name;
    }
    auto rename = [](const auto& map, const std::string& n) {
      auto it = map.find(n);
      return it == map.end() ? n : it->second;
    };

    stack.push_back(r.name);
    Uod sub = expand(*callee, registry, stack);
    stack.pop_back();

    for (const auto& role : sub.roles) add_role(u, rename(role_map, role));
    for (auto s : sub.schemas) {
      s.sender = rename(role_map, s.sender);
      s.receiver = rename(role_map, s.receiver);
      for (auto& d : s.params) d.name = rename(param_map, d.name);
      add_schema(u, std::move(s));
    }
  }
  return u;
}

}  // namespace

Uod uod(const Protocol& p, const ProtocolRegistry& registry) {
  std::vector<std::string> stack{p.name};
  return expand(p, registry, stack);
}

}  // namespace tosca
