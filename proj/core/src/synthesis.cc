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

#include "tosca/synthesis.hh"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "tosca/error.hh"

namespace tosca {

std::string print_instruction(const AlignmentInstruction& in) {
  return fmt::format("al({}, {}, {})", in.knower, print_expr(in.formula),
                     in.learner);
}

std::string_view to_string(SynthesisMode m) {
  return m == SynthesisMode::kLiteral ? "literal" : "complete";
}

std::optional<SynthesisMode> parse_mode(std::string_view word) {
  if (word == "literal") return SynthesisMode::kLiteral;
  if (word == "complete") return SynthesisMode::kComplete;
  return std::nullopt;
}

std::vector<AlignmentInstruction> decompose_commitment(
    const CommitmentSpec& c) {
  auto spec = std::make_shared<const CommitmentSpec>(c);
  auto life = [&](LifecycleKind k) { return EventExpr::lifecycle(k, spec); };
  return {
      {c.creditor, life(LifecycleKind::kCreated), c.debtor},
      {c.creditor, life(LifecycleKind::kDetached), c.debtor},
      {c.creditor, life(LifecycleKind::kViolated), c.debtor},
      {c.debtor, life(LifecycleKind::kDischarged), c.creditor},
      {c.debtor, life(LifecycleKind::kExpired), c.creditor},
  };
}

const std::string& atomic_message(const AlignmentInstruction& in) {
  const auto* b = std::get_if<BaseEvent>(&in.formula.node().value);
  if (!b)
    throw InternalError(
        fmt::format("instruction {} is not atomic", print_instruction(in)));
  return b->name;
}

std::vector<AlignmentInstruction> reduce(const AlignmentInstruction& in,
                                         std::size_t fuel) {
  std::set<std::tuple<std::string, std::string, std::string>> atoms;
  std::vector<AlignmentInstruction> work{in};
  while (!work.empty()) {
    if (fuel-- == 0)
      throw InternalError(fmt::format("reduction of {} ran out of fuel",
                                      print_instruction(in)));
    AlignmentInstruction cur = std::move(work.back());
    work.pop_back();
    const std::string& a = cur.knower;
    const std::string& b = cur.learner;
    if (cur.formula.empty())
      throw InternalError("alignment instruction over an empty formula");
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, BaseEvent>) {
            if (a != b) atoms.emplace(a, n.name, b);
          } else if constexpr (std::is_same_v<T, LifecycleEvent>) {
            work.push_back({a, lifecycle_formula(n.kind, *n.commitment), b});
          } else if constexpr (std::is_same_v<T, WindowEvent>) {
            for (const TimeRef* t : {&n.to, &n.from}) {
              if (t->kind == TimeRef::Kind::kEventPlus)
                work.push_back({a, t->base_event, b});
            }
            work.push_back({a, n.inner, b});
          } else if (n.op == BinaryOp::kExcept) {
            work.push_back({b, n.rhs, a});
            work.push_back({a, n.lhs, b});
          } else {
            work.push_back({a, n.rhs, b});
            work.push_back({a, n.lhs, b});
          }
        },
        cur.formula.node().value);
  }
  std::vector<AlignmentInstruction> out;
  out.reserve(atoms.size());
  for (const auto& [k, m, l] : atoms)
    out.push_back({k, EventExpr::base(m), l});
  return out;
}

namespace {

constexpr std::string_view kForwardPrefix = "fwd";

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(
                      static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

bool has_forward_prefix(std::string_view name) {
  return name.substr(0, kForwardPrefix.size()) == kForwardPrefix;
}

ForwardingName ForwardingName::make(std::string forwarder,
                                    std::string recipient,
                                    std::string base_message) {
  ForwardingName f;
  f.name = fmt::format("{}{}{}{}", kForwardPrefix, forwarder, recipient,
                       capitalized(base_message));
  f.id_param = f.name + "ID";
  f.forwarder = std::move(forwarder);
  f.recipient = std::move(recipient);
  f.base_message = std::move(base_message);
  return f;
}

MessageSchema forwarding_schema(const MessageSchema& base,
                                const std::string& forwarder,
                                const std::string& recipient) {
  ForwardingName f = ForwardingName::make(forwarder, recipient, base.name);
  MessageSchema s;
  s.name = f.name;
  s.sender = forwarder;
  s.receiver = recipient;
  for (const auto& p : base.params)
    s.params.push_back({p.name, Adornment::kIn, p.is_key});
  if (base.find_param(f.id_param))
    throw NameClash(fmt::format("forwarding id {} collides with a parameter "
                                "of {}",
                                f.id_param, base.name));
  s.params.push_back({f.id_param, Adornment::kOut, false});
  return s;
}

void ForwardingRegistry::add(const ForwardingName& f) {
  auto [it, inserted] = names_.emplace(f.name, f);
  if (!inserted && !(it->second == f))
    throw NameClash(fmt::format(
        "forwarding name {} denotes both {}->{} of {} and {}->{} of {}",
        f.name, it->second.forwarder, it->second.recipient,
        it->second.base_message, f.forwarder, f.recipient, f.base_message));
}

const ForwardingName* ForwardingRegistry::find(std::string_view name) const {
  auto it = names_.find(name);
  return it == names_.end() ? nullptr : &it->second;
}

ForwardingRegistry ForwardingRegistry::from_uod(const Uod& u) {
  ForwardingRegistry reg;
  for (const auto& s : u.schemas) {
    std::string head = fmt::format("{}{}{}", kForwardPrefix, s.sender,
                                   s.receiver);
    if (s.name.size() <= head.size() || s.name.compare(0, head.size(), head))
      continue;
    std::string rest = s.name.substr(head.size());
    std::string lowered = rest;
    lowered[0] = static_cast<char>(
        std::tolower(static_cast<unsigned char>(lowered[0])));
    for (const auto& candidate : {lowered, rest}) {
      const MessageSchema* base = u.find_schema(candidate);
      if (!base || base == &s) continue;
      if (forwarding_schema(*base, s.sender, s.receiver) == s) {
        reg.add(ForwardingName::make(s.sender, s.receiver, base->name));
        break;
      }
    }
  }
  return reg;
}

std::vector<MessageSchema> forwards_for(const AlignmentInstruction& atomic,
                                        const Uod& u, SynthesisMode mode) {
  const std::string& m = atomic_message(atomic);
  const MessageSchema* s = u.find_schema(m);
  if (!s)
    throw UnknownMessage(fmt::format("no message schema for {}", m));
  const std::string& a = atomic.knower;
  const std::string& b = atomic.learner;
  auto outside = [&](const std::string& role) {
    return role != s->sender && role != s->receiver;
  };

  std::vector<MessageSchema> out;
  if (outside(b)) out.push_back(forwarding_schema(*s, s->sender, b));
  if (mode == SynthesisMode::kComplete) {
    if (outside(a)) out.push_back(forwarding_schema(*s, s->sender, a));
    if (outside(b) && a != s->sender && a != b)
      out.push_back(forwarding_schema(*s, a, b));
  }
  return out;
}

Protocol synthesize_alignment_protocol(const CommitmentSpec& c,
                                       const Protocol& input,
                                       SynthesisMode mode) {
  return synthesize_alignment_protocol(c, input, ProtocolRegistry{}, mode);
}

Protocol synthesize_alignment_protocol(const CommitmentSpec& c,
                                       const Protocol& input,
                                       const ProtocolRegistry& registry,
                                       SynthesisMode mode) {
  Uod u = uod(input, registry);
  bind(c, u);

  std::map<std::string, MessageSchema> schemas;
  ForwardingRegistry names;
  for (const auto& instr : decompose_commitment(c)) {
    for (const auto& atom : reduce(instr)) {
      for (auto& f : forwards_for(atom, u, mode)) {
        if (u.find_schema(f.name))
          throw NameClash(fmt::format(
              "forwarding schema {} collides with an input message", f.name));
        names.add(ForwardingName::make(f.sender, f.receiver,
                                       atomic_message(atom)));
        schemas.emplace(f.name, std::move(f));
      }
    }
  }

  // Parameters keep the input's declaration order; anything the input does
  // not declare directly follows in order of first appearance.
  std::map<std::string, std::size_t> rank;
  for (const auto* list : {&input.public_params, &input.private_params})
    for (const auto& p : *list) rank.emplace(p.name, rank.size());
  for (const auto& s : u.schemas)
    for (const auto& p : s.params) rank.emplace(p.name, rank.size());

  std::set<std::string> uod_params;
  for (const auto& s : u.schemas)
    for (const auto& p : s.params) uod_params.insert(p.name);

  Protocol al;
  al.name = c.name + "Al";
  std::set<std::string> roles;
  std::vector<std::string> keys, ins, outs;
  auto note = [](std::vector<std::string>& v, const std::string& n) {
    if (std::find(v.begin(), v.end(), n) == v.end()) v.push_back(n);
  };
  for (const auto& [_, s] : schemas) {
    roles.insert(s.sender);
    roles.insert(s.receiver);
    for (const auto& p : s.params) {
      if (p.adornment == Adornment::kOut) {
        if (uod_params.count(p.name) || input.find_param(p.name))
          throw NameClash(fmt::format(
              "forwarding id {} collides with an input parameter", p.name));
        note(outs, p.name);
      } else {
        note(p.is_key ? keys : ins, p.name);
      }
    }
    al.references.emplace_back(s);
  }
  auto by_rank = [&](const std::string& x, const std::string& y) {
    return rank.at(x) < rank.at(y);
  };
  std::sort(keys.begin(), keys.end(), by_rank);
  std::sort(ins.begin(), ins.end(), by_rank);

  al.public_roles.assign(roles.begin(), roles.end());
  for (const auto& k : keys) al.public_params.push_back({k, Adornment::kIn, true});
  for (const auto& p : ins) al.public_params.push_back({p, Adornment::kIn, false});
  for (const auto& p : outs)
    al.public_params.push_back({p, Adornment::kOut, false});
  validate(al);
  return al;
}

Protocol compose_operationalization(const Protocol& input,
                                    const std::vector<Protocol>& aligners,
                                    std::string name) {
  Protocol out;
  out.name = std::move(name);
  out.public_roles = input.public_roles;
  out.private_roles = input.private_roles;
  out.public_params = input.public_params;
  out.references.emplace_back(ProtocolReference{
      input.name, input.public_roles, input.public_params});

  std::vector<const Protocol*> used;
  for (const auto& al : aligners) {
    if (al.all_roles().size() < 2) continue;
    auto same = std::find_if(used.begin(), used.end(), [&](const Protocol* p) {
      return p->name == al.name;
    });
    if (same != used.end()) {
      if (**same == al) continue;
      throw NameClash(
          fmt::format("two different aligners are named {}", al.name));
    }
    if (al.name == input.name || al.name == out.name)
      throw NameClash(fmt::format("aligner name {} is already in use", al.name));
    used.push_back(&al);

    for (const auto& role : al.public_roles) {
      if (!out.has_role(role))
        throw WellFormednessError(fmt::format(
            "aligner {} uses role {} unknown to {}", al.name, role,
            input.name));
    }
    for (const auto& p : al.public_params) {
      if (p.adornment == Adornment::kOut) {
        if (input.find_param(p.name))
          throw NameClash(fmt::format(
              "aligner {} binds {}, which {} already declares", al.name,
              p.name, input.name));
        if (!out.find_param(p.name))
          out.public_params.push_back({p.name, Adornment::kOut, false});
      } else if (!out.find_param(p.name)) {
        throw WellFormednessError(fmt::format(
            "aligner {} needs {}, which {} does not declare", al.name, p.name,
            input.name));
      }
    }
    out.references.emplace_back(
        ProtocolReference{al.name, al.public_roles, al.public_params});
  }
  validate(out);
  return out;
}

}  // namespace tosca
