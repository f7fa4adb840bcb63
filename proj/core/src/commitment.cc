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

#include "tosca/commitment.hh"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "lexer.hh"
#include "tosca/error.hh"

namespace tosca {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

std::string_view to_string(LifecycleKind k) {
  switch (k) {
    case LifecycleKind::kCreated: return "created";
    case LifecycleKind::kDetached: return "detached";
    case LifecycleKind::kDischarged: return "discharged";
    case LifecycleKind::kExpired: return "expired";
    case LifecycleKind::kViolated: return "violated";
  }
  return "?";
}

std::optional<LifecycleKind> parse_lifecycle_kind(std::string_view word) {
  for (auto k : kLifecycleKinds)
    if (to_string(k) == word) return k;
  return std::nullopt;
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAnd: return "and";
    case BinaryOp::kOr: return "or";
    case BinaryOp::kExcept: return "except";
  }
  return "?";
}

EventExpr EventExpr::base(std::string name) {
  return EventExpr(std::make_shared<const EventNode>(
      EventNode{BaseEvent{std::move(name)}}));
}

EventExpr EventExpr::lifecycle(LifecycleKind kind,
                               std::shared_ptr<const CommitmentSpec> c) {
  return EventExpr(std::make_shared<const EventNode>(
      EventNode{LifecycleEvent{kind, std::move(c)}}));
}

EventExpr EventExpr::window(EventExpr inner, TimeRef from, TimeRef to) {
  return EventExpr(std::make_shared<const EventNode>(EventNode{
      WindowEvent{std::move(inner), std::move(from), std::move(to)}}));
}

EventExpr EventExpr::binary(BinaryOp op, EventExpr lhs, EventExpr rhs) {
  return EventExpr(std::make_shared<const EventNode>(
      EventNode{BinaryEvent{op, std::move(lhs), std::move(rhs)}}));
}

EventExpr EventExpr::conj(EventExpr l, EventExpr r) {
  return binary(BinaryOp::kAnd, std::move(l), std::move(r));
}

EventExpr EventExpr::disj(EventExpr l, EventExpr r) {
  return binary(BinaryOp::kOr, std::move(l), std::move(r));
}

EventExpr EventExpr::except(EventExpr l, EventExpr r) {
  return binary(BinaryOp::kExcept, std::move(l), std::move(r));
}

bool EventExpr::operator==(const EventExpr& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  return node_->value == other.node_->value;
}

bool TimeRef::operator==(const TimeRef& other) const {
  if (kind != other.kind) return false;
  if (kind == Kind::kAbsolute) return instant == other.instant;
  return offset == other.offset && base_event == other.base_event;
}

bool LifecycleEvent::operator==(const LifecycleEvent& other) const {
  if (kind != other.kind) return false;
  if (commitment == other.commitment) return true;
  if (!commitment || !other.commitment) return false;
  return *commitment == *other.commitment;
}

void CommitmentRegistry::add(CommitmentSpec c) {
  std::string name = c.name;
  specs_.insert_or_assign(std::move(name),
                          std::make_shared<const CommitmentSpec>(std::move(c)));
}

std::shared_ptr<const CommitmentSpec> CommitmentRegistry::find(
    std::string_view name) const {
  auto it = specs_.find(name);
  return it == specs_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<const CommitmentSpec>> CommitmentRegistry::all()
    const {
  std::vector<std::shared_ptr<const CommitmentSpec>> out;
  for (const auto& [_, c] : specs_) out.push_back(c);
  return out;
}

namespace {

bool is_reserved(std::string_view w) {
  return w == "and" || w == "or" || w == "except" || w == "inf" ||
         w == "commitment" || w == "to" || w == "create" || w == "detach" ||
         w == "discharge";
}

class CommitmentParser {
 public:
  CommitmentParser(std::string_view src, const CommitmentRegistry& registry)
      : ts_(detail::tokenize(src)), registry_(registry) {}

  bool at_end() const { return ts_.at_end(); }

  void expect_end() {
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
  }

  CommitmentSpec commitment() {
    CommitmentSpec c;
    ts_.expect_word("commitment");
    c.name = name("commitment name");
    const Token& roles_at = ts_.peek();
    c.debtor = name("debtor role");
    ts_.expect_word("to");
    c.creditor = name("creditor role");
    if (c.debtor == c.creditor)
      throw WellFormednessError(fmt::format(
          "{}:{}: commitment {}: debtor equals creditor ({})", roles_at.line,
          roles_at.column, c.name, c.debtor));
    ts_.expect_word("create");
    c.create = expr();
    ts_.expect_word("detach");
    c.detach = expr();
    ts_.expect_word("discharge");
    c.discharge = expr();
    return c;
  }

  // expr := or ("except" or)*
  EventExpr expr() {
    EventExpr e = disjunction();
    while (ts_.accept_word("except")) e = EventExpr::except(e, disjunction());
    return e;
  }

 private:
  std::string name(std::string_view what) {
    const Token& t = ts_.peek();
    std::string n = ts_.expect_ident(what);
    if (is_reserved(n)) ts_.fail_at(t, fmt::format("expected {}", what));
    return n;
  }

  EventExpr disjunction() {
    EventExpr e = conjunction();
    while (ts_.accept_word("or")) e = EventExpr::disj(e, conjunction());
    return e;
  }

  EventExpr conjunction() {
    EventExpr e = windowed();
    while (ts_.accept_word("and")) e = EventExpr::conj(e, windowed());
    return e;
  }

  EventExpr windowed() {
    EventExpr e = primary();
    while (ts_.accept_punct("[")) {
      TimeRef from = TimeRef::absolute(0);
      TimeRef to = TimeRef::infinity();
      if (!ts_.is_punct(",") && !ts_.is_punct("]")) from = time();
      if (ts_.accept_punct(",")) {
        if (!ts_.is_punct("]")) to = time();
      }
      ts_.expect_punct("]");
      e = EventExpr::window(e, std::move(from), std::move(to));
    }
    return e;
  }

  TimeRef time() {
    if (ts_.peek().kind == TokenKind::kInt)
      return TimeRef::absolute(ts_.expect_int("time instant"));
    if (ts_.accept_word("inf")) return TimeRef::infinity();
    EventExpr base = primary();
    long offset = 0;
    if (ts_.accept_punct("+")) offset = ts_.expect_int("time offset");
    return TimeRef::event_plus(std::move(base), offset);
  }

  EventExpr primary() {
    if (ts_.accept_punct("(")) {
      EventExpr e = expr();
      ts_.expect_punct(")");
      return e;
    }
    const Token& t = ts_.peek();
    std::string word = name("event");
    auto kind = parse_lifecycle_kind(word);
    if (!kind || !ts_.is_punct("(")) return EventExpr::base(word);

    ts_.expect_punct("(");
    if (ts_.peek().kind == TokenKind::kIdent && ts_.is_punct(")", 1)) {
      std::string ref = name("commitment name");
      ts_.expect_punct(")");
      auto c = registry_.find(ref);
      if (!c)
        throw UnknownCommitmentReference(fmt::format(
            "{}:{}: unknown commitment {}", t.line, t.column, ref));
      return EventExpr::lifecycle(*kind, std::move(c));
    }
    // Anonymous tuple: kind(debtor, creditor, create, detach, discharge).
    CommitmentSpec c;
    c.debtor = name("debtor role");
    ts_.expect_punct(",");
    c.creditor = name("creditor role");
    if (c.debtor == c.creditor)
      throw WellFormednessError(
          fmt::format("{}:{}: nested commitment: debtor equals creditor ({})",
                      t.line, t.column, c.debtor));
    ts_.expect_punct(",");
    c.create = expr();
    ts_.expect_punct(",");
    c.detach = expr();
    ts_.expect_punct(",");
    c.discharge = expr();
    ts_.expect_punct(")");
    return EventExpr::lifecycle(*kind,
                                std::make_shared<const CommitmentSpec>(c));
  }

  TokenStream ts_;
  const CommitmentRegistry& registry_;
};

// Binding strength used by the printer; higher binds tighter.
int precedence(const EventExpr& e) {
  const auto& v = e.node().value;
  if (const auto* b = std::get_if<BinaryEvent>(&v)) {
    switch (b->op) {
      case BinaryOp::kExcept: return 1;
      case BinaryOp::kOr: return 2;
      case BinaryOp::kAnd: return 3;
    }
  }
  if (std::holds_alternative<WindowEvent>(v)) return 4;
  return 5;
}

std::string print_at(const EventExpr& e, int min_prec) {
  std::string s = print_expr(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

std::string print_time(const TimeRef& t) {
  if (t.kind == TimeRef::Kind::kAbsolute)
    return t.is_infinite() ? "inf" : std::to_string(t.instant);
  return fmt::format("{} + {}", print_at(t.base_event, 5), t.offset);
}

}  // namespace

CommitmentSpec parse_commitment(std::string_view source,
                                const CommitmentRegistry& registry) {
  CommitmentParser parser(source, registry);
  CommitmentSpec c = parser.commitment();
  parser.expect_end();
  return c;
}

std::vector<CommitmentSpec> parse_commitments(std::string_view source,
                                              CommitmentRegistry& registry) {
  CommitmentParser parser(source, registry);
  std::vector<CommitmentSpec> out;
  while (!parser.at_end()) {
    out.push_back(parser.commitment());
    registry.add(out.back());
  }
  return out;
}

EventExpr parse_event_expr(std::string_view source,
                           const CommitmentRegistry& registry) {
  CommitmentParser parser(source, registry);
  EventExpr e = parser.expr();
  parser.expect_end();
  return e;
}

std::string print_expr(const EventExpr& e) {
  if (e.empty()) return "<empty>";
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BaseEvent>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, LifecycleEvent>) {
          const CommitmentSpec& c = *n.commitment;
          if (!c.name.empty())
            return fmt::format("{}({})", to_string(n.kind), c.name);
          return fmt::format("{}({}, {}, {}, {}, {})", to_string(n.kind),
                             c.debtor, c.creditor, print_expr(c.create),
                             print_expr(c.detach), print_expr(c.discharge));
        } else if constexpr (std::is_same_v<T, WindowEvent>) {
          std::string lo = n.from.is_zero() ? "" : print_time(n.from);
          std::string hi = n.to.is_infinite() ? "" : print_time(n.to);
          return fmt::format("{}[{}, {}]", print_at(n.inner, 4), lo, hi);
        } else {
          int p = n.op == BinaryOp::kExcept ? 1 : n.op == BinaryOp::kOr ? 2 : 3;
          return fmt::format("{} {} {}", print_at(n.lhs, p), to_string(n.op),
                             print_at(n.rhs, p + 1));
        }
      },
      e.node().value);
}

std::string print_commitment(const CommitmentSpec& c) {
  return fmt::format(
      "commitment {} {} to {}\n  create {}\n  detach {}\n  discharge {}\n",
      c.name, c.debtor, c.creditor, print_expr(c.create), print_expr(c.detach),
      print_expr(c.discharge));
}

EventExpr lifecycle_formula(LifecycleKind kind, const CommitmentSpec& c) {
  switch (kind) {
    case LifecycleKind::kCreated:
      return c.create;
    case LifecycleKind::kDetached:
      return EventExpr::conj(c.create, c.detach);
    case LifecycleKind::kDischarged:
      return EventExpr::disj(EventExpr::conj(c.create, c.discharge),
                             EventExpr::conj(c.detach, c.discharge));
    case LifecycleKind::kExpired:
      return EventExpr::except(c.create, c.detach);
    case LifecycleKind::kViolated:
      return EventExpr::except(EventExpr::conj(c.create, c.detach),
                               c.discharge);
  }
  throw InternalError("unknown lifecycle kind");
}

namespace {

std::vector<std::string> set_union(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::vector<std::string> set_intersection(const std::vector<std::string>& a,
                                          const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

void collect_bases(const EventExpr& e, std::set<std::string>& out);

void collect_time(const TimeRef& t, std::set<std::string>& out) {
  if (t.kind == TimeRef::Kind::kEventPlus) collect_bases(t.base_event, out);
}

void collect_bases(const EventExpr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BaseEvent>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, LifecycleEvent>) {
          collect_bases(n.commitment->create, out);
          collect_bases(n.commitment->detach, out);
          collect_bases(n.commitment->discharge, out);
        } else if constexpr (std::is_same_v<T, WindowEvent>) {
          collect_bases(n.inner, out);
          collect_time(n.from, out);
          collect_time(n.to, out);
        } else {
          collect_bases(n.lhs, out);
          collect_bases(n.rhs, out);
        }
      },
      e.node().value);
}

void bind_time(const TimeRef& t, const Uod& u) {
  if (t.kind != TimeRef::Kind::kEventPlus) return;
  if (t.offset < 0)
    throw WellFormednessError(
        fmt::format("negative deadline offset {}", t.offset));
  bind(t.base_event, u);
}

}  // namespace

std::vector<std::string> key_params(const EventExpr& e, const Uod& u) {
  return std::visit(
      [&](const auto& n) -> std::vector<std::string> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BaseEvent>) {
          const MessageSchema* s = u.find_schema(n.name);
          if (!s)
            throw UnknownBaseEvent(
                fmt::format("event {} names no message schema", n.name));
          auto keys = s->key_names();
          std::sort(keys.begin(), keys.end());
          return keys;
        } else if constexpr (std::is_same_v<T, LifecycleEvent>) {
          return key_params(lifecycle_formula(n.kind, *n.commitment), u);
        } else if constexpr (std::is_same_v<T, WindowEvent>) {
          return key_params(n.inner, u);
        } else {
          auto l = key_params(n.lhs, u);
          switch (n.op) {
            case BinaryOp::kAnd: return set_union(l, key_params(n.rhs, u));
            case BinaryOp::kOr:
              return set_intersection(l, key_params(n.rhs, u));
            case BinaryOp::kExcept: return l;
          }
          return l;
        }
      },
      e.node().value);
}

void bind(const EventExpr& e, const Uod& u) {
  if (e.empty()) throw WellFormednessError("empty event expression");
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BaseEvent>) {
          if (!u.find_schema(n.name))
            throw UnknownBaseEvent(
                fmt::format("event {} names no message schema", n.name));
        } else if constexpr (std::is_same_v<T, LifecycleEvent>) {
          bind(*n.commitment, u);
        } else if constexpr (std::is_same_v<T, WindowEvent>) {
          bind(n.inner, u);
          bind_time(n.from, u);
          bind_time(n.to, u);
          if (n.from.kind == TimeRef::Kind::kAbsolute && n.from.instant < 0)
            throw WellFormednessError("negative window start");
        } else {
          bind(n.lhs, u);
          bind(n.rhs, u);
          if (n.op == BinaryOp::kOr &&
              set_intersection(key_params(n.lhs, u), key_params(n.rhs, u))
                  .empty())
            throw WellFormednessError(fmt::format(
                "disjunction '{}' has sides with no shared key", print_expr(e)));
        }
      },
      e.node().value);
}

void bind(const CommitmentSpec& c, const Uod& u) {
  std::string label = c.name.empty() ? "nested commitment" : c.name;
  if (c.debtor == c.creditor)
    throw WellFormednessError(
        fmt::format("{}: debtor equals creditor ({})", label, c.debtor));
  for (const auto* role : {&c.debtor, &c.creditor}) {
    if (!u.has_role(*role))
      throw WellFormednessError(
          fmt::format("{}: role {} is not a protocol role", label, *role));
  }
  bind(c.create, u);
  bind(c.detach, u);
  bind(c.discharge, u);
}

std::vector<std::string> base_names(const EventExpr& e) {
  std::set<std::string> out;
  collect_bases(e, out);
  return {out.begin(), out.end()};
}

}  // namespace tosca
