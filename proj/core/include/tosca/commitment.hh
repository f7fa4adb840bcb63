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

#ifndef TOSCA_COMMITMENT_HH_
#define TOSCA_COMMITMENT_HH_

#include <array>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tosca/protocol.hh"

namespace tosca {

enum class LifecycleKind { kCreated, kDetached, kDischarged, kExpired, kViolated };

inline constexpr std::array<LifecycleKind, 5> kLifecycleKinds = {
    LifecycleKind::kCreated, LifecycleKind::kDetached,
    LifecycleKind::kDischarged, LifecycleKind::kExpired,
    LifecycleKind::kViolated};

std::string_view to_string(LifecycleKind k);
std::optional<LifecycleKind> parse_lifecycle_kind(std::string_view word);

enum class BinaryOp { kAnd, kOr, kExcept };

std::string_view to_string(BinaryOp op);

struct EventNode;
struct CommitmentSpec;
struct TimeRef;

/// Immutable, shareable event formula. A default-constructed expression is
/// empty and only valid as the unused base event of an absolute TimeRef.
class EventExpr {
 public:
  EventExpr() = default;

  static EventExpr base(std::string name);
  static EventExpr lifecycle(LifecycleKind kind,
                             std::shared_ptr<const CommitmentSpec> c);
  static EventExpr window(EventExpr inner, TimeRef from, TimeRef to);
  static EventExpr binary(BinaryOp op, EventExpr lhs, EventExpr rhs);
  static EventExpr conj(EventExpr l, EventExpr r);
  static EventExpr disj(EventExpr l, EventExpr r);
  static EventExpr except(EventExpr l, EventExpr r);

  bool empty() const { return node_ == nullptr; }
  const EventNode& node() const { return *node_; }

  /// Structural (deep) equality.
  bool operator==(const EventExpr& other) const;

 private:
  explicit EventExpr(std::shared_ptr<const EventNode> node)
      : node_(std::move(node)) {}

  std::shared_ptr<const EventNode> node_;
};

struct TimeRef {
  enum class Kind { kAbsolute, kEventPlus };
  static constexpr long kInfinity = std::numeric_limits<long>::max();

  Kind kind = Kind::kAbsolute;
  long instant = 0;
  EventExpr base_event;
  long offset = 0;

  static TimeRef absolute(long t) { return {Kind::kAbsolute, t, {}, 0}; }
  static TimeRef infinity() { return absolute(kInfinity); }
  static TimeRef event_plus(EventExpr e, long offset) {
    return {Kind::kEventPlus, 0, std::move(e), offset};
  }

  bool is_zero() const { return kind == Kind::kAbsolute && instant == 0; }
  bool is_infinite() const {
    return kind == Kind::kAbsolute && instant == kInfinity;
  }

  bool operator==(const TimeRef& other) const;
};

struct BaseEvent {
  std::string name;
  bool operator==(const BaseEvent&) const = default;
};

struct LifecycleEvent {
  LifecycleKind kind;
  std::shared_ptr<const CommitmentSpec> commitment;
  bool operator==(const LifecycleEvent& other) const;
};

struct WindowEvent {
  EventExpr inner;
  TimeRef from;
  TimeRef to;
  bool operator==(const WindowEvent&) const = default;
};

struct BinaryEvent {
  BinaryOp op;
  EventExpr lhs;
  EventExpr rhs;
  bool operator==(const BinaryEvent&) const = default;
};

struct EventNode {
  std::variant<BaseEvent, LifecycleEvent, WindowEvent, BinaryEvent> value;
};

/// c(debtor, creditor, create, detach, discharge).
struct CommitmentSpec {
  std::string name;
  std::string debtor;
  std::string creditor;
  EventExpr create;
  EventExpr detach;
  EventExpr discharge;

  bool operator==(const CommitmentSpec&) const = default;
};

class CommitmentRegistry {
 public:
  void add(CommitmentSpec c);
  std::shared_ptr<const CommitmentSpec> find(std::string_view name) const;
  std::vector<std::shared_ptr<const CommitmentSpec>> all() const;

 private:
  std::map<std::string, std::shared_ptr<const CommitmentSpec>, std::less<>>
      specs_;
};

/// Parses exactly one `commitment` declaration. Named lifecycle references
/// such as `discharged(EscrowPurchase)` resolve in `registry`.
CommitmentSpec parse_commitment(std::string_view source,
                                const CommitmentRegistry& registry = {});

/// Parses a sequence of declarations; each is added to `registry` as soon as
/// it is parsed so later ones may refer to it.
std::vector<CommitmentSpec> parse_commitments(std::string_view source,
                                              CommitmentRegistry& registry);

EventExpr parse_event_expr(std::string_view source,
                           const CommitmentRegistry& registry = {});

std::string print_expr(const EventExpr& e);
std::string print_commitment(const CommitmentSpec& c);

EventExpr lifecycle_formula(LifecycleKind kind, const CommitmentSpec& c);

/// Checks roles and base events against `u`, recursing into nested
/// commitments. Throws WellFormednessError or UnknownBaseEvent.
void bind(const CommitmentSpec& c, const Uod& u);
void bind(const EventExpr& e, const Uod& u);

/// Key parameters an expression's instances are correlated on.
std::vector<std::string> key_params(const EventExpr& e, const Uod& u);

/// Base event names occurring anywhere in `e`, including deadlines and
/// nested commitments; sorted and unique.
std::vector<std::string> base_names(const EventExpr& e);

}  // namespace tosca

#endif  // TOSCA_COMMITMENT_HH_
