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

#ifndef TOSCA_ENACTMENT_HH_
#define TOSCA_ENACTMENT_HH_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tosca/protocol.hh"
#include "tosca/synthesis.hh"

namespace tosca {

/// Parameter name to opaque value. Ordered so that printing and comparison
/// are deterministic.
using Bindings = std::map<std::string, std::string>;

/// True if `a` and `b` share at least one parameter and agree on all shared
/// parameters. Used to correlate key bindings of different schemas.
bool compatible(const Bindings& a, const Bindings& b);

struct MessageInstance {
  std::string schema;
  std::string sender;
  std::string receiver;
  Bindings bindings;
  Bindings key_binding;

  /// Throws WellFormednessError unless `bindings` covers exactly the
  /// schema's parameters.
  static MessageInstance make(const MessageSchema& s, Bindings bindings);

  auto operator<=>(const MessageInstance&) const = default;
};

std::string print_instance(const MessageInstance& m);

enum class Direction { kEmit, kReceive };

std::string_view to_string(Direction d);

struct Observation {
  MessageInstance instance;
  Direction direction = Direction::kEmit;
  long tick = 0;

  auto operator<=>(const Observation&) const = default;
};

/// One role's observations. Ticks never decrease along the sequence; several
/// observations may share a tick.
struct History {
  std::string role;
  std::vector<Observation> events;

  bool operator==(const History&) const = default;
};

struct HistoryVector {
  std::vector<History> histories;
  long clock = 0;

  /// One empty history per role of `u`, in UoD role order.
  static HistoryVector empty_for(const Uod& u);

  History* find(std::string_view role);
  const History* find(std::string_view role) const;
  History& at(std::string_view role);
  const History& at(std::string_view role) const;

  /// Appends an observation; advances the clock to `tick` if needed.
  void record(const std::string& role, Observation o);
  void emit(const MessageInstance& m, long tick);
  void receive(const MessageInstance& m, long tick);

  /// Observations with tick <= cutoff; clock = min(clock, cutoff).
  HistoryVector prefix(long cutoff) const;

  bool operator==(const HistoryVector&) const = default;
};

enum class ViabilityRule {
  kStructure,        // unknown schema, wrong role, bad bindings or ticks
  kUnsentReception,  // received without a matching earlier emission
  kInUnknown,        // (a) an in parameter was not known
  kOutBound,         // (b) an out parameter was already bound
  kKeyIntegrity,     // (c) two values for one parameter under one key
  kDuplicate,        // (d) same schema emitted twice for one key binding
};

std::string_view to_string(ViabilityRule r);

struct ViabilityViolation {
  ViabilityRule rule;
  std::string role;
  long tick = 0;
  MessageInstance instance;
  std::string message;
};

/// Returns the first violation found, or nullopt if `v` is viable.
std::optional<ViabilityViolation> check_viable(const HistoryVector& v,
                                               const Uod& u);

/// Only the global key-integrity rule (c), across all roles.
std::optional<ViabilityViolation> check_key_integrity(const HistoryVector& v);

/// Deterministic values for bounded enactment.
struct ValuePool {
  std::vector<std::string> key_values{"1"};
  int values_per_param = 1;

  /// `n` key values "1".."n".
  static ValuePool with_keys(int n, int values_per_param = 1);

  /// Value number `j` for a non-key out parameter.
  std::string value(std::string_view schema, std::string_view param,
                    int j) const;
};

/// Instances the history's role may emit next without breaking rules
/// (a), (b), (d) or its own view of (c). Ordered by schema (UoD order), key
/// binding, then value choice.
std::vector<MessageInstance> enabled_emissions(const History& h, const Uod& u,
                                               const ValuePool& pool);
std::vector<MessageInstance> enabled_emissions(const HistoryVector& v,
                                               const Uod& u,
                                               std::string_view role,
                                               const ValuePool& pool);

enum class Delivery { kFifo, kAny };

std::string_view to_string(Delivery d);
std::optional<Delivery> parse_delivery(std::string_view word);

/// Emitted, not yet received instances that may be received next. With FIFO
/// only the oldest in-flight instance per (sender, receiver) channel.
std::vector<MessageInstance> deliverable(const HistoryVector& v,
                                         Delivery delivery);

struct ModelEntry {
  std::string schema;
  Bindings bindings;
  Bindings key_binding;
  long time = 0;

  auto operator<=>(const ModelEntry&) const = default;
};

/// A role's knowledge with forwards resolved to the forwarded message and
/// each message stamped with the tick it first became known.
struct Model {
  std::string role;
  std::vector<ModelEntry> entries;

  bool operator==(const Model&) const = default;
};

Model project_model(const HistoryVector& v, std::string_view role,
                    const ForwardingRegistry& fwd);
Model project_model(const History& h, const ForwardingRegistry& fwd);

}  // namespace tosca

#endif  // TOSCA_ENACTMENT_HH_
