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

#ifndef TOSCA_SEMANTICS_HH_
#define TOSCA_SEMANTICS_HH_

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "tosca/commitment.hh"
#include "tosca/enactment.hh"

namespace tosca {

struct EventInstance {
  Bindings key_binding;
  Bindings attributes;
  long timestamp = 0;

  auto operator<=>(const EventInstance&) const = default;
};

/// Instances of `e` in `model` as of instant `now`. Entries stamped after
/// `now` are ignored. The result is sorted and free of duplicates.
std::vector<EventInstance> eval(const EventExpr& e, const Model& model,
                                long now);

/// Earliest instant, no later than `now`, from which `e` can no longer occur
/// for instances correlated with `key`; nullopt if that is not yet settled.
std::optional<long> settled_false_at(const EventExpr& e, const Bindings& key,
                                     const Model& model, long now);

std::vector<EventInstance> lifecycle_instances(LifecycleKind kind,
                                               const CommitmentSpec& c,
                                               const Model& model, long now);

/// Key bindings in each of the five lifecycle sets, indexed by LifecycleKind.
using LifecycleState = std::array<std::vector<Bindings>, 5>;

LifecycleState lifecycle_state(const CommitmentSpec& c, const Model& model,
                               long now);

struct Misalignment {
  LifecycleKind kind;
  Bindings key_binding;
  std::string holder;   // role that infers the lifecycle event
  std::string lacking;  // role that must but does not

  bool operator==(const Misalignment&) const = default;
};

struct AlignmentReport {
  bool aligned = true;
  std::vector<Misalignment> issues;
};

std::string print_misalignment(const Misalignment& m);

/// The five implications: created, detached and violated known to the
/// creditor must be known to the debtor; discharged and expired known to the
/// debtor must be known to the creditor. Instances match by key binding.
AlignmentReport check_alignment(const Model& debtor, const Model& creditor,
                                const CommitmentSpec& c, long now);
AlignmentReport check_alignment(const HistoryVector& v, const CommitmentSpec& c,
                                long now, const ForwardingRegistry& fwd);

}  // namespace tosca

#endif  // TOSCA_SEMANTICS_HH_
