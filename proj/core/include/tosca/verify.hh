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

#ifndef TOSCA_VERIFY_HH_
#define TOSCA_VERIFY_HH_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tosca/commitment.hh"
#include "tosca/enactment.hh"
#include "tosca/protocol.hh"
#include "tosca/semantics.hh"
#include "tosca/synthesis.hh"

namespace tosca {

/// Desk-scale restriction of the enactment space.
struct Bound {
  int key_values = 1;        // key values "1".."n" for out keys
  int values_per_param = 1;  // distinct values per non-key out parameter
  long max_ticks = 64;       // deadline lapses beyond this are not explored
  std::size_t max_states = 2'000'000;
  Delivery delivery = Delivery::kAny;
  /// Deadlines may lapse only with nothing in flight and no forward enabled.
  bool punctual = true;

  ValuePool pool() const { return ValuePool::with_keys(key_values, values_per_param); }
};

/// How explored states are identified.
enum class StateIdentity {
  kKnowledge,  // per-role sets of observations
  kOrdered,    // per-role observation sequences
};

/// One move of an enactment. Lapses advance the clock to `tick`.
struct TraceStep {
  enum class Kind { kEmit, kReceive, kLapse };
  Kind kind = Kind::kEmit;
  long tick = 0;
  std::string role;
  MessageInstance instance;

  bool operator==(const TraceStep&) const = default;
};

std::string_view to_string(TraceStep::Kind k);

/// Reachability graph over history vectors from the empty vector.
class StateGraph {
 public:
  struct Options {
    Bound bound;
    StateIdentity identity = StateIdentity::kKnowledge;
    /// When non-empty, deadline lapses of these commitments are explored and
    /// observations are stamped with the current tick.
    std::vector<CommitmentSpec> timed;
    /// Explore from this vector (its clock is the current tick) instead of
    /// the empty one.
    std::optional<HistoryVector> start;
  };

  /// Compact move: `role` and `instance` index roles() and instance().
  struct Move {
    TraceStep::Kind kind = TraceStep::Kind::kEmit;
    int role = -1;
    int instance = -1;
    long tick = 0;
  };

  struct Edge {
    int target;
    Move move;
  };

  StateGraph(const Uod& u, const ForwardingRegistry& fwd, Options options);
  ~StateGraph();
  StateGraph(StateGraph&&) noexcept;
  StateGraph& operator=(StateGraph&&) noexcept;

  /// Explores breadth first. Returns false if `max_states` was reached or a
  /// pending deadline lay beyond `max_ticks` (the graph is then partial).
  bool explore();

  bool complete() const;
  std::size_t size() const;
  const std::vector<Edge>& edges(int state) const;
  int parent(int state) const;
  HistoryVector vector(int state) const;
  History history(int state, int role) const;
  long now(int state) const;

  const std::vector<std::string>& roles() const;
  const MessageInstance& instance(int id) const;
  TraceStep step(const Move& m) const;

  /// True if any in-flight message or enabled forward exists.
  bool has_pending_forwarding(int state) const;

  /// Seeded random run from the initial state until no move is enabled or
  /// `max_steps` is reached. Independent of explore(). `end` receives the
  /// final vector; its clock is the current tick.
  std::vector<TraceStep> random_walk(std::uint32_t seed, std::size_t max_steps,
                                     HistoryVector& end);

  /// Steps from the initial state to `state`.
  std::vector<TraceStep> path_to(int state) const;

  /// States from which some state in `targets` is reachable.
  std::vector<bool> can_reach(const std::vector<bool>& targets) const;

  /// Shortest step sequence from `from` to any state in `targets`.
  std::optional<std::vector<TraceStep>> shortest_path(
      int from, const std::vector<bool>& targets) const;

  const Uod& uod() const;
  const ForwardingRegistry& forwards() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class Property { kSafety, kLiveness, kEmbedding, kAlignmentReachability };
enum class Verdict { kHolds, kFails, kInconclusive };

std::string_view to_string(Property p);
std::string_view to_string(Verdict v);

struct VerificationReport {
  Property property = Property::kSafety;
  Verdict verdict = Verdict::kHolds;
  std::string subject;
  std::string detail;
  /// Counterexample, or for alignment reachability the state of greatest
  /// misalignment.
  std::vector<TraceStep> witness;
  /// Aligning extension of `witness` (alignment reachability only).
  std::vector<TraceStep> extension;
  std::size_t states_explored = 0;

  bool holds() const { return verdict == Verdict::kHolds; }
};

/// Resolved protocol plus the UoD and forwards needed to enumerate it.
struct Subject {
  Protocol protocol;
  Uod uod;
  ForwardingRegistry forwards;

  static Subject of(const Protocol& p, const ProtocolRegistry& registry);
};

VerificationReport check_safety(const Subject& s, const Bound& bound);
VerificationReport check_liveness(const Subject& s, const Bound& bound);

struct Theorem1Report {
  VerificationReport input_safety;
  VerificationReport composed_safety;
  VerificationReport input_liveness;
  VerificationReport composed_liveness;

  /// Verdict of the implication "input holds => composed holds".
  Verdict safety_preserved() const;
  Verdict liveness_preserved() const;
  bool holds() const;
};

Theorem1Report check_theorem1(const Subject& input, const Subject& composed,
                              const Bound& bound);

/// Every terminal enactment of `input` embeds, role by role and in order,
/// into some enactment of `composed`.
VerificationReport check_embedding(const Subject& input,
                                   const Subject& composed, const Bound& bound);

/// Every reachable state can be extended to one where each commitment is
/// aligned. One report per commitment. If the graph exceeds the bound, a
/// failing verdict is still reported when some explored state has a fully
/// enumerable future without an aligned state.
std::vector<VerificationReport> check_alignment_reachability(
    const Subject& composed, const std::vector<CommitmentSpec>& commitments,
    const Bound& bound);

std::string trace_to_jsonl(const std::vector<TraceStep>& steps);
std::string report_to_json(const VerificationReport& r);

}  // namespace tosca

#endif  // TOSCA_VERIFY_HH_
