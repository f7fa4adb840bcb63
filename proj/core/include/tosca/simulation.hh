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

#ifndef TOSCA_SIMULATION_HH_
#define TOSCA_SIMULATION_HH_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tosca/commitment.hh"
#include "tosca/enactment.hh"
#include "tosca/protocol.hh"
#include "tosca/semantics.hh"
#include "tosca/synthesis.hh"
#include "tosca/verify.hh"

namespace tosca {

std::string read_file(const std::filesystem::path& path);

/// Protocols and commitments loaded from files.
struct Workspace {
  ProtocolRegistry registry;
  Protocol principal;  // the last protocol of the file unless named
  CommitmentRegistry commitment_registry;
  std::vector<CommitmentSpec> commitments;  // in file order

  Uod uod() const { return tosca::uod(principal, registry); }
  const CommitmentSpec& commitment(std::string_view name) const;
};

Workspace load_workspace(
    const std::filesystem::path& protocol_file,
    const std::vector<std::filesystem::path>& commitment_files = {},
    const std::optional<std::string>& principal = std::nullopt);

enum class Policy { kScripted, kRandom, kAligner };

std::string_view to_string(Policy p);
std::optional<Policy> parse_policy(std::string_view word);

struct ScriptedMove {
  long tick = 0;
  std::string role;
  Direction direction = Direction::kEmit;
  std::string schema;
  /// Required values; missing parameters take the first enabled choice.
  Bindings bindings;
};

struct Scenario {
  std::filesystem::path protocol_file;
  std::optional<std::string> principal;
  std::vector<std::filesystem::path> commitment_files;
  std::vector<std::string> check;  // commitments to report; empty means all
  long horizon = 16;
  Delivery delivery = Delivery::kAny;
  long max_delay = 1;  // random and aligner policies
  int keys = 1;
  Policy policy = Policy::kScripted;
  std::uint32_t seed = 0;
  std::vector<ScriptedMove> moves;
};

/// Relative paths resolve against `base_dir`.
Scenario parse_scenario(std::string_view json,
                        const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// One move per line, in the format written by trace_to_jsonl.
std::vector<ScriptedMove> parse_moves_jsonl(std::string_view text);

struct CommitmentStatus {
  std::string name;
  std::string debtor;
  std::string creditor;
  LifecycleState debtor_view;
  LifecycleState creditor_view;
  AlignmentReport alignment;
};

struct TickReport {
  long tick = 0;
  std::vector<CommitmentStatus> commitments;

  bool aligned() const;
};

std::string tick_report_to_json(const TickReport& r);

/// Steps an enactment one move at a time, recording a trace.
class Simulator {
 public:
  Simulator(Uod u, ForwardingRegistry fwd, std::vector<CommitmentSpec> tracked,
            ValuePool pool = {}, Delivery delivery = Delivery::kAny);

  long now() const { return now_; }
  /// Moves the clock forward; never backward.
  void advance_to(long tick);

  const HistoryVector& vector() const { return vector_; }
  const std::vector<TraceStep>& trace() const { return trace_; }
  const Uod& uod() const { return uod_; }
  const ForwardingRegistry& forwards() const { return fwd_; }

  std::vector<MessageInstance> enabled(std::string_view role) const;
  std::vector<MessageInstance> deliverable() const;
  /// Emission tick of an in-flight instance.
  long sent_at(const MessageInstance& m) const;

  void emit(const MessageInstance& m);
  void receive(const MessageInstance& m);

  /// Applies a scripted move; throws ScriptedMoveNotEnabled if no enabled
  /// move matches.
  const MessageInstance& apply(const ScriptedMove& move);

  TickReport report() const;

 private:
  Uod uod_;
  ForwardingRegistry fwd_;
  std::vector<CommitmentSpec> tracked_;
  ValuePool pool_;
  Delivery delivery_;
  HistoryVector vector_;
  std::vector<TraceStep> trace_;
  long now_ = 0;
};

struct SimulationResult {
  std::vector<TickReport> reports;  // one per tick 1..horizon
  std::vector<TraceStep> trace;
  HistoryVector final;
};

SimulationResult simulate(const Workspace& w, const Scenario& s);
SimulationResult simulate(const Scenario& s);

}  // namespace tosca

#endif  // TOSCA_SIMULATION_HH_
