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

#ifndef TOSCA_SYNTHESIS_HH_
#define TOSCA_SYNTHESIS_HH_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tosca/commitment.hh"
#include "tosca/protocol.hh"

namespace tosca {

/// al(knower, formula, learner): whenever `knower` knows `formula` holds,
/// `learner` must be able to learn it.
struct AlignmentInstruction {
  std::string knower;
  EventExpr formula;
  std::string learner;

  bool operator==(const AlignmentInstruction&) const = default;
};

std::string print_instruction(const AlignmentInstruction& in);

enum class SynthesisMode { kLiteral, kComplete };

std::string_view to_string(SynthesisMode m);
std::optional<SynthesisMode> parse_mode(std::string_view word);

/// The five lifecycle instructions of a commitment, in the order
/// created, detached, violated, discharged, expired.
std::vector<AlignmentInstruction> decompose_commitment(const CommitmentSpec& c);

inline constexpr std::size_t kDefaultReduceFuel = 1 << 20;

/// Rewrites `in` to a fixpoint of atomic (base event) instructions, sorted by
/// (knower, message, learner), duplicates and self-alignments removed.
/// Throws InternalError if more than `fuel` rewrite steps are needed.
std::vector<AlignmentInstruction> reduce(const AlignmentInstruction& in,
                                         std::size_t fuel = kDefaultReduceFuel);

/// Name of the message an atomic instruction aligns.
const std::string& atomic_message(const AlignmentInstruction& in);

struct ForwardingName {
  std::string forwarder;
  std::string recipient;
  std::string base_message;
  std::string name;
  std::string id_param;

  static ForwardingName make(std::string forwarder, std::string recipient,
                             std::string base_message);

  bool operator==(const ForwardingName&) const = default;
};

/// Schema relaying instances of `base` from `forwarder` to `recipient`:
/// every parameter of `base` as `in` (keys kept), plus one fresh `out` id.
MessageSchema forwarding_schema(const MessageSchema& base,
                                const std::string& forwarder,
                                const std::string& recipient);

class ForwardingRegistry {
 public:
  /// Throws NameClash if `f.name` is already registered for another triple.
  void add(const ForwardingName& f);
  const ForwardingName* find(std::string_view name) const;
  const std::map<std::string, ForwardingName, std::less<>>& all() const {
    return names_;
  }

  /// Recovers the forwarding schemas of a UoD from their names and shapes.
  static ForwardingRegistry from_uod(const Uod& u);

 private:
  std::map<std::string, ForwardingName, std::less<>> names_;
};

/// True if `name` uses the forwarding-name prefix.
bool has_forward_prefix(std::string_view name);

/// Forwarding schemas that let the learner of an atomic instruction observe
/// the aligned message. Throws UnknownMessage if it has no schema in `u`.
std::vector<MessageSchema> forwards_for(const AlignmentInstruction& atomic,
                                        const Uod& u, SynthesisMode mode);

/// Alignment protocol `<c.name>Al` for `c` over `input`. `registry` resolves
/// protocols that `input` references.
Protocol synthesize_alignment_protocol(const CommitmentSpec& c,
                                       const Protocol& input,
                                       const ProtocolRegistry& registry,
                                       SynthesisMode mode);
Protocol synthesize_alignment_protocol(const CommitmentSpec& c,
                                       const Protocol& input,
                                       SynthesisMode mode);

inline constexpr std::string_view kDefaultOperationalizationName =
    "OperationalizationProtocol";

/// Composite referencing `input` and every aligner with at least two roles.
Protocol compose_operationalization(
    const Protocol& input, const std::vector<Protocol>& aligners,
    std::string name = std::string(kDefaultOperationalizationName));

}  // namespace tosca

#endif  // TOSCA_SYNTHESIS_HH_
