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

#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "support.hh"
#include "tosca/error.hh"

namespace tosca {
namespace {

using testing::commitment_in;
using testing::protocol_in;
using Atom = std::tuple<std::string, std::string, std::string>;

std::set<Atom> atoms(const std::vector<AlignmentInstruction>& xs) {
  std::set<Atom> out;
  for (const auto& x : xs) out.emplace(x.knower, atomic_message(x), x.learner);
  return out;
}

std::set<Atom> reduce_text(std::string knower, std::string_view formula,
                           std::string learner) {
  return atoms(reduce({std::move(knower), parse_event_expr(formula),
                       std::move(learner)}));
}

std::set<std::string> schema_names(const Protocol& p) {
  std::set<std::string> out;
  for (const auto* s : p.schemas()) out.insert(s->name);
  return out;
}

TEST(Reduce, AtomIsFixpoint) {
  EXPECT_EQ(reduce_text("A", "x", "B"), (std::set<Atom>{{"A", "x", "B"}}));
}

TEST(Reduce, SelfAlignmentDropped) {
  EXPECT_TRUE(reduce_text("A", "x and y", "A").empty());
}

TEST(Reduce, ConjunctionAndDisjunctionSplit) {
  std::set<Atom> both{{"A", "x", "B"}, {"A", "y", "B"}};
  EXPECT_EQ(reduce_text("A", "x and y", "B"), both);
  EXPECT_EQ(reduce_text("A", "x or y", "B"), both);
}

TEST(Reduce, ExceptSwapsRolesOnTheRight) {
  EXPECT_EQ(reduce_text("A", "x except y", "B"),
            (std::set<Atom>{{"A", "x", "B"}, {"B", "y", "A"}}));
}

TEST(Reduce, WindowAlignsDeadlineEvents) {
  EXPECT_EQ(reduce_text("A", "x[y + 1, z + 2]", "B"),
            (std::set<Atom>{{"A", "x", "B"}, {"A", "y", "B"}, {"A", "z", "B"}}));
  EXPECT_EQ(reduce_text("A", "x[3, 9]", "B"), (std::set<Atom>{{"A", "x", "B"}}));
}

TEST(Reduce, LifecycleExpands) {
  EXPECT_EQ(reduce_text("A", "violated(B, A, c, d, e)", "B"),
            (std::set<Atom>{{"A", "c", "B"}, {"A", "d", "B"}, {"B", "e", "A"}}));
}

TEST(Reduce, OutputIsSortedAndUnique) {
  auto out = reduce({"A", parse_event_expr("z and y and z and x"), "B"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(atomic_message(out[0]), "x");
  EXPECT_EQ(atomic_message(out[2]), "z");
}

TEST(Reduce, FuelExhaustion) {
  EXPECT_THROW(reduce({"A", parse_event_expr("a and b and c"), "B"}, 2),
               InternalError);
}

TEST(Decompose, FiveInstructionsInOrder) {
  CommitmentSpec c = commitment_in("ordering/purchase.cupid", "Purchase");
  auto xs = decompose_commitment(c);
  ASSERT_EQ(xs.size(), 5u);
  const LifecycleKind order[] = {LifecycleKind::kCreated, LifecycleKind::kDetached,
                                 LifecycleKind::kViolated, LifecycleKind::kDischarged,
                                 LifecycleKind::kExpired};
  for (int i = 0; i < 5; ++i) {
    const auto& lc = std::get<LifecycleEvent>(xs[i].formula.node().value);
    EXPECT_EQ(lc.kind, order[i]);
    bool creditor_knows = i < 3;
    EXPECT_EQ(xs[i].knower, creditor_knows ? "C" : "M");
    EXPECT_EQ(xs[i].learner, creditor_knows ? "M" : "C");
  }
}

TEST(Decompose, EscrowPurchaseAtoms) {
  CommitmentSpec c =
      commitment_in("escrow/escrowpurchase.cupid", "EscrowPurchase");
  std::set<Atom> all;
  for (const auto& x : decompose_commitment(c)) all.merge(atoms(reduce(x)));
  EXPECT_EQ(all, (std::set<Atom>{{"C", "quote", "M"},
                                 {"C", "payEscrow", "M"},
                                 {"M", "quote", "C"},
                                 {"M", "payEscrow", "C"},
                                 {"M", "ship", "C"}}));
}

TEST(Forwarding, NamesAndSchema) {
  auto f = ForwardingName::make("C", "M", "payEscrow");
  EXPECT_EQ(f.name, "fwdCMPayEscrow");
  EXPECT_EQ(f.id_param, "fwdCMPayEscrowID");
  EXPECT_TRUE(has_forward_prefix(f.name));
  EXPECT_FALSE(has_forward_prefix("pay"));

  Protocol p = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  MessageSchema s = forwarding_schema(*p.find_schema("quote"), "M", "E");
  EXPECT_EQ(s.name, "fwdMEQuote");
  EXPECT_EQ(s.sender, "M");
  EXPECT_EQ(s.receiver, "E");
  ASSERT_EQ(s.params.size(), 4u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(s.params[i].adornment, Adornment::kIn);
  EXPECT_TRUE(s.params[0].is_key);
  EXPECT_EQ(s.params[3], (ParameterDecl{"fwdMEQuoteID", Adornment::kOut, false}));
}

TEST(Forwarding, RegistryRejectsConflicts) {
  ForwardingRegistry reg;
  reg.add(ForwardingName::make("C", "M", "pay"));
  reg.add(ForwardingName::make("C", "M", "pay"));
  EXPECT_EQ(reg.all().size(), 1u);
  ForwardingName clash = ForwardingName::make("C", "M", "pay");
  clash.base_message = "other";
  EXPECT_THROW(reg.add(clash), NameClash);
}

TEST(Forwarding, RecoveredFromUod) {
  auto ps = testing::protocols_in("escrow/composed.bspl");
  ProtocolRegistry reg(ps);
  Uod u = uod(reg.at("OperationalizationProtocol"), reg);
  ForwardingRegistry fwd = ForwardingRegistry::from_uod(u);
  EXPECT_EQ(fwd.all().size(), 7u);
  const ForwardingName* f = fwd.find("fwdSEShip");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->base_message, "ship");
  EXPECT_EQ(f->forwarder, "S");
  EXPECT_EQ(f->recipient, "E");
}

TEST(Forwarding, LiteralVersusComplete) {
  Uod u = uod(protocol_in("escrow/escrow.bspl", "EscrowOrdering"), {});
  AlignmentInstruction shipped{"M", EventExpr::base("ship"), "C"};
  EXPECT_TRUE(forwards_for(shipped, u, SynthesisMode::kLiteral).empty());
  auto complete = forwards_for(shipped, u, SynthesisMode::kComplete);
  ASSERT_EQ(complete.size(), 1u);
  EXPECT_EQ(complete[0].name, "fwdSMShip");

  AlignmentInstruction unknown{"M", EventExpr::base("refund"), "C"};
  EXPECT_THROW(forwards_for(unknown, u, SynthesisMode::kLiteral),
               UnknownMessage);
}

TEST(Synthesis, LiteralEscrowPurchaseGolden) {
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  CommitmentSpec c =
      commitment_in("escrow/escrowpurchase.cupid", "EscrowPurchase");
  Protocol al = synthesize_alignment_protocol(c, input, SynthesisMode::kLiteral);
  Protocol expected =
      protocol_in("escrow/escrowpurchaseal.bspl", "EscrowPurchaseAl");
  EXPECT_EQ(al, expected) << print_protocol(al);
}

TEST(Synthesis, CompleteEscrowTransfer) {
  auto ps = testing::protocols_in("escrow/composed.bspl");
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  CommitmentSpec c =
      commitment_in("escrow/escrowtransfer.cupid", "EscrowTransfer");
  Protocol al =
      synthesize_alignment_protocol(c, input, SynthesisMode::kComplete);
  EXPECT_EQ(al, protocol_in("escrow/composed.bspl", "EscrowTransferAl"))
      << print_protocol(al);

  // the hand transcription holds a subset of the complete forwards
  Protocol golden =
      protocol_in("escrow/escrowtransferal.bspl", "EscrowTransferAl");
  for (const auto* s : golden.schemas()) {
    const MessageSchema* got = al.find_schema(s->name);
    ASSERT_NE(got, nullptr) << s->name;
    EXPECT_EQ(*got, *s);
  }
}

TEST(Synthesis, LiteralEscrowTransfer) {
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  CommitmentSpec c =
      commitment_in("escrow/escrowtransfer.cupid", "EscrowTransfer");
  Protocol al =
      synthesize_alignment_protocol(c, input, SynthesisMode::kLiteral);
  // only the original sender forwards
  EXPECT_EQ(schema_names(al),
            (std::set<std::string>{"fwdCMPayEscrow", "fwdMEQuote",
                                   "fwdSEShip", "fwdSMShip"}));
}

TEST(Synthesis, NothingToForward) {
  Protocol input = protocol_in("ordering/ordering.bspl", "Ordering");
  CommitmentSpec c = commitment_in("ordering/purchase.cupid", "Purchase");
  Protocol al = synthesize_alignment_protocol(c, input, SynthesisMode::kLiteral);
  EXPECT_EQ(al.name, "PurchaseAl");
  EXPECT_TRUE(al.references.empty());
  EXPECT_TRUE(al.all_roles().empty());

  Protocol op = compose_operationalization(input, {al});
  EXPECT_EQ(op.references.size(), 1u);
}

TEST(Synthesis, Deterministic) {
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  CommitmentSpec c =
      commitment_in("escrow/escrowtransfer.cupid", "EscrowTransfer");
  EXPECT_EQ(print_protocol(synthesize_alignment_protocol(
                c, input, SynthesisMode::kComplete)),
            print_protocol(synthesize_alignment_protocol(
                c, input, SynthesisMode::kComplete)));
}

TEST(Synthesis, UnboundCommitmentRejected) {
  Protocol input = protocol_in("ordering/ordering.bspl", "Ordering");
  CommitmentSpec c =
      commitment_in("escrow/escrowpurchase.cupid", "EscrowPurchase");
  EXPECT_THROW(synthesize_alignment_protocol(c, input, SynthesisMode::kComplete),
               UnknownBaseEvent);
}

TEST(Synthesis, ForwardNameCollision) {
  Protocol input = parse_protocol(R"(P {
    roles A, B, C
    parameters out k key, out v, out w
    A -> B: x[out k, out v]
    A -> C: fwdACX[in k, in v, out w]
  })");
  CommitmentSpec c =
      parse_commitment("commitment Q B to C create x detach x discharge x");
  EXPECT_THROW(synthesize_alignment_protocol(c, input, SynthesisMode::kLiteral),
               NameClash);
}

TEST(Composition, EscrowOperationalization) {
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  auto cs = testing::commitments_in("escrow/escrowtransfer.cupid");
  std::vector<Protocol> als;
  for (const auto& c : cs)
    als.push_back(
        synthesize_alignment_protocol(c, input, SynthesisMode::kComplete));
  Protocol op = compose_operationalization(input, als);
  EXPECT_EQ(op, protocol_in("escrow/composed.bspl",
                            "OperationalizationProtocol"));
  EXPECT_EQ(op.references.size(), 3u);
  EXPECT_EQ(op.key_names(), std::vector<std::string>{"oID"});
  int ids = 0;
  for (const auto& p : op.public_params) ids += p.name == "fwdCMPayEscrowID";
  EXPECT_EQ(ids, 1);
}

TEST(Composition, DuplicateAlignerNames) {
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  CommitmentSpec c =
      commitment_in("escrow/escrowpurchase.cupid", "EscrowPurchase");
  Protocol lit = synthesize_alignment_protocol(c, input, SynthesisMode::kLiteral);
  Protocol full =
      synthesize_alignment_protocol(c, input, SynthesisMode::kComplete);
  EXPECT_NO_THROW(compose_operationalization(input, {lit, lit}));
  EXPECT_THROW(compose_operationalization(input, {lit, full}), NameClash);
}

}  // namespace
}  // namespace tosca
