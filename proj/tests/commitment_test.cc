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

#include <gtest/gtest.h>

#include "support.hh"
#include "tosca/error.hh"

namespace tosca {
namespace {

using testing::commitment_in;
using testing::protocol_in;

TEST(Commitment, ParsesPurchase) {
  CommitmentSpec c = commitment_in("ordering/purchase.cupid", "Purchase");
  EXPECT_EQ(c.debtor, "M");
  EXPECT_EQ(c.creditor, "C");
  EXPECT_EQ(c.create, EventExpr::base("quote"));
  const auto& w = std::get<WindowEvent>(c.detach.node().value);
  EXPECT_EQ(w.inner, EventExpr::base("pay"));
  EXPECT_TRUE(w.from.is_zero());
  EXPECT_EQ(w.to, TimeRef::event_plus(EventExpr::base("quote"), 10));
}

TEST(Commitment, PrintRoundTrip) {
  CommitmentRegistry reg;
  auto cs = parse_commitments(
      read_file(testing::fixture("escrow/escrowtransfer.cupid")), reg);
  ASSERT_EQ(cs.size(), 2u);
  for (const auto& c : cs) {
    std::string text = print_commitment(c);
    EXPECT_EQ(parse_commitment(text, reg), c) << text;
  }
}

TEST(Commitment, NamedLifecycleReference) {
  CommitmentSpec et =
      commitment_in("escrow/escrowtransfer.cupid", "EscrowTransfer");
  const auto& lc = std::get<LifecycleEvent>(et.detach.node().value);
  EXPECT_EQ(lc.kind, LifecycleKind::kDischarged);
  EXPECT_EQ(lc.commitment->name, "EscrowPurchase");
  EXPECT_EQ(print_expr(et.detach), "discharged(EscrowPurchase)");
}

TEST(Commitment, AnonymousNestedCommitment) {
  EventExpr e = parse_event_expr("created(M, C, quote, pay, ship)");
  const auto& lc = std::get<LifecycleEvent>(e.node().value);
  EXPECT_EQ(lc.commitment->debtor, "M");
  EXPECT_EQ(lc.commitment->discharge, EventExpr::base("ship"));
  EXPECT_EQ(parse_event_expr(print_expr(e)), e);
}

TEST(Commitment, Precedence) {
  // except binds loosest, then or, then and
  EventExpr e = parse_event_expr("a and b or c except d");
  const auto& top = std::get<BinaryEvent>(e.node().value);
  EXPECT_EQ(top.op, BinaryOp::kExcept);
  const auto& lhs = std::get<BinaryEvent>(top.lhs.node().value);
  EXPECT_EQ(lhs.op, BinaryOp::kOr);
  EXPECT_EQ(std::get<BinaryEvent>(lhs.lhs.node().value).op, BinaryOp::kAnd);
  EXPECT_EQ(print_expr(parse_event_expr("(a or b) and c")), "(a or b) and c");
}

TEST(Commitment, GlyphsMatchWords) {
  EXPECT_EQ(parse_event_expr("a ⊓ b ⊔ c ⊖ d"),
            parse_event_expr("a and b or c except d"));
}

TEST(Commitment, WindowForms) {
  EXPECT_EQ(print_expr(parse_event_expr("a[3, 7]")), "a[3, 7]");
  EXPECT_EQ(print_expr(parse_event_expr("a[b + 1, ]")), "a[b + 1, ]");
  EXPECT_EQ(print_expr(parse_event_expr("a[, inf]")), "a[, ]");
  EXPECT_EQ(print_expr(parse_event_expr("a[, b]")), "a[, b + 0]");
}

TEST(Commitment, LifecycleFormulas) {
  CommitmentSpec c;
  c.debtor = "D";
  c.creditor = "R";
  c.create = EventExpr::base("x");
  c.detach = EventExpr::base("y");
  c.discharge = EventExpr::base("z");
  auto text = [&](LifecycleKind k) { return print_expr(lifecycle_formula(k, c)); };
  EXPECT_EQ(text(LifecycleKind::kCreated), "x");
  EXPECT_EQ(text(LifecycleKind::kDetached), "x and y");
  EXPECT_EQ(text(LifecycleKind::kDischarged), "x and z or y and z");
  EXPECT_EQ(text(LifecycleKind::kExpired), "x except y");
  EXPECT_EQ(text(LifecycleKind::kViolated), "x and y except z");
}

TEST(Commitment, UnknownCommitmentReference) {
  EXPECT_THROW(parse_event_expr("discharged(Nope)"), UnknownCommitmentReference);
}

TEST(Commitment, NestedDebtorEqualsCreditor) {
  EXPECT_THROW(parse_event_expr("created(M, M, a, b, c)"), WellFormednessError);
}

TEST(Commitment, SyntaxErrors) {
  EXPECT_THROW(parse_commitment("commitment P M C create a detach b discharge c"),
               ParseError);
  EXPECT_THROW(parse_event_expr("a and"), ParseError);
  EXPECT_THROW(parse_event_expr("a[1, 2"), ParseError);
}

class Binding : public ::testing::Test {
 protected:
  Uod u = uod(protocol_in("ordering/ordering.bspl", "Ordering"), {});
};

TEST_F(Binding, PurchaseBinds) {
  EXPECT_NO_THROW(bind(commitment_in("ordering/purchase.cupid", "Purchase"), u));
}

TEST_F(Binding, UnknownBaseEvent) {
  EXPECT_THROW(bind(parse_event_expr("refund"), u), UnknownBaseEvent);
}

TEST_F(Binding, UnknownRole) {
  CommitmentSpec c = parse_commitment(
      "commitment X M to Z create quote detach pay discharge ship");
  EXPECT_THROW(bind(c, u), WellFormednessError);
}

TEST_F(Binding, DebtorEqualsCreditor) {
  EXPECT_THROW(parse_commitment(
                   "commitment X M to M create quote detach pay discharge ship"),
               WellFormednessError);
  CommitmentSpec c = parse_commitment(
      "commitment X M to C create quote detach pay discharge ship");
  c.creditor = "M";
  EXPECT_THROW(bind(c, u), WellFormednessError);
}

TEST_F(Binding, NegativeWindowStart) {
  EventExpr e = EventExpr::window(EventExpr::base("pay"), TimeRef::absolute(-1),
                                  TimeRef::infinity());
  EXPECT_THROW(bind(e, u), WellFormednessError);
}

TEST(Commitment, DisjunctionNeedsSharedKey) {
  Protocol p = parse_protocol(R"(P {
    roles A, B
    parameters out j key, out k key, out v
    A -> B: m[out j, out v]
    B -> A: n[out k, out v]
  })");
  Uod u = uod(p, {});
  EXPECT_THROW(bind(parse_event_expr("m or n"), u), WellFormednessError);
  EXPECT_NO_THROW(bind(parse_event_expr("m and n"), u));
  EXPECT_EQ(key_params(parse_event_expr("m and n"), u),
            (std::vector<std::string>{"j", "k"}));
}

TEST(Commitment, BaseNamesIncludeDeadlines) {
  CommitmentSpec et =
      commitment_in("escrow/escrowtransfer.cupid", "EscrowTransfer");
  EXPECT_EQ(base_names(et.discharge),
            (std::vector<std::string>{"payEscrow", "payTransfer", "quote",
                                      "ship"}));
}

}  // namespace
}  // namespace tosca
