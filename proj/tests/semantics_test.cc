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

#include "tosca/semantics.hh"

#include <gtest/gtest.h>

#include "support.hh"

namespace tosca {
namespace {

ModelEntry entry(std::string schema, std::string key, long time) {
  Bindings b{{"oID", key}};
  return {std::move(schema), b, b, time};
}

std::vector<long> stamps(const std::vector<EventInstance>& xs) {
  std::vector<long> out;
  for (const auto& x : xs) out.push_back(x.timestamp);
  return out;
}

std::vector<long> eval_text(std::string_view e, const Model& m, long now) {
  return stamps(eval(parse_event_expr(e), m, now));
}

const Model kModel{"M",
                   {entry("a", "1", 1), entry("b", "1", 3), entry("a", "2", 2),
                    entry("c", "2", 6)}};

TEST(Eval, BaseEvents) {
  EXPECT_EQ(eval_text("a", kModel, 10), (std::vector<long>{1, 2}));
  EXPECT_EQ(eval_text("a", kModel, 1), std::vector<long>{1});
  EXPECT_TRUE(eval_text("z", kModel, 10).empty());
  auto xs = eval(parse_event_expr("a"), kModel, 10);
  EXPECT_EQ(xs[0].key_binding, (Bindings{{"oID", "1"}}));
}

TEST(Eval, ConjunctionTakesLatest) {
  EXPECT_EQ(eval_text("a and b", kModel, 10), std::vector<long>{3});
  EXPECT_TRUE(eval_text("a and b", kModel, 2).empty());
  EXPECT_EQ(eval_text("a and c", kModel, 10), std::vector<long>{6});
  EXPECT_TRUE(eval_text("b and c", kModel, 10).empty());  // keys differ
}

TEST(Eval, DisjunctionTakesEarliest) {
  EXPECT_EQ(eval_text("b or a", kModel, 10), (std::vector<long>{1, 2}));
  EXPECT_EQ(eval_text("b or c", kModel, 10), (std::vector<long>{3, 6}));
}

TEST(Eval, AbsoluteWindowIsHalfOpen) {
  EXPECT_EQ(eval_text("a[1, 2]", kModel, 10), std::vector<long>{1});
  EXPECT_EQ(eval_text("a[2, 3]", kModel, 10), std::vector<long>{2});
  EXPECT_TRUE(eval_text("a[3, ]", kModel, 10).empty());
}

TEST(Eval, RelativeWindow) {
  EXPECT_EQ(eval_text("b[, a + 3]", kModel, 10), std::vector<long>{3});
  EXPECT_TRUE(eval_text("b[, a + 2]", kModel, 10).empty());
  EXPECT_EQ(eval_text("c[a + 4, ]", kModel, 10), std::vector<long>{6});
  EXPECT_TRUE(eval_text("c[a + 5, ]", kModel, 10).empty());
  // the bound's event must have occurred for the same key
  EXPECT_TRUE(eval_text("c[b + 0, ]", kModel, 10).empty());
}

TEST(Eval, ExceptWaitsUntilSettled) {
  // b can still occur for key 2, so nothing is known yet
  EXPECT_EQ(eval_text("a except b", kModel, 10), std::vector<long>{});
  // with a deadline, b for key 2 is settled false at 4
  EXPECT_EQ(eval_text("a except b[, 4]", kModel, 10), std::vector<long>{4});
  EXPECT_TRUE(eval_text("a except b[, 4]", kModel, 3).empty());
  // relative deadline: a(2)@2 + 5
  EXPECT_EQ(eval_text("a except b[, a + 5]", kModel, 10), std::vector<long>{7});
  EXPECT_TRUE(eval_text("a except b[, a + 5]", kModel, 6).empty());
}

TEST(Eval, ExceptOverSettledDeadlineEvent) {
  // d never happens; a window relative to it settles when d settles
  Model m{"M", {entry("a", "1", 1), entry("e", "1", 2)}};
  EXPECT_TRUE(eval_text("a except b[, d + 1]", m, 10).empty());
  EXPECT_EQ(eval_text("a except b[, (d except e) + 1]", m, 10),
            std::vector<long>{2});
  EXPECT_EQ(eval_text("a except b[, (d[, 2]) + 1]", m, 10),
            std::vector<long>{2});
}

TEST(Eval, IgnoresFutureEntries) {
  EXPECT_EQ(eval_text("c", kModel, 5), std::vector<long>{});
  EXPECT_EQ(eval_text("c", kModel, 6), std::vector<long>{6});
}

TEST(Settled, BaseNeverSettles) {
  Bindings k{{"oID", "1"}};
  EXPECT_EQ(settled_false_at(parse_event_expr("z"), k, kModel, 100),
            std::nullopt);
  EXPECT_EQ(settled_false_at(parse_event_expr("z[, 5]"), k, kModel, 100), 5);
  EXPECT_EQ(settled_false_at(parse_event_expr("z[, 5]"), k, kModel, 4),
            std::nullopt);
  EXPECT_EQ(settled_false_at(parse_event_expr("z[, 5] and a"), k, kModel, 9),
            5);
  EXPECT_EQ(settled_false_at(parse_event_expr("z[, 5] or y"), k, kModel, 9),
            std::nullopt);
}

class Lifecycle : public ::testing::Test {
 protected:
  CommitmentSpec c = testing::commitment_in("ordering/purchase.cupid",
                                            "Purchase");
  static std::vector<Bindings> keys(const LifecycleState& s, LifecycleKind k) {
    return s[static_cast<int>(k)];
  }
  static const inline std::vector<Bindings> kOne{{{"oID", "1"}}};
};

TEST_F(Lifecycle, CreatedThenExpired) {
  Model m{"M", {entry("quote", "1", 1)}};
  auto s = lifecycle_state(c, m, 10);
  EXPECT_EQ(keys(s, LifecycleKind::kCreated), kOne);
  EXPECT_TRUE(keys(s, LifecycleKind::kExpired).empty());
  s = lifecycle_state(c, m, 11);
  EXPECT_EQ(keys(s, LifecycleKind::kExpired), kOne);
  EXPECT_TRUE(keys(s, LifecycleKind::kDetached).empty());
}

TEST_F(Lifecycle, LatePaymentDoesNotDetach) {
  Model m{"M", {entry("quote", "1", 1), entry("pay", "1", 11)}};
  auto s = lifecycle_state(c, m, 12);
  EXPECT_TRUE(keys(s, LifecycleKind::kDetached).empty());
  EXPECT_EQ(keys(s, LifecycleKind::kExpired), kOne);
}

TEST_F(Lifecycle, DischargedInTime) {
  Model m{"C", {entry("quote", "1", 1), entry("pay", "1", 3),
                entry("ship", "1", 7)}};
  auto s = lifecycle_state(c, m, 20);
  EXPECT_EQ(keys(s, LifecycleKind::kDetached), kOne);
  EXPECT_EQ(keys(s, LifecycleKind::kDischarged), kOne);
  EXPECT_TRUE(keys(s, LifecycleKind::kViolated).empty());
  auto ts = stamps(lifecycle_instances(LifecycleKind::kDischarged, c, m, 20));
  EXPECT_EQ(ts, std::vector<long>{7});
}

TEST_F(Lifecycle, ViolatedAtDeadline) {
  Model m{"C", {entry("quote", "1", 1), entry("pay", "1", 3),
                entry("ship", "1", 8)}};
  EXPECT_TRUE(keys(lifecycle_state(c, m, 7), LifecycleKind::kViolated).empty());
  auto s = lifecycle_state(c, m, 8);
  EXPECT_EQ(keys(s, LifecycleKind::kViolated), kOne);
  EXPECT_TRUE(keys(s, LifecycleKind::kDischarged).empty());
}

TEST_F(Lifecycle, NestedCommitment) {
  auto cs = testing::commitments_in("escrow/escrowtransfer.cupid");
  const CommitmentSpec& et = cs[1];
  Model m{"M", {entry("quote", "1", 1), entry("payEscrow", "1", 3),
                entry("ship", "1", 6)}};
  auto s = lifecycle_state(et, m, 6);
  EXPECT_EQ(keys(s, LifecycleKind::kCreated), kOne);
  EXPECT_EQ(keys(s, LifecycleKind::kDetached), kOne);
  EXPECT_TRUE(keys(s, LifecycleKind::kViolated).empty());
  // payTransfer is due before discharged(EscrowPurchase) + 5 = 11
  EXPECT_EQ(keys(lifecycle_state(et, m, 11), LifecycleKind::kViolated), kOne);
}

TEST_F(Lifecycle, AlignmentReport) {
  Model debtor{"M", {entry("quote", "1", 1)}};
  Model creditor{"C", {entry("quote", "1", 2), entry("pay", "1", 2)}};
  AlignmentReport r = check_alignment(debtor, creditor, c, 2);
  EXPECT_FALSE(r.aligned);
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0], (Misalignment{LifecycleKind::kDetached,
                                       {{"oID", "1"}}, "C", "M"}));

  debtor.entries.push_back(entry("pay", "1", 3));
  EXPECT_TRUE(check_alignment(debtor, creditor, c, 3).aligned);
}

TEST_F(Lifecycle, DebtorSideImplications) {
  // discharge known to the debtor must reach the creditor
  Model debtor{"M", {entry("quote", "1", 1), entry("pay", "1", 2),
                     entry("ship", "1", 4)}};
  Model creditor{"C", {entry("quote", "1", 1), entry("pay", "1", 2)}};
  auto r = check_alignment(debtor, creditor, c, 4);
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0].kind, LifecycleKind::kDischarged);
  EXPECT_EQ(r.issues[0].holder, "M");

  // the creditor knowing more about a discharge is fine
  EXPECT_TRUE(check_alignment(creditor, debtor, c, 4).aligned);
}

}  // namespace
}  // namespace tosca
