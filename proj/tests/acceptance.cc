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

// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "properties.hh"
#include "support.hh"
#include "tosca/error.hh"
#include "tosca/simulation.hh"
#include "tosca/synthesis.hh"
#include "tosca/verify.hh"

namespace tosca::testing {
namespace {

// A failed check throws; the message ends up on the FAIL line.
struct Failure {
  std::string why;
};

void require(bool cond, std::string why) {
  if (!cond) throw Failure{std::move(why)};
}

Subject subject(std::string_view file, std::string_view name) {
  auto ps = protocols_in(file);
  ProtocolRegistry reg(ps);
  return Subject::of(reg.at(name), reg);
}

MessageSchema schema_of(std::string_view text) {
  Protocol p = parse_protocol(std::string("X { roles C, E, M, S parameters "
                                          "out oID key, out item, out price, "
                                          "out pID, out sID, out fwdMEQuoteID, "
                                          "out fwdCMPayEscrowID, out fwdSEShipID, "
                                          "out fwdMEShipID ") +
                              std::string(text) + " }");
  return *p.schemas().front();
}

const CommitmentStatus& status(const TickReport& r, std::string_view name) {
  for (const auto& c : r.commitments)
    if (c.name == name) return c;
  throw Failure{"no status for " + std::string(name)};
}

bool holds(const LifecycleState& s, LifecycleKind k) {
  return !s[static_cast<int>(k)].empty();
}

std::string golden_literal() {
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  CommitmentSpec c = commitment_in("escrow/escrowpurchase.cupid", "EscrowPurchase");
  Protocol al = synthesize_alignment_protocol(c, input, SynthesisMode::kLiteral);
  Protocol expected = protocol_in("escrow/escrowpurchaseal.bspl", "EscrowPurchaseAl");
  require(al == expected, "synthesized:\n" + print_protocol(al));
  require(al.public_roles == std::vector<std::string>{"C", "M"}, "roles");
  require(al.public_params ==
              std::vector<ParameterDecl>{{"oID", Adornment::kIn, true},
                                         {"pID", Adornment::kIn, false},
                                         {"fwdCMPayEscrowID", Adornment::kOut, false}},
          "parameters");
  require(al.schemas().size() == 1, "schema count");
  return "EscrowPurchaseAl equals the hand transcription";
}

std::string golden_complete() {
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  CommitmentSpec c = commitment_in("escrow/escrowtransfer.cupid", "EscrowTransfer");
  Protocol al = synthesize_alignment_protocol(c, input, SynthesisMode::kComplete);
  const char* expected[] = {
      "M -> E: fwdMEQuote[in oID, in item, in price, out fwdMEQuoteID]",
      "C -> M: fwdCMPayEscrow[in oID, in pID, out fwdCMPayEscrowID]",
      "S -> E: fwdSEShip[in oID, in sID, out fwdSEShipID]",
      "M -> E: fwdMEShip[in oID, in sID, out fwdMEShipID]"};
  for (const char* text : expected) {
    MessageSchema want = schema_of(text);
    const MessageSchema* got = al.find_schema(want.name);
    require(got != nullptr, "missing " + want.name);
    require(*got == want, "signature of " + want.name);
  }
  return std::to_string(al.schemas().size()) + " forwards, 4 checked";
}

std::string composition() {
  Protocol input = protocol_in("escrow/escrow.bspl", "EscrowOrdering");
  std::vector<Protocol> als;
  for (const auto& c : commitments_in("escrow/escrowtransfer.cupid"))
    als.push_back(synthesize_alignment_protocol(c, input, SynthesisMode::kComplete));
  Protocol op = compose_operationalization(input, als);
  require(op.references.size() == 3, "reference count");
  auto roles = op.all_roles();
  require(std::set<std::string>(roles.begin(), roles.end()) ==
              std::set<std::string>{"M", "C", "E", "S"},
          "roles");
  require(op.key_names() == std::vector<std::string>{"oID"}, "key");

  std::multiset<std::string> outs;
  for (const auto& p : op.public_params)
    if (p.adornment == Adornment::kOut) outs.insert(p.name);
  std::multiset<std::string> want;
  for (const auto& p : input.public_params) want.insert(p.name);
  std::set<std::string> ids;
  for (const auto& al : als)
    for (const auto* s : al.schemas()) ids.insert(s->name + "ID");
  want.insert(ids.begin(), ids.end());
  require(outs == want, "out parameters");
  require(outs.count("fwdCMPayEscrowID") == 1, "fwdCMPayEscrowID declared once");
  ProtocolRegistry reg(std::vector<Protocol>{input, als[0], als[1], op});
  uod(op, reg);  // resolves
  return std::to_string(outs.size()) + " out parameters";
}

std::string purchase_timeline() {
  auto r = simulate(load_scenario(fixture("ordering/purchase_timeline.json")));
  auto at = [&](long t) { return status(r.reports.at(t - 1), "Purchase"); };
  require(at(1).alignment.aligned, "dash 1 aligned");
  require(!at(2).alignment.aligned, "dash 2 misaligned");
  require(at(2).alignment.issues.size() == 1 &&
              at(2).alignment.issues[0].kind == LifecycleKind::kDetached,
          "dash 2 misalignment is detachment");
  require(at(3).alignment.aligned, "dash 3 aligned");
  require(at(4).alignment.aligned, "dash 4 aligned");
  require(holds(at(4).creditor_view, LifecycleKind::kDischarged),
          "dash 4 discharged");
  return "aligned 1, detached-misaligned 2, aligned 3, discharged 4";
}

std::string purchase_forward() {
  auto r = simulate(load_scenario(fixture("escrow/purchase_forward.json")));
  auto at = [&](long t) { return status(r.reports.at(t - 1), "EscrowPurchase"); };
  require(!at(5).alignment.aligned, "dash 5 misaligned");
  require(at(6).alignment.aligned, "dash 6 aligned");
  bool forwarded = false;
  for (const auto& s : r.trace)
    forwarded |= s.tick == 6 && s.kind == TraceStep::Kind::kReceive &&
                 s.role == "M" && s.instance.schema == "fwdCMPayEscrow";
  require(forwarded, "M receives fwdCMPayEscrow at dash 6");
  return "misaligned 5, aligned 6";
}

std::string transfer_timeline() {
  auto r = simulate(load_scenario(fixture("escrow/transfer_timeline.json")));
  auto at = [&](long t) { return status(r.reports.at(t - 1), "EscrowTransfer"); };
  // M is the creditor, E the debtor
  require(holds(at(7).creditor_view, LifecycleKind::kDetached), "M at dash 7");
  require(!holds(at(7).debtor_view, LifecycleKind::kDetached), "E at dash 7");
  require(holds(at(8).creditor_view, LifecycleKind::kDetached), "M at dash 8");
  require(holds(at(8).debtor_view, LifecycleKind::kDetached), "E at dash 8");
  return "M only at 7, both at 8";
}

std::string preservation() {
  Bound b;  // one key value, unordered delivery
  std::string out;
  auto pair = [&](std::string_view file, std::string_view in, std::string_view op) {
    Theorem1Report r = check_theorem1(subject(file, in), subject(file, op), b);
    for (const auto* x : {&r.input_safety, &r.input_liveness, &r.composed_safety,
                          &r.composed_liveness})
      require(x->verdict == Verdict::kHolds,
              std::string(to_string(x->property)) + " of " + x->subject + ": " +
                  std::string(to_string(x->verdict)) + " " + x->detail);
    out += std::string(in) + " " + std::to_string(r.input_safety.states_explored) +
           " / " + std::to_string(r.composed_safety.states_explored) + " states; ";
  };
  pair("ordering/composed.bspl", "Ordering", "OrderingOperationalization");
  pair("escrow/composed.bspl", "EscrowOrdering", "OperationalizationProtocol");
  return out;
}

std::string reachability() {
  auto cs = commitments_in("escrow/escrowtransfer.cupid");
  auto good = check_alignment_reachability(
      subject("escrow/composed.bspl", "OperationalizationProtocol"), cs, Bound{});
  require(good.size() == 2, "two reports");
  for (const auto& r : good)
    require(r.verdict == Verdict::kHolds,
            r.subject + ": " + std::string(to_string(r.verdict)) + " " + r.detail);

  auto ep = commitment_in("escrow/escrowpurchase.cupid", "EscrowPurchase");
  auto bad = check_alignment_reachability(
      subject("escrow/escrow.bspl", "EscrowOrdering"), {ep}, Bound{});
  require(bad.size() == 1 && bad[0].verdict == Verdict::kFails,
          "EscrowOrdering without aligners must fail");
  bool paid = false;
  for (const auto& s : bad[0].witness)
    paid |= s.kind == TraceStep::Kind::kEmit && s.instance.schema == "payEscrow";
  require(paid, "witness pays the escrow");
  return "aligners hold (" + std::to_string(good[0].states_explored) +
         " states); witness of " + std::to_string(bad[0].witness.size()) +
         " steps without them";
}

std::string embedding() {
  auto r = check_embedding(subject("ordering/composed.bspl", "Ordering"),
                           subject("ordering/composed.bspl",
                                   "OrderingOperationalization"),
                           Bound{});
  require(r.verdict == Verdict::kHolds, r.detail);
  auto e = check_embedding(subject("escrow/composed.bspl", "EscrowOrdering"),
                           subject("escrow/composed.bspl",
                                   "OperationalizationProtocol"),
                           Bound{});
  require(e.verdict == Verdict::kHolds, e.detail);
  return r.detail + "; " + e.detail;
}

std::string properties() {
  std::string out;
  for (auto [name, r] : {std::pair{"round-trip", round_trip_suite(200)},
                         std::pair{"reduce", reduce_suite(300)},
                         std::pair{"eval", eval_suite(500)},
                         std::pair{"viability", viability_suite(50)}}) {
    require(r.ok(), std::string(name) + " " + *r.failure);
    out += std::string(name) + " " + std::to_string(r.cases) + " ";
  }
  return out;
}

}  // namespace
}  // namespace tosca::testing

int main() {
  using namespace tosca::testing;
  const std::pair<const char*, std::function<std::string()>> criteria[] = {
      {"literal synthesis of EscrowPurchase", golden_literal},
      {"complete synthesis of EscrowTransfer", golden_complete},
      {"operationalization composition", composition},
      {"Purchase timeline", purchase_timeline},
      {"EscrowPurchase timeline", purchase_forward},
      {"EscrowTransfer timeline", transfer_timeline},
      {"safety and liveness preserved", preservation},
      {"alignment reachability", reachability},
      {"order-preserving embedding", embedding},
      {"property suites", properties},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    auto start = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string note;
    try {
      note = check();
    } catch (const Failure& f) {
      verdict = "FAIL";
      note = f.why;
    } catch (const std::exception& e) {
      verdict = "FAIL";
      note = std::string("error: ") + e.what();
    }
    failed += verdict == "FAIL";
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s (%.2fs): %s\n", verdict.c_str(), n, name, secs,
                note.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
