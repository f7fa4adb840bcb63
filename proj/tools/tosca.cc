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

// tosca: command-line front end.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "tosca/commitment.hh"
#include "tosca/error.hh"
#include "tosca/protocol.hh"
#include "tosca/simulation.hh"
#include "tosca/synthesis.hh"
#include "tosca/verify.hh"

namespace fs = std::filesystem;
using namespace tosca;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCounterexample = 2;
constexpr int kExitBoundExceeded = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("tosca");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TOSCA_LOG")) {
    auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string_view(env) == "off")
      spdlog::set_level(level);
  }
}

bool is_cupid(const fs::path& p) { return p.extension() == ".cupid"; }

void split_inputs(const std::vector<std::string>& files,
                  std::vector<fs::path>& protocols,
                  std::vector<fs::path>& commitments) {
  for (const auto& f : files) {
    if (is_cupid(f)) {
      commitments.emplace_back(f);
    } else {
      protocols.emplace_back(f);
    }
  }
}

// Commitments of `w`, or those named in `only`.
std::vector<CommitmentSpec> selected(const Workspace& w,
                                     const std::vector<std::string>& only) {
  if (only.empty()) return w.commitments;
  std::vector<CommitmentSpec> out;
  for (const auto& name : only) out.push_back(w.commitment(name));
  return out;
}

std::string print_file(const std::vector<Protocol>& protocols) {
  std::string out;
  for (std::size_t i = 0; i < protocols.size(); ++i) {
    if (i) out += "\n";
    out += print_protocol(protocols[i]);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << text;
  spdlog::info("wrote {}", path.string());
}

std::string print_bindings(const Bindings& b) {
  std::vector<std::string> kv;
  for (const auto& [k, v] : b) kv.push_back(k + "=" + v);
  return fmt::format("{{{}}}", fmt::join(kv, ", "));
}

std::string print_step(const TraceStep& s) {
  if (s.kind == TraceStep::Kind::kLapse)
    return fmt::format("tick {}: clock advances", s.tick);
  return fmt::format("tick {}: {} {} {}", s.tick, s.role, to_string(s.kind),
                     print_instance(s.instance));
}

// ---------------------------------------------------------------------------

struct ParseArgs {
  std::vector<std::string> files;
};

int cmd_parse(const ParseArgs& a) {
  std::vector<fs::path> protocols, commitments;
  split_inputs(a.files, protocols, commitments);
  for (const auto& p : protocols) {
    Workspace w = load_workspace(p);
    for (const auto& [name, proto] : w.registry.all()) {
      Uod u = uod(proto, w.registry);
      fmt::print("protocol {}: {} roles, {} schemas\n", name, u.roles.size(),
                 u.schemas.size());
    }
  }
  if (!commitments.empty()) {
    CommitmentRegistry registry;
    std::optional<Uod> u;
    if (!protocols.empty()) u = load_workspace(protocols.back()).uod();
    for (const auto& f : commitments) {
      for (const auto& c : parse_commitments(read_file(f), registry)) {
        if (u) bind(c, *u);
        fmt::print("commitment {}: {} to {}\n", c.name, c.debtor, c.creditor);
      }
    }
  }
  return kExitOk;
}

int cmd_print(const ParseArgs& a) {
  bool first = true;
  for (const auto& f : a.files) {
    std::string text = read_file(f);
    if (!first) fmt::print("\n");
    first = false;
    if (is_cupid(f)) {
      CommitmentRegistry registry;
      auto cs = parse_commitments(text, registry);
      for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) fmt::print("\n");
        fmt::print("{}", print_commitment(cs[i]));
      }
    } else {
      fmt::print("{}", print_file(parse_protocols(text)));
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthesizeArgs {
  std::vector<std::string> files;
  std::string mode = "complete";
  std::vector<std::string> only;
  std::string principal;
  std::string out_dir;
  std::string name = std::string(kDefaultOperationalizationName);
};

int cmd_synthesize(const SynthesizeArgs& a) {
  std::vector<fs::path> protocols, commitments;
  split_inputs(a.files, protocols, commitments);
  if (protocols.size() != 1)
    throw Error("synthesize takes exactly one protocol file");
  auto mode = parse_mode(a.mode);
  if (!mode) throw Error(fmt::format("unknown mode '{}'", a.mode));

  Workspace w = load_workspace(
      protocols.front(), commitments,
      a.principal.empty() ? std::nullopt : std::optional(a.principal));
  std::vector<Protocol> aligners;
  for (const auto& c : selected(w, a.only)) {
    Protocol al =
        synthesize_alignment_protocol(c, w.principal, w.registry, *mode);
    if (al.references.empty())
      spdlog::warn("{}: no forwarding required", c.name);
    aligners.push_back(std::move(al));
  }
  Protocol composite = compose_operationalization(w.principal, aligners, a.name);

  std::vector<Protocol> all = parse_protocols(read_file(protocols.front()));
  for (const auto& al : aligners)
    if (!al.references.empty()) all.push_back(al);
  all.push_back(composite);

  if (a.out_dir.empty()) {
    std::vector<Protocol> shown = aligners;
    shown.push_back(composite);
    fmt::print("{}", print_file(shown));
    return kExitOk;
  }
  fs::create_directories(a.out_dir);
  for (const auto& al : aligners)
    write_text(fs::path(a.out_dir) / (al.name + ".bspl"), print_protocol(al));
  write_text(fs::path(a.out_dir) / (composite.name + ".bspl"), print_file(all));
  return kExitOk;
}

struct ComposeArgs {
  std::string file;
  std::string input;
  std::vector<std::string> aligners;
  std::string name = std::string(kDefaultOperationalizationName);
};

int cmd_compose(const ComposeArgs& a) {
  std::vector<Protocol> all = parse_protocols(read_file(a.file));
  if (all.empty()) throw Error("no protocol declared");
  ProtocolRegistry registry(all);
  const Protocol& input = a.input.empty() ? all.front() : registry.at(a.input);
  std::vector<Protocol> aligners;
  if (registry.find(a.name))
    throw NameClash(fmt::format("{} is already declared; choose --name", a.name));
  if (a.aligners.empty()) {
    // other flat protocols; composites are not aligners
    for (const auto& p : all) {
      bool flat = std::all_of(p.references.begin(), p.references.end(),
                              [](const Reference& r) {
                                return std::holds_alternative<MessageSchema>(r);
                              });
      if (p.name != input.name && flat) aligners.push_back(p);
    }
  } else {
    for (const auto& n : a.aligners) aligners.push_back(registry.at(n));
  }
  Protocol composite = compose_operationalization(input, aligners, a.name);
  registry.add(composite);
  uod(composite, registry);  // resolve every reference before printing
  all.push_back(composite);
  fmt::print("{}", print_file(all));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::optional<std::uint32_t> seed;
  std::optional<long> horizon;
  std::string delivery;
  std::string policy;
  std::string trace_out;
  bool json = false;
};

void print_lifecycle(const std::string& role, const LifecycleState& s) {
  std::vector<std::string> parts;
  for (auto k : kLifecycleKinds) {
    std::vector<std::string> keys;
    for (const auto& b : s[static_cast<std::size_t>(k)])
      keys.push_back(print_bindings(b));
    parts.push_back(fmt::format("{}[{}]", to_string(k), fmt::join(keys, " ")));
  }
  fmt::print("    {}: {}\n", role, fmt::join(parts, " "));
}

int cmd_simulate(const SimulateArgs& a) {
  Scenario s = load_scenario(a.scenario);
  if (a.seed) s.seed = *a.seed;
  if (a.horizon) s.horizon = *a.horizon;
  if (!a.delivery.empty()) {
    auto d = parse_delivery(a.delivery);
    if (!d) throw Error(fmt::format("unknown delivery '{}'", a.delivery));
    s.delivery = *d;
  }
  if (!a.policy.empty()) {
    auto p = parse_policy(a.policy);
    if (!p) throw Error(fmt::format("unknown policy '{}'", a.policy));
    s.policy = *p;
  }
  SimulationResult r = simulate(s);
  if (!a.trace_out.empty()) write_text(a.trace_out, trace_to_jsonl(r.trace));

  if (a.json) {
    if (a.trace_out.empty()) fmt::print("{}", trace_to_jsonl(r.trace));
    for (const auto& t : r.reports) fmt::print("{}\n", tick_report_to_json(t));
    return kExitOk;
  }
  std::size_t next = 0;
  for (const auto& t : r.reports) {
    for (; next < r.trace.size() && r.trace[next].tick <= t.tick; ++next)
      fmt::print("  {}\n", print_step(r.trace[next]));
    fmt::print("tick {}: {}\n", t.tick, t.aligned() ? "aligned" : "misaligned");
    for (const auto& c : t.commitments) {
      fmt::print("  {} ({} to {}): {}\n", c.name, c.debtor, c.creditor,
                 c.alignment.aligned ? "aligned" : "misaligned");
      print_lifecycle(c.debtor, c.debtor_view);
      print_lifecycle(c.creditor, c.creditor_view);
      for (const auto& m : c.alignment.issues)
        fmt::print("    ! {}\n", print_misalignment(m));
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> files;
  bool safety = false;
  bool liveness = false;
  bool theorem1 = false;
  bool theorem2 = false;
  bool embedding = false;
  std::string input;
  std::string principal;
  std::vector<std::string> only;
  int bound_keys = 1;
  std::string delivery = "any";
  long max_ticks = Bound{}.max_ticks;
  std::size_t max_states = Bound{}.max_states;
  std::size_t lax_states = 50'000;
  bool json = false;
};

class Verdicts {
 public:
  explicit Verdicts(bool json) : json_(json) {}

  void add(const VerificationReport& r, std::string_view label = {},
           bool counts = true) {
    if (counts) tally(r.verdict);
    if (json_) {
      auto j = nlohmann::json::parse(report_to_json(r));
      if (!label.empty()) j["label"] = std::string(label);
      out_.push_back(std::move(j));
      return;
    }
    fmt::print("{} {}{}: {} ({} states)\n", to_string(r.property), r.subject,
               label.empty() ? "" : fmt::format(" [{}]", label),
               to_string(r.verdict), r.states_explored);
    if (!r.detail.empty()) fmt::print("  {}\n", r.detail);
    if (!r.witness.empty()) {
      fmt::print("  witness:\n");
      for (const auto& s : r.witness) fmt::print("    {}\n", print_step(s));
    }
    if (!r.extension.empty()) {
      fmt::print("  aligning extension:\n");
      for (const auto& s : r.extension) fmt::print("    {}\n", print_step(s));
    }
  }

  // Verdict of an implication whose premise may fail vacuously.
  void add_implication(std::string_view what, const VerificationReport& in,
                       const VerificationReport& out, Verdict v) {
    add(in, fmt::format("{} premise", what), false);
    add(out, fmt::format("{} conclusion", what), false);
    tally(v);
    if (!json_) fmt::print("{} preserved: {}\n", what, to_string(v));
  }

  void note(std::string_view key, std::string_view value) {
    if (json_) {
      out_.push_back({{"note", std::string(key)}, {"value", std::string(value)}});
    } else {
      fmt::print("{}: {}\n", key, value);
    }
  }

  int finish() const {
    if (json_) fmt::print("{}\n", out_.dump(2));
    if (failed_) return kExitCounterexample;
    if (inconclusive_) return kExitBoundExceeded;
    return kExitOk;
  }

 private:
  void tally(Verdict v) {
    failed_ = failed_ || v == Verdict::kFails;
    inconclusive_ = inconclusive_ || v == Verdict::kInconclusive;
  }

  bool json_;
  bool failed_ = false;
  bool inconclusive_ = false;
  nlohmann::json out_ = nlohmann::json::array();
};

// The protocol named by --input, else the first reference of the principal.
Subject input_subject(const Workspace& w, const std::string& name) {
  if (!name.empty()) return Subject::of(w.registry.at(name), w.registry);
  for (const auto& ref : w.principal.references)
    if (const auto* r = std::get_if<ProtocolReference>(&ref))
      return Subject::of(w.registry.at(r->name), w.registry);
  throw Error("no input protocol: pass --input");
}

int cmd_verify(const VerifyArgs& a) {
  std::vector<fs::path> protocols, commitments;
  split_inputs(a.files, protocols, commitments);
  if (protocols.size() != 1)
    throw Error("verify takes exactly one protocol file");
  Workspace w = load_workspace(
      protocols.front(), commitments,
      a.principal.empty() ? std::nullopt : std::optional(a.principal));

  Bound bound;
  bound.key_values = a.bound_keys;
  bound.max_ticks = a.max_ticks;
  bound.max_states = a.max_states;
  auto d = parse_delivery(a.delivery);
  if (!d) throw Error(fmt::format("unknown delivery '{}'", a.delivery));
  bound.delivery = *d;

  Subject subject = Subject::of(w.principal, w.registry);
  Verdicts out(a.json);
  bool any = a.safety || a.liveness || a.theorem1 || a.theorem2 || a.embedding;
  if (a.safety || !any) out.add(check_safety(subject, bound));
  if (a.liveness || !any) out.add(check_liveness(subject, bound));
  if (a.theorem1) {
    Theorem1Report t = check_theorem1(input_subject(w, a.input), subject, bound);
    out.add_implication("safety", t.input_safety, t.composed_safety,
                        t.safety_preserved());
    out.add_implication("liveness", t.input_liveness, t.composed_liveness,
                       t.liveness_preserved());
  }
  if (a.embedding)
    out.add(check_embedding(input_subject(w, a.input), subject, bound));
  if (a.theorem2) {
    auto cs = selected(w, a.only);
    if (cs.empty()) throw Error("--theorem2 needs at least one commitment");
    for (const auto& r : check_alignment_reachability(subject, cs, bound))
      out.add(r, "punctual forwarding");
    // Without the punctual restriction the verdict is reported but does not
    // affect the exit code.
    Bound lax = bound;
    lax.punctual = false;
    lax.max_states = std::min(bound.max_states, a.lax_states);
    for (const auto& r : check_alignment_reachability(subject, cs, lax))
      out.add(r, "any lapse order", false);
  }
  return out.finish();
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Commitment alignment protocol synthesis and checking"};
  app.require_subcommand(1);

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse and check .bspl/.cupid files");
  parse->add_option("files", parse_args.files)->required()->check(CLI::ExistingFile);

  ParseArgs print_args;
  auto* print = app.add_subcommand("print", "Print files in canonical form");
  print->add_option("files", print_args.files)->required()->check(CLI::ExistingFile);

  SynthesizeArgs syn;
  auto* synthesize = app.add_subcommand(
      "synthesize", "Synthesize alignment and operationalization protocols");
  synthesize->add_option("files", syn.files, "One .bspl file and .cupid files")
      ->required()
      ->check(CLI::ExistingFile);
  synthesize->add_option("--mode", syn.mode, "literal or complete")
      ->check(CLI::IsMember({"literal", "complete"}));
  synthesize->add_option("--commitment", syn.only, "Only these commitments");
  synthesize->add_option("--principal", syn.principal,
                         "Input protocol (default: last in file)");
  synthesize->add_option("--out-dir", syn.out_dir,
                         "Write <Name>Al.bspl files and the composite here");
  synthesize->add_option("--name", syn.name, "Composite protocol name");

  ComposeArgs comp;
  auto* compose = app.add_subcommand(
      "compose", "Compose an input protocol with alignment protocols");
  compose->add_option("file", comp.file)->required()->check(CLI::ExistingFile);
  compose->add_option("--input", comp.input, "Input protocol (default: first)");
  compose->add_option("--aligner", comp.aligners,
                      "Alignment protocols (default: all others)");
  compose->add_option("--name", comp.name, "Composite protocol name");

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a scenario");
  simulate_cmd->add_option("scenario", sim.scenario)
      ->required()
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--seed", sim.seed);
  simulate_cmd->add_option("--horizon", sim.horizon);
  simulate_cmd->add_option("--delivery", sim.delivery)
      ->check(CLI::IsMember({"fifo", "any"}));
  simulate_cmd->add_option("--policy", sim.policy)
      ->check(CLI::IsMember({"scripted", "random", "aligner"}));
  simulate_cmd->add_option("--trace", sim.trace_out, "Write the trace as JSON lines");
  simulate_cmd->add_flag("--json", sim.json, "JSON lines output");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Bounded verification");
  verify->add_option("files", ver.files, "One .bspl file and .cupid files")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_flag("--safety", ver.safety);
  verify->add_flag("--liveness", ver.liveness);
  verify->add_flag("--theorem1", ver.theorem1,
                   "Safety and liveness carry over from the input protocol");
  verify->add_flag("--theorem2", ver.theorem2,
                   "Every reachable state has an aligning extension");
  verify->add_flag("--embedding", ver.embedding,
                   "Input enactments embed into the composite");
  verify->add_option("--input", ver.input,
                     "Input protocol (default: first reference of the principal)");
  verify->add_option("--principal", ver.principal,
                     "Protocol to check (default: last in file)");
  verify->add_option("--commitment", ver.only, "Only these commitments");
  verify->add_option("--bound-keys", ver.bound_keys)->check(CLI::PositiveNumber);
  verify->add_option("--delivery", ver.delivery)
      ->check(CLI::IsMember({"fifo", "any"}));
  verify->add_option("--max-ticks", ver.max_ticks);
  verify->add_option("--max-states", ver.max_states);
  verify->add_option("--lax-states", ver.lax_states,
                     "State budget for the run without punctual forwarding");
  verify->add_flag("--json", ver.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*parse) return cmd_parse(parse_args);
    if (*print) return cmd_print(print_args);
    if (*synthesize) return cmd_synthesize(syn);
    if (*compose) return cmd_compose(comp);
    if (*simulate_cmd) return cmd_simulate(sim);
    if (*verify) return cmd_verify(ver);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return kExitError;
}
