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

#include "tosca/simulation.hh"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "tosca/error.hh"

namespace tosca {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const CommitmentSpec& Workspace::commitment(std::string_view name) const {
  for (const auto& c : commitments)
    if (c.name == name) return c;
  throw UnknownCommitmentReference(
      fmt::format("unknown commitment '{}'", name));
}

Workspace load_workspace(const fs::path& protocol_file,
                         const std::vector<fs::path>& commitment_files,
                         const std::optional<std::string>& principal) {
  Workspace w;
  auto protocols = parse_protocols(read_file(protocol_file));
  if (protocols.empty())
    throw WellFormednessError(
        fmt::format("{}: no protocol declared", protocol_file.string()));
  for (const auto& p : protocols) w.registry.add(p);
  w.principal = principal ? w.registry.at(*principal) : protocols.back();
  // A commitment may be declared in several files if the declarations agree.
  for (const auto& f : commitment_files) {
    for (auto& c : parse_commitments(read_file(f), w.commitment_registry)) {
      auto same = std::find_if(
          w.commitments.begin(), w.commitments.end(),
          [&](const CommitmentSpec& o) { return o.name == c.name; });
      if (same == w.commitments.end()) {
        w.commitments.push_back(std::move(c));
      } else if (print_commitment(*same) != print_commitment(c)) {
        throw NameClash(fmt::format("{}: conflicting declarations of '{}'",
                                    f.string(), c.name));
      }
    }
  }
  return w;
}

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kScripted: return "scripted";
    case Policy::kRandom: return "random";
    case Policy::kAligner: return "aligner";
  }
  return "?";
}

std::optional<Policy> parse_policy(std::string_view word) {
  for (auto p : {Policy::kScripted, Policy::kRandom, Policy::kAligner})
    if (to_string(p) == word) return p;
  return std::nullopt;
}

namespace {

ScriptedMove move_from_json(const json& j) {
  ScriptedMove m;
  m.tick = j.at("tick").get<long>();
  m.role = j.at("role").get<std::string>();
  const std::string dir = j.contains("dir") ? j.at("dir").get<std::string>()
                                            : j.at("action").get<std::string>();
  if (dir == "emit" || dir == "send") {
    m.direction = Direction::kEmit;
  } else if (dir == "recv" || dir == "receive") {
    m.direction = Direction::kReceive;
  } else {
    throw Error(fmt::format("unknown move direction '{}'", dir));
  }
  m.schema = j.at("schema").get<std::string>();
  if (j.contains("bindings")) m.bindings = j.at("bindings").get<Bindings>();
  return m;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

json bindings_list(const std::vector<Bindings>& keys) {
  json a = json::array();
  for (const auto& k : keys) a.push_back(k);
  return a;
}

json lifecycle_json(const LifecycleState& s) {
  json j;
  for (auto k : kLifecycleKinds)
    j[std::string(to_string(k))] =
        bindings_list(s[static_cast<std::size_t>(k)]);
  return j;
}

bool matches(const MessageInstance& m, const ScriptedMove& move) {
  if (m.schema != move.schema) return false;
  for (const auto& [k, v] : move.bindings) {
    auto it = m.bindings.find(k);
    if (it == m.bindings.end() || it->second != v) return false;
  }
  return true;
}

}  // namespace

std::vector<ScriptedMove> parse_moves_jsonl(std::string_view text) {
  std::vector<ScriptedMove> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line);
    if (j.value("dir", "") == "lapse") continue;
    out.push_back(move_from_json(j));
  }
  return out;
}

Scenario parse_scenario(std::string_view text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(fmt::format("scenario: {}", e.what()));
  }
  Scenario s;
  s.protocol_file = resolve(base_dir, j.at("protocol").get<std::string>());
  if (j.contains("principal"))
    s.principal = j.at("principal").get<std::string>();
  for (const auto& c : j.value("commitments", json::array()))
    s.commitment_files.push_back(resolve(base_dir, c.get<std::string>()));
  s.check = j.value("check", std::vector<std::string>{});
  s.horizon = j.value("horizon", s.horizon);
  if (j.contains("delivery")) {
    auto d = parse_delivery(j.at("delivery").get<std::string>());
    if (!d) throw Error("scenario: delivery must be 'fifo' or 'any'");
    s.delivery = *d;
  }
  s.max_delay = j.value("max_delay", s.max_delay);
  s.keys = j.value("keys", s.keys);
  if (j.contains("policy")) {
    const json& p = j.at("policy");
    const std::string kind =
        p.is_string() ? p.get<std::string>() : p.at("kind").get<std::string>();
    auto policy = parse_policy(kind);
    if (!policy) throw Error(fmt::format("scenario: unknown policy '{}'", kind));
    s.policy = *policy;
    if (p.is_object()) {
      s.seed = p.value("seed", s.seed);
      for (const auto& m : p.value("moves", json::array()))
        s.moves.push_back(move_from_json(m));
      if (p.contains("trace")) {
        auto more = parse_moves_jsonl(
            read_file(resolve(base_dir, p.at("trace").get<std::string>())));
        s.moves.insert(s.moves.end(), more.begin(), more.end());
      }
    }
  }
  if (s.horizon < 0) throw Error("scenario: horizon must be non-negative");
  if (s.max_delay < 0) throw Error("scenario: max_delay must be non-negative");
  if (s.keys < 1) throw Error("scenario: keys must be positive");
  std::stable_sort(s.moves.begin(), s.moves.end(),
                   [](const auto& a, const auto& b) { return a.tick < b.tick; });
  return s;
}

Scenario load_scenario(const fs::path& path) {
  return parse_scenario(read_file(path), path.parent_path());
}

bool TickReport::aligned() const {
  return std::all_of(commitments.begin(), commitments.end(),
                     [](const auto& c) { return c.alignment.aligned; });
}

std::string tick_report_to_json(const TickReport& r) {
  json j;
  j["tick"] = r.tick;
  j["aligned"] = r.aligned();
  j["commitments"] = json::array();
  for (const auto& c : r.commitments) {
    json cj;
    cj["name"] = c.name;
    cj["aligned"] = c.alignment.aligned;
    cj["views"][c.debtor] = lifecycle_json(c.debtor_view);
    cj["views"][c.creditor] = lifecycle_json(c.creditor_view);
    cj["issues"] = json::array();
    for (const auto& m : c.alignment.issues)
      cj["issues"].push_back(print_misalignment(m));
    j["commitments"].push_back(std::move(cj));
  }
  return j.dump();
}

Simulator::Simulator(Uod u, ForwardingRegistry fwd,
                     std::vector<CommitmentSpec> tracked, ValuePool pool,
                     Delivery delivery)
    : uod_(std::move(u)),
      fwd_(std::move(fwd)),
      tracked_(std::move(tracked)),
      pool_(std::move(pool)),
      delivery_(delivery),
      vector_(HistoryVector::empty_for(uod_)) {
  for (const auto& c : tracked_) bind(c, uod_);
}

void Simulator::advance_to(long tick) {
  if (tick <= now_) return;
  now_ = tick;
  vector_.clock = std::max(vector_.clock, now_);
}

std::vector<MessageInstance> Simulator::enabled(std::string_view role) const {
  return enabled_emissions(vector_, uod_, role, pool_);
}

std::vector<MessageInstance> Simulator::deliverable() const {
  return tosca::deliverable(vector_, delivery_);
}

long Simulator::sent_at(const MessageInstance& m) const {
  for (const auto& o : vector_.at(m.sender).events)
    if (o.direction == Direction::kEmit && o.instance == m) return o.tick;
  throw InternalError(fmt::format("{} was never sent", print_instance(m)));
}

void Simulator::emit(const MessageInstance& m) {
  vector_.emit(m, now_);
  trace_.push_back(TraceStep{TraceStep::Kind::kEmit, now_, m.sender, m});
}

void Simulator::receive(const MessageInstance& m) {
  vector_.receive(m, now_);
  trace_.push_back(TraceStep{TraceStep::Kind::kReceive, now_, m.receiver, m});
}

const MessageInstance& Simulator::apply(const ScriptedMove& move) {
  advance_to(move.tick);
  if (move.direction == Direction::kEmit) {
    for (const auto& m : enabled(move.role)) {
      if (!matches(m, move)) continue;
      emit(m);
      return trace_.back().instance;
    }
    throw ScriptedMoveNotEnabled(
        fmt::format("{} cannot emit {}", move.role, move.schema), move.tick);
  }
  for (const auto& m : deliverable()) {
    if (m.receiver != move.role || !matches(m, move)) continue;
    receive(m);
    return trace_.back().instance;
  }
  throw ScriptedMoveNotEnabled(
      fmt::format("{} has no deliverable {}", move.role, move.schema),
      move.tick);
}

TickReport Simulator::report() const {
  TickReport r;
  r.tick = now_;
  for (const auto& c : tracked_) {
    Model d = project_model(vector_, c.debtor, fwd_);
    Model cr = project_model(vector_, c.creditor, fwd_);
    r.commitments.push_back(CommitmentStatus{
        c.name, c.debtor, c.creditor, lifecycle_state(c, d, now_),
        lifecycle_state(c, cr, now_), check_alignment(d, cr, c, now_)});
  }
  return r;
}

namespace {

constexpr int kMaxStepsPerTick = 256;

bool is_forward(const Simulator& sim, const MessageInstance& m) {
  return sim.forwards().find(m.schema) != nullptr;
}

// Emits and delivers every forward until none is enabled or in flight.
void forward_eagerly(Simulator& sim) {
  for (int guard = 0; guard < kMaxStepsPerTick; ++guard) {
    bool moved = false;
    for (const auto& role : sim.uod().roles) {
      for (const auto& m : sim.enabled(role)) {
        if (!is_forward(sim, m)) continue;
        sim.emit(m);
        moved = true;
        break;
      }
    }
    for (const auto& m : sim.deliverable()) {
      if (!is_forward(sim, m)) continue;
      sim.receive(m);
      moved = true;
    }
    if (!moved) return;
  }
}

void random_tick(Simulator& sim, std::mt19937& rng, long max_delay,
                 bool aligner) {
  // Overdue messages arrive first.
  bool again = true;
  while (again) {
    again = false;
    for (const auto& m : sim.deliverable()) {
      if (sim.sent_at(m) + max_delay <= sim.now()) {
        sim.receive(m);
        again = true;
        break;
      }
    }
  }
  if (aligner) forward_eagerly(sim);
  for (int step = 0; step < kMaxStepsPerTick; ++step) {
    std::vector<std::pair<bool, MessageInstance>> moves;
    for (const auto& role : sim.uod().roles)
      for (auto& m : sim.enabled(role))
        if (!aligner || !is_forward(sim, m)) moves.emplace_back(true, std::move(m));
    for (auto& m : sim.deliverable())
      if (!aligner || !is_forward(sim, m)) moves.emplace_back(false, std::move(m));
    const std::size_t pick = rng() % (moves.size() + 1);
    if (pick == moves.size()) break;
    if (moves[pick].first) {
      sim.emit(moves[pick].second);
    } else {
      sim.receive(moves[pick].second);
    }
    if (aligner) forward_eagerly(sim);
  }
}

}  // namespace

SimulationResult simulate(const Workspace& w, const Scenario& s) {
  std::vector<CommitmentSpec> tracked;
  if (s.check.empty()) {
    tracked = w.commitments;
  } else {
    for (const auto& name : s.check) tracked.push_back(w.commitment(name));
  }
  Uod u = w.uod();
  ForwardingRegistry fwd = ForwardingRegistry::from_uod(u);
  Simulator sim(std::move(u), std::move(fwd), std::move(tracked),
                ValuePool::with_keys(s.keys), s.delivery);

  SimulationResult result;
  std::mt19937 rng(s.seed);
  auto next = s.moves.begin();
  for (long t = 1; t <= s.horizon; ++t) {
    sim.advance_to(t);
    if (s.policy == Policy::kScripted) {
      for (; next != s.moves.end() && next->tick <= t; ++next) {
        if (next->tick < t)
          throw ScriptedMoveNotEnabled("move scheduled before tick 1",
                                       next->tick);
        sim.apply(*next);
      }
    } else {
      random_tick(sim, rng, s.max_delay, s.policy == Policy::kAligner);
    }
    result.reports.push_back(sim.report());
  }
  if (s.policy == Policy::kScripted && next != s.moves.end())
    throw ScriptedMoveNotEnabled("move scheduled after the horizon",
                                 next->tick);
  result.trace = sim.trace();
  result.final = sim.vector();
  return result;
}

SimulationResult simulate(const Scenario& s) {
  return simulate(
      load_workspace(s.protocol_file, s.commitment_files, s.principal), s);
}

}  // namespace tosca
