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

#include "tosca/verify.hh"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "json.hpp"
#include "tosca/error.hh"

namespace tosca {

std::string_view to_string(TraceStep::Kind k) {
  switch (k) {
    case TraceStep::Kind::kEmit: return "emit";
    case TraceStep::Kind::kReceive: return "recv";
    case TraceStep::Kind::kLapse: return "lapse";
  }
  return "?";
}

std::string_view to_string(Property p) {
  switch (p) {
    case Property::kSafety: return "safety";
    case Property::kLiveness: return "liveness";
    case Property::kEmbedding: return "embedding";
    case Property::kAlignmentReachability: return "alignment-reachability";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "holds";
    case Verdict::kFails: return "fails";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto x : k) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) +
           (h >> 2);
    }
    return h;
  }
};

// An observation packed as instance * 2 + (1 if received).
struct Obs {
  int code;
  long tick;
};

int instance_of(const Obs& o) { return o.code / 2; }
bool received(const Obs& o) { return o.code % 2 == 1; }

void collect_refs(const EventExpr& e, std::vector<TimeRef>& out);

void collect_ref(const TimeRef& t, std::vector<TimeRef>& out) {
  if (t.kind == TimeRef::Kind::kAbsolute && t.is_infinite()) return;
  if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  if (t.kind == TimeRef::Kind::kEventPlus) collect_refs(t.base_event, out);
}

void collect_refs(const EventExpr& e, std::vector<TimeRef>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LifecycleEvent>) {
          collect_refs(n.commitment->create, out);
          collect_refs(n.commitment->detach, out);
          collect_refs(n.commitment->discharge, out);
        } else if constexpr (std::is_same_v<T, WindowEvent>) {
          collect_refs(n.inner, out);
          collect_ref(n.from, out);
          collect_ref(n.to, out);
        } else if constexpr (std::is_same_v<T, BinaryEvent>) {
          collect_refs(n.lhs, out);
          collect_refs(n.rhs, out);
        }
      },
      e.node().value);
}

}  // namespace

struct StateGraph::Impl {
  struct State {
    std::vector<std::vector<Obs>> roles;
    long now = 0;
    int parent = -1;
    Move move;
  };

  Uod uod;
  ForwardingRegistry fwd;
  Options opt;
  ValuePool pool;
  bool timed = false;

  std::vector<std::string> roles;
  std::map<std::string, int, std::less<>> role_index;
  std::vector<MessageInstance> instances;
  std::map<MessageInstance, int> instance_ids;
  std::vector<int> sender_of;
  std::vector<int> receiver_of;
  std::vector<bool> forward_of;
  // Whether the tick of an observation of this instance can affect a
  // commitment's lifecycle, per role.
  std::vector<std::vector<bool>> tick_matters;
  std::set<std::string> timed_bases;

  std::vector<State> states;
  std::vector<std::vector<Edge>> edges;
  std::unordered_map<Key, int, KeyHash> index;
  std::unordered_map<Key, std::vector<int>, KeyHash> enabled_memo;
  std::unordered_map<Key, std::optional<long>, KeyHash> boundary_memo;
  std::vector<TimeRef> deadline_refs;
  std::vector<int> clock_roles;
  bool truncated = false;
  bool explored = false;

  Impl(const Uod& u, const ForwardingRegistry& f, Options o)
      : uod(u), fwd(f), opt(std::move(o)), pool(opt.bound.pool()) {
    timed = !opt.timed.empty();
    roles = uod.roles;
    for (std::size_t i = 0; i < roles.size(); ++i)
      role_index.emplace(roles[i], static_cast<int>(i));
    for (const auto& c : opt.timed) {
      collect_refs(c.create, deadline_refs);
      collect_refs(c.detach, deadline_refs);
      collect_refs(c.discharge, deadline_refs);
      for (const auto* e : {&c.create, &c.detach, &c.discharge})
        for (auto& b : base_names(*e)) timed_bases.insert(std::move(b));
      for (const auto* r : {&c.debtor, &c.creditor}) {
        int idx = role_index.at(*r);
        if (std::find(clock_roles.begin(), clock_roles.end(), idx) ==
            clock_roles.end())
          clock_roles.push_back(idx);
      }
    }
    std::sort(clock_roles.begin(), clock_roles.end());
  }

  int intern(const MessageInstance& m) {
    auto [it, inserted] =
        instance_ids.emplace(m, static_cast<int>(instances.size()));
    if (inserted) {
      instances.push_back(m);
      sender_of.push_back(role_index.at(m.sender));
      receiver_of.push_back(role_index.at(m.receiver));
      const ForwardingName* f = fwd.find(m.schema);
      forward_of.push_back(f != nullptr);
      const bool timed_schema =
          timed_bases.count(f ? f->base_message : m.schema) > 0;
      std::vector<bool> per_role(roles.size(), false);
      for (int r : clock_roles) per_role[r] = timed_schema;
      tick_matters.push_back(std::move(per_role));
    }
    return it->second;
  }

  History history(const State& s, int r) const {
    History h{roles[r], {}};
    for (const auto& o : s.roles[r])
      h.events.push_back(Observation{
          instances[instance_of(o)],
          received(o) ? Direction::kReceive : Direction::kEmit, o.tick});
    return h;
  }

  Key knowledge_key(const State& s, int r, bool with_ticks) const {
    Key k;
    k.push_back(r);
    std::vector<std::pair<int, long>> obs;
    for (const auto& o : s.roles[r])
      obs.emplace_back(o.code, with_ticks && tick_matters[instance_of(o)][r]
                                   ? o.tick
                                   : 0);
    std::sort(obs.begin(), obs.end());
    for (const auto& [c, t] : obs) {
      k.push_back(c);
      if (with_ticks) k.push_back(t);
    }
    return k;
  }

  const std::vector<int>& enabled(const State& s, int r) {
    Key k = knowledge_key(s, r, false);
    auto it = enabled_memo.find(k);
    if (it != enabled_memo.end()) return it->second;
    History h = history(s, r);
    std::vector<int> ids;
    for (const auto& m : enabled_emissions(h, uod, pool)) ids.push_back(intern(m));
    return enabled_memo.emplace(std::move(k), std::move(ids)).first->second;
  }

  Key state_key(const State& s) const {
    Key k;
    for (std::size_t r = 0; r < s.roles.size(); ++r) {
      if (opt.identity == StateIdentity::kOrdered) {
        for (const auto& o : s.roles[r]) {
          k.push_back(o.code);
          k.push_back(tick_matters[instance_of(o)][r] ? o.tick : 0);
        }
      } else {
        Key rk = knowledge_key(s, static_cast<int>(r), true);
        k.insert(k.end(), rk.begin() + 1, rk.end());
      }
      k.push_back(-1);
    }
    k.push_back(s.now);
    return k;
  }

  // In-flight instances, as (receiver, instance) in sender emission order.
  std::vector<std::pair<int, int>> in_flight(const State& s) const {
    std::vector<std::set<int>> got(roles.size());
    for (std::size_t r = 0; r < roles.size(); ++r)
      for (const auto& o : s.roles[r])
        if (received(o)) got[r].insert(instance_of(o));
    std::vector<std::pair<int, int>> out;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      std::set<int> blocked;
      for (const auto& o : s.roles[r]) {
        if (received(o)) continue;
        int id = instance_of(o);
        int q = receiver_of[id];
        if (got[q].count(id)) continue;
        if (opt.bound.delivery == Delivery::kFifo && !blocked.insert(q).second)
          continue;
        out.emplace_back(q, id);
      }
    }
    return out;
  }

  bool pending_forwarding(const State& s) {
    if (!in_flight(s).empty()) return true;
    for (std::size_t r = 0; r < roles.size(); ++r)
      for (int id : enabled(s, static_cast<int>(r)))
        if (forward_of[id]) return true;
    return false;
  }

  std::optional<long> next_boundary(const State& s) {
    std::optional<long> best;
    for (int r : clock_roles) {
      Key k = knowledge_key(s, r, true);
      k.push_back(s.now);
      auto it = boundary_memo.find(k);
      if (it == boundary_memo.end()) {
        Model model = project_model(history(s, r), fwd);
        std::optional<long> local;
        auto consider = [&](long t) {
          if (t > s.now && (!local || t < *local)) local = t;
        };
        for (const auto& ref : deadline_refs) {
          if (ref.kind == TimeRef::Kind::kAbsolute) {
            consider(ref.instant);
          } else {
            for (const auto& i : eval(ref.base_event, model, s.now))
              consider(i.timestamp + ref.offset);
          }
        }
        it = boundary_memo.emplace(std::move(k), local).first;
      }
      if (it->second && (!best || *it->second < *best)) best = it->second;
    }
    return best;
  }

  std::vector<Move> successors(const State& s) {
    std::vector<Move> out;
    long tick = timed ? s.now : 0;
    for (std::size_t r = 0; r < roles.size(); ++r)
      for (int id : enabled(s, static_cast<int>(r)))
        out.push_back(Move{TraceStep::Kind::kEmit, static_cast<int>(r), id,
                           tick});
    for (const auto& [q, id] : in_flight(s))
      out.push_back(Move{TraceStep::Kind::kReceive, q, id, tick});
    if (timed) {
      if (auto b = next_boundary(s)) {
        if (*b > opt.bound.max_ticks) {
          truncated = true;
        } else if (!opt.bound.punctual || !pending_forwarding(s)) {
          out.push_back(Move{TraceStep::Kind::kLapse, -1, -1, *b});
        }
      }
    }
    return out;
  }

  State apply(const State& s, const Move& m) const {
    State t;
    t.roles = s.roles;
    t.now = s.now;
    switch (m.kind) {
      case TraceStep::Kind::kEmit:
        t.roles[m.role].push_back(Obs{m.instance * 2, m.tick});
        break;
      case TraceStep::Kind::kReceive:
        t.roles[m.role].push_back(Obs{m.instance * 2 + 1, m.tick});
        break;
      case TraceStep::Kind::kLapse:
        t.now = m.tick;
        break;
    }
    return t;
  }

  std::vector<Move> random_walk(std::uint32_t seed, std::size_t max_steps,
                                State& at) {
    std::mt19937 rng(seed);
    std::vector<Move> path;
    while (path.size() < max_steps) {
      std::vector<Move> moves = successors(at);
      if (moves.empty()) break;
      const Move m = moves[rng() % moves.size()];
      at = apply(at, m);
      path.push_back(m);
    }
    return path;
  }

  State start_state() {
    State init;
    init.roles.resize(roles.size());
    if (opt.start) {
      for (const auto& h : opt.start->histories) {
        const int r = role_index.at(h.role);
        for (const auto& o : h.events)
          init.roles[r].push_back(
              Obs{intern(o.instance) * 2 +
                      (o.direction == Direction::kReceive ? 1 : 0),
                  o.tick});
      }
      init.now = timed ? opt.start->clock : 0;
    }
    return init;
  }

  HistoryVector to_vector(const State& s) const {
    HistoryVector v;
    v.clock = s.now;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      v.histories.push_back(history(s, static_cast<int>(r)));
      for (const auto& o : v.histories.back().events)
        v.clock = std::max(v.clock, o.tick);
    }
    return v;
  }

  void explore() {
    if (explored) return;
    explored = true;
    State init = start_state();
    index.emplace(state_key(init), 0);
    states.push_back(std::move(init));
    for (std::size_t i = 0; i < states.size(); ++i) {
      edges.emplace_back();
      std::vector<Move> moves = successors(states[i]);
      for (const auto& m : moves) {
        State t = apply(states[i], m);
        Key k = state_key(t);
        auto it = index.find(k);
        int target;
        if (it != index.end()) {
          target = it->second;
        } else {
          if (states.size() >= opt.bound.max_states) {
            truncated = true;
            continue;
          }
          target = static_cast<int>(states.size());
          t.parent = static_cast<int>(i);
          t.move = m;
          index.emplace(std::move(k), target);
          states.push_back(std::move(t));
        }
        edges[i].push_back(Edge{target, m});
      }
    }
  }
};

StateGraph::StateGraph(const Uod& u, const ForwardingRegistry& fwd,
                       Options options)
    : impl_(std::make_unique<Impl>(u, fwd, std::move(options))) {}
StateGraph::~StateGraph() = default;
StateGraph::StateGraph(StateGraph&&) noexcept = default;
StateGraph& StateGraph::operator=(StateGraph&&) noexcept = default;

bool StateGraph::explore() {
  impl_->explore();
  return complete();
}

bool StateGraph::complete() const {
  return impl_->explored && !impl_->truncated;
}

std::size_t StateGraph::size() const { return impl_->states.size(); }

const std::vector<StateGraph::Edge>& StateGraph::edges(int state) const {
  return impl_->edges.at(state);
}

int StateGraph::parent(int state) const { return impl_->states.at(state).parent; }

HistoryVector StateGraph::vector(int state) const {
  return impl_->to_vector(impl_->states.at(state));
}

std::vector<TraceStep> StateGraph::random_walk(std::uint32_t seed,
                                               std::size_t max_steps,
                                               HistoryVector& end) {
  Impl::State at = impl_->start_state();
  std::vector<TraceStep> out;
  for (const auto& m : impl_->random_walk(seed, max_steps, at))
    out.push_back(step(m));
  end = impl_->to_vector(at);
  return out;
}

History StateGraph::history(int state, int role) const {
  return impl_->history(impl_->states.at(state), role);
}

long StateGraph::now(int state) const { return impl_->states.at(state).now; }

const std::vector<std::string>& StateGraph::roles() const {
  return impl_->roles;
}

const MessageInstance& StateGraph::instance(int id) const {
  return impl_->instances.at(id);
}

TraceStep StateGraph::step(const Move& m) const {
  TraceStep t;
  t.kind = m.kind;
  t.tick = m.tick;
  if (m.kind != TraceStep::Kind::kLapse) {
    t.role = impl_->roles.at(m.role);
    t.instance = impl_->instances.at(m.instance);
  }
  return t;
}

bool StateGraph::has_pending_forwarding(int state) const {
  return impl_->pending_forwarding(impl_->states.at(state));
}

std::vector<TraceStep> StateGraph::path_to(int state) const {
  std::vector<TraceStep> out;
  for (int s = state; impl_->states.at(s).parent >= 0;
       s = impl_->states[s].parent)
    out.push_back(step(impl_->states[s].move));
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<bool> StateGraph::can_reach(const std::vector<bool>& targets) const {
  const std::size_t n = size();
  std::vector<std::vector<int>> reverse(n);
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& e : impl_->edges[s]) reverse[e.target].push_back(static_cast<int>(s));
  std::vector<bool> reach(n, false);
  std::deque<int> work;
  for (std::size_t s = 0; s < n; ++s) {
    if (targets[s]) {
      reach[s] = true;
      work.push_back(static_cast<int>(s));
    }
  }
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    for (int p : reverse[s]) {
      if (!reach[p]) {
        reach[p] = true;
        work.push_back(p);
      }
    }
  }
  return reach;
}

std::optional<std::vector<TraceStep>> StateGraph::shortest_path(
    int from, const std::vector<bool>& targets) const {
  const std::size_t n = size();
  std::vector<int> prev(n, -2);
  std::vector<Move> via(n);
  std::deque<int> work{from};
  prev[from] = -1;
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    if (targets[s]) {
      std::vector<TraceStep> out;
      for (int x = s; prev[x] >= 0; x = prev[x]) out.push_back(step(via[x]));
      std::reverse(out.begin(), out.end());
      return out;
    }
    for (const auto& e : impl_->edges[s]) {
      if (prev[e.target] != -2) continue;
      prev[e.target] = s;
      via[e.target] = e.move;
      work.push_back(e.target);
    }
  }
  return std::nullopt;
}

const Uod& StateGraph::uod() const { return impl_->uod; }

const ForwardingRegistry& StateGraph::forwards() const { return impl_->fwd; }

Subject Subject::of(const Protocol& p, const ProtocolRegistry& registry) {
  Subject s;
  s.protocol = p;
  s.uod = tosca::uod(p, registry);
  s.forwards = ForwardingRegistry::from_uod(s.uod);
  return s;
}

namespace {

StateGraph untimed_graph(const Subject& s, const Bound& bound,
                         StateIdentity identity = StateIdentity::kKnowledge) {
  StateGraph::Options o;
  o.bound = bound;
  o.identity = identity;
  StateGraph g(s.uod, s.forwards, std::move(o));
  g.explore();
  return g;
}

VerificationReport make_report(Property p, const Subject& s,
                               const StateGraph& g) {
  VerificationReport r;
  r.property = p;
  r.subject = s.protocol.name;
  r.states_explored = g.size();
  return r;
}

std::string truncation_note(const StateGraph& g, const Bound& bound) {
  return fmt::format(
      "bound exceeded after {} states (max_states {}, max_ticks {})", g.size(),
      bound.max_states, bound.max_ticks);
}

}  // namespace

VerificationReport check_safety(const Subject& s, const Bound& bound) {
  StateGraph g = untimed_graph(s, bound);
  VerificationReport r = make_report(Property::kSafety, s, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (auto v = check_key_integrity(g.vector(static_cast<int>(i)))) {
      r.verdict = Verdict::kFails;
      r.detail = v->message;
      r.witness = g.path_to(static_cast<int>(i));
      return r;
    }
  }
  if (!g.complete()) {
    r.verdict = Verdict::kInconclusive;
    r.detail = truncation_note(g, bound);
    return r;
  }
  r.detail = fmt::format("no key-integrity violation in {} states", g.size());
  return r;
}

namespace {

bool is_complete_state(const HistoryVector& v,
                       const std::vector<std::string>& out_params) {
  std::vector<const MessageInstance*> emitted;
  std::set<Bindings> initiated;
  for (const auto& h : v.histories)
    for (const auto& o : h.events)
      if (o.direction == Direction::kEmit) {
        emitted.push_back(&o.instance);
        initiated.insert(o.instance.key_binding);
      }
  if (initiated.empty()) return out_params.empty();
  for (const auto& kb : initiated) {
    for (const auto& p : out_params) {
      bool bound = std::any_of(
          emitted.begin(), emitted.end(), [&](const MessageInstance* m) {
            return m->bindings.count(p) && compatible(m->key_binding, kb);
          });
      if (!bound) return false;
    }
  }
  return true;
}

}  // namespace

VerificationReport check_liveness(const Subject& s, const Bound& bound) {
  StateGraph g = untimed_graph(s, bound);
  VerificationReport r = make_report(Property::kLiveness, s, g);
  std::vector<std::string> outs;
  for (const auto& p : s.protocol.public_params)
    if (p.adornment == Adornment::kOut) outs.push_back(p.name);
  std::vector<bool> done(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    done[i] = is_complete_state(g.vector(static_cast<int>(i)), outs);
  auto reach = g.can_reach(done);
  // Prefer a dead end as the witness; it shows how far an enactment gets.
  std::optional<int> stuck;
  for (std::size_t i = 0; i < g.size() && g.complete(); ++i) {
    if (reach[i]) continue;
    if (!stuck) stuck = static_cast<int>(i);
    if (g.edges(static_cast<int>(i)).empty()) {
      stuck = static_cast<int>(i);
      break;
    }
  }
  if (stuck) {
    r.verdict = Verdict::kFails;
    r.detail = "a reachable state cannot progress to completion";
    r.witness = g.path_to(*stuck);
    return r;
  }
  if (!g.complete()) {
    r.verdict = Verdict::kInconclusive;
    r.detail = truncation_note(g, bound);
    return r;
  }
  r.detail = fmt::format("all {} states can reach completion", g.size());
  return r;
}

namespace {

Verdict implication(const VerificationReport& premise,
                    const VerificationReport& conclusion) {
  if (premise.verdict == Verdict::kFails) return Verdict::kHolds;
  if (conclusion.verdict == Verdict::kHolds) return Verdict::kHolds;
  if (premise.verdict == Verdict::kInconclusive ||
      conclusion.verdict == Verdict::kInconclusive)
    return Verdict::kInconclusive;
  return Verdict::kFails;
}

}  // namespace

Verdict Theorem1Report::safety_preserved() const {
  return implication(input_safety, composed_safety);
}

Verdict Theorem1Report::liveness_preserved() const {
  return implication(input_liveness, composed_liveness);
}

bool Theorem1Report::holds() const {
  return safety_preserved() == Verdict::kHolds &&
         liveness_preserved() == Verdict::kHolds;
}

Theorem1Report check_theorem1(const Subject& input, const Subject& composed,
                              const Bound& bound) {
  return Theorem1Report{check_safety(input, bound),
                        check_safety(composed, bound),
                        check_liveness(input, bound),
                        check_liveness(composed, bound)};
}

VerificationReport check_embedding(const Subject& input,
                                   const Subject& composed,
                                   const Bound& bound) {
  StateGraph in = untimed_graph(input, bound, StateIdentity::kOrdered);
  StateGraph out = untimed_graph(composed, bound);
  VerificationReport r = make_report(Property::kEmbedding, composed, out);
  r.states_explored += in.size();
  if (!in.complete() || !out.complete()) {
    r.verdict = Verdict::kInconclusive;
    r.detail = "bound exceeded while enumerating";
    return r;
  }

  const auto& out_roles = out.roles();
  std::set<std::string> input_schemas;
  for (const auto& sc : input.uod.schemas) input_schemas.insert(sc.name);

  std::size_t terminals = 0;
  for (std::size_t t = 0; t < in.size(); ++t) {
    if (!in.edges(static_cast<int>(t)).empty()) continue;
    ++terminals;
    // Per composed role: the input observations it must make, in order.
    std::vector<std::vector<std::pair<MessageInstance, bool>>> want(
        out_roles.size());
    HistoryVector hv = in.vector(static_cast<int>(t));
    for (std::size_t r = 0; r < out_roles.size(); ++r) {
      if (const History* h = hv.find(out_roles[r]))
        for (const auto& o : h->events)
          want[r].emplace_back(o.instance, o.direction == Direction::kReceive);
    }
    for (const auto& h : hv.histories) {
      if (h.events.empty() ||
          std::find(out_roles.begin(), out_roles.end(), h.role) != out_roles.end())
        continue;
      r.verdict = Verdict::kFails;
      r.detail = fmt::format("role {} has no counterpart in {}", h.role,
                             composed.protocol.name);
      r.witness = in.path_to(static_cast<int>(t));
      return r;
    }

    auto progress = [&](int state, std::size_t r) {
      std::size_t n = 0;
      for (const auto& o : out.history(state, static_cast<int>(r)).events)
        if (input_schemas.count(o.instance.schema)) ++n;
      return n;
    };
    auto done = [&](int state) {
      for (std::size_t r = 0; r < out_roles.size(); ++r)
        if (progress(state, r) != want[r].size()) return false;
      return true;
    };

    std::vector<bool> seen(out.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    bool found = false;
    while (!stack.empty() && !found) {
      int s = stack.back();
      stack.pop_back();
      if (done(s)) {
        found = true;
        break;
      }
      for (const auto& e : out.edges(s)) {
        if (seen[e.target]) continue;
        const MessageInstance& m = out.instance(e.move.instance);
        if (input_schemas.count(m.schema)) {
          std::size_t r = static_cast<std::size_t>(e.move.role);
          std::size_t at = progress(s, r);
          bool recv = e.move.kind == TraceStep::Kind::kReceive;
          if (at >= want[r].size() || !(want[r][at].first == m) ||
              want[r][at].second != recv)
            continue;
        }
        seen[e.target] = true;
        stack.push_back(e.target);
      }
    }
    if (!found) {
      r.verdict = Verdict::kFails;
      r.detail = "an input enactment has no order-preserving embedding";
      r.witness = in.path_to(static_cast<int>(t));
      return r;
    }
  }
  r.detail = fmt::format("{} terminal input enactments embedded", terminals);
  return r;
}

namespace {

// Misalignments of one commitment per state, memoized on the two views.
class AlignmentOracle {
 public:
  AlignmentOracle(const StateGraph& g, const CommitmentSpec& c) : g_(g), c_(c) {
    for (std::size_t i = 0; i < g.roles().size(); ++i) {
      if (g.roles()[i] == c.debtor) debtor_ = static_cast<int>(i);
      if (g.roles()[i] == c.creditor) creditor_ = static_cast<int>(i);
    }
  }

  const std::vector<Misalignment>& issues(int s) {
    History hd = g_.history(s, debtor_);
    History hc = g_.history(s, creditor_);
    std::sort(hd.events.begin(), hd.events.end());
    std::sort(hc.events.begin(), hc.events.end());
    auto key = std::make_tuple(std::move(hd.events), std::move(hc.events),
                               g_.now(s));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    auto rep = check_alignment(project_model(g_.history(s, debtor_), g_.forwards()),
                               project_model(g_.history(s, creditor_), g_.forwards()),
                               c_, g_.now(s));
    return memo_.emplace(std::move(key), std::move(rep.issues)).first->second;
  }

  std::vector<bool> aligned() {
    std::vector<bool> out(g_.size());
    for (std::size_t i = 0; i < g_.size(); ++i)
      out[i] = issues(static_cast<int>(i)).empty();
    return out;
  }

 private:
  const StateGraph& g_;
  const CommitmentSpec& c_;
  int debtor_ = -1;
  int creditor_ = -1;
  std::map<std::tuple<std::vector<Observation>, std::vector<Observation>, long>,
           std::vector<Misalignment>>
      memo_;
};

constexpr std::uint32_t kWitnessWalks = 256;
constexpr std::size_t kWitnessWalkLength = 4096;
constexpr std::size_t kWitnessBudget = 20'000;

// True if no aligned state is reachable from `start`; nullopt if its future
// does not fit in the budget.
std::optional<bool> stuck_from(const Subject& s, const CommitmentSpec& c,
                               const std::vector<CommitmentSpec>& timed,
                               Bound bound, HistoryVector start) {
  bound.max_states = kWitnessBudget;
  StateGraph::Options o;
  o.bound = bound;
  o.timed = timed;
  o.start = std::move(start);
  StateGraph local(s.uod, s.forwards, o);
  if (!local.explore()) return std::nullopt;
  AlignmentOracle oracle(local, c);
  return !local.can_reach(oracle.aligned())[0];
}

std::string describe(const std::vector<Misalignment>& issues) {
  std::vector<std::string> why;
  for (const auto& m : issues) why.push_back(print_misalignment(m));
  return fmt::format("permanent misalignment: {}", fmt::join(why, "; "));
}

}  // namespace

std::vector<VerificationReport> check_alignment_reachability(
    const Subject& composed, const std::vector<CommitmentSpec>& commitments,
    const Bound& bound) {
  for (const auto& c : commitments) bind(c, composed.uod);
  StateGraph::Options o;
  o.bound = bound;
  o.timed = commitments;
  StateGraph g(composed.uod, composed.forwards, o);
  g.explore();

  std::vector<VerificationReport> reports;
  for (const auto& c : commitments) {
    VerificationReport r = make_report(Property::kAlignmentReachability,
                                       composed, g);
    r.subject = fmt::format("{} / {}", composed.protocol.name, c.name);
    AlignmentOracle oracle(g, c);
    std::vector<bool> aligned = oracle.aligned();
    std::size_t worst = 0;
    int worst_state = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto n = oracle.issues(static_cast<int>(i)).size();
      if (n > worst) {
        worst = n;
        worst_state = static_cast<int>(i);
      }
    }
    // On a partial graph, reaching an aligned state still proves that one
    // exists; failing to does not.
    auto reach = g.can_reach(aligned);

    if (g.complete()) {
      int stuck = -1;
      for (std::size_t i = 0; i < g.size() && stuck < 0; ++i)
        if (!reach[i]) stuck = static_cast<int>(i);
      if (stuck >= 0) {
        r.verdict = Verdict::kFails;
        r.detail = describe(oracle.issues(stuck));
        r.witness = g.path_to(stuck);
      } else {
        r.verdict = Verdict::kHolds;
        r.witness = g.path_to(worst_state);
        if (auto ext = g.shortest_path(worst_state, aligned)) r.extension = *ext;
        r.detail = fmt::format(
            "every reachable state can be aligned; worst state has {} "
            "misalignments",
            worst);
      }
      reports.push_back(std::move(r));
      continue;
    }

    // Partial graph: run seeded random walks to quiescence and enumerate the
    // remaining future of each end state. An end state with no aligned
    // future is a genuine counterexample.
    std::optional<std::pair<std::vector<TraceStep>, std::vector<Misalignment>>>
        found;
    for (std::uint32_t w = 0; w < kWitnessWalks && !found; ++w) {
      HistoryVector end;
      auto path = g.random_walk(w, kWitnessWalkLength, end);
      auto issues = check_alignment(project_model(end, c.debtor, g.forwards()),
                                    project_model(end, c.creditor, g.forwards()),
                                    c, end.clock)
                        .issues;
      if (issues.empty()) continue;
      auto verdict = stuck_from(composed, c, commitments, bound, end);
      if (verdict && *verdict) found.emplace(std::move(path), std::move(issues));
    }
    if (found) {
      r.verdict = Verdict::kFails;
      r.detail = describe(found->second);
      r.witness = std::move(found->first);
    } else {
      r.verdict = Verdict::kInconclusive;
      r.detail = truncation_note(g, bound) + "; no permanent misalignment found";
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

namespace {

nlohmann::json step_json(const TraceStep& s) {
  nlohmann::json j;
  j["tick"] = s.tick;
  if (s.kind == TraceStep::Kind::kLapse) {
    j["dir"] = "lapse";
    return j;
  }
  j["role"] = s.role;
  j["dir"] = std::string(to_string(s.kind));
  j["schema"] = s.instance.schema;
  j["bindings"] = s.instance.bindings;
  return j;
}

nlohmann::json trace_json(const std::vector<TraceStep>& steps) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& s : steps) a.push_back(step_json(s));
  return a;
}

}  // namespace

std::string trace_to_jsonl(const std::vector<TraceStep>& steps) {
  std::string out;
  for (const auto& s : steps) out += step_json(s).dump() + "\n";
  return out;
}

std::string report_to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["property"] = std::string(to_string(r.property));
  j["verdict"] = std::string(to_string(r.verdict));
  j["holds"] = r.holds();
  j["subject"] = r.subject;
  j["detail"] = r.detail;
  j["states_explored"] = r.states_explored;
  j["witness"] = trace_json(r.witness);
  if (r.property == Property::kAlignmentReachability)
    j["extension"] = trace_json(r.extension);
  return j.dump(2);
}

}  // namespace tosca
