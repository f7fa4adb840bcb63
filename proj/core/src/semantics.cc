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

#include <algorithm>
#include <map>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace tosca {

namespace {

void normalize(std::vector<EventInstance>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::optional<long> earliest(std::optional<long> a, std::optional<long> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

// Earliest instant of a compatible instance, if any.
std::optional<long> first_compatible(const std::vector<EventInstance>& xs,
                                     const Bindings& key) {
  std::optional<long> best;
  for (const auto& x : xs)
    if (compatible(x.key_binding, key)) best = earliest(best, x.timestamp);
  return best;
}

// Bound of a window for `key`; nullopt when an event-relative bound has not
// happened yet.
std::optional<long> resolve(const TimeRef& t,
                            const std::vector<EventInstance>& bound_events,
                            const Bindings& key) {
  if (t.kind == TimeRef::Kind::kAbsolute) return t.instant;
  auto at = first_compatible(bound_events, key);
  if (!at) return std::nullopt;
  return *at + t.offset;
}

Bindings merged(const Bindings& a, const Bindings& b) {
  Bindings out = a;
  out.insert(b.begin(), b.end());
  return out;
}

// Evaluates formulas against one model at one instant. Results are memoized
// per formula node, so shared subformulas and repeated settlement queries
// are computed once.
class Evaluator {
 public:
  Evaluator(const Model& model, long now) : now_(now) {
    for (const auto& entry : model.entries)
      if (entry.time <= now) by_schema_[entry.schema].push_back(&entry);
  }

  const std::vector<EventInstance>& eval(const EventExpr& e) {
    const EventNode* key = &e.node();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<EventInstance> out = compute(e);
    normalize(out);
    return memo_.emplace(key, std::move(out)).first->second;
  }

  std::optional<long> settle(const EventExpr& e, const Bindings& key) {
    return std::visit(
        [&](const auto& n) -> std::optional<long> {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, BaseEvent>) {
            return std::nullopt;
          } else if constexpr (std::is_same_v<T, LifecycleEvent>) {
            return settle(expansion(e, n), key);
          } else if constexpr (std::is_same_v<T, WindowEvent>) {
            if (first_compatible(eval(e), key)) return std::nullopt;
            std::optional<long> closed;
            if (n.to.kind == TimeRef::Kind::kAbsolute) {
              if (!n.to.is_infinite() && n.to.instant <= now_)
                closed = n.to.instant;
            } else {
              auto hi = resolve(n.to, bound_instances(n.to), key);
              if (hi) {
                if (*hi <= now_) closed = *hi;
              } else {
                closed = settle(n.to.base_event, key);
              }
            }
            if (n.from.kind == TimeRef::Kind::kEventPlus &&
                !first_compatible(bound_instances(n.from), key))
              closed = earliest(closed, settle(n.from.base_event, key));
            return earliest(closed, settle(n.inner, key));
          } else if (n.op == BinaryOp::kAnd) {
            return earliest(settle(n.lhs, key), settle(n.rhs, key));
          } else if (n.op == BinaryOp::kOr) {
            auto l = settle(n.lhs, key);
            if (!l) return std::nullopt;
            auto r = settle(n.rhs, key);
            if (!r) return std::nullopt;
            return std::max(*l, *r);
          } else {
            return earliest(settle(n.lhs, key),
                            first_compatible(eval(n.rhs), key));
          }
        },
        e.node().value);
  }

 private:
  const EventExpr& expansion(const EventExpr& e, const LifecycleEvent& n) {
    auto it = expansions_.find(&e.node());
    if (it == expansions_.end())
      it = expansions_
               .emplace(&e.node(), lifecycle_formula(n.kind, *n.commitment))
               .first;
    return it->second;
  }

  const std::vector<EventInstance>& bound_instances(const TimeRef& t) {
    static const std::vector<EventInstance> kNone;
    if (t.kind == TimeRef::Kind::kAbsolute) return kNone;
    return eval(t.base_event);
  }

  std::vector<EventInstance> compute(const EventExpr& e) {
    return std::visit(
        [&](const auto& n) -> std::vector<EventInstance> {
          using T = std::decay_t<decltype(n)>;
          std::vector<EventInstance> r;
          if constexpr (std::is_same_v<T, BaseEvent>) {
            if (auto it = by_schema_.find(n.name); it != by_schema_.end())
              for (const ModelEntry* entry : it->second)
                r.push_back({entry->key_binding, entry->bindings, entry->time});
          } else if constexpr (std::is_same_v<T, LifecycleEvent>) {
            r = eval(expansion(e, n));
          } else if constexpr (std::is_same_v<T, WindowEvent>) {
            const auto& lo_events = bound_instances(n.from);
            const auto& hi_events = bound_instances(n.to);
            for (const auto& i : eval(n.inner)) {
              auto lo = resolve(n.from, lo_events, i.key_binding);
              auto hi = resolve(n.to, hi_events, i.key_binding);
              if (!lo || !hi) continue;
              if (*lo <= i.timestamp && i.timestamp < *hi) r.push_back(i);
            }
          } else if (n.op == BinaryOp::kAnd) {
            const auto& ls = eval(n.lhs);
            const auto& rs = eval(n.rhs);
            for (const auto& l : ls)
              for (const auto& x : rs)
                if (compatible(l.key_binding, x.key_binding))
                  r.push_back({merged(l.key_binding, x.key_binding),
                               merged(l.attributes, x.attributes),
                               std::max(l.timestamp, x.timestamp)});
          } else if (n.op == BinaryOp::kOr) {
            std::map<Bindings, EventInstance> by_key;
            for (const auto* side : {&n.lhs, &n.rhs}) {
              for (const auto& i : eval(*side)) {
                auto it = by_key.find(i.key_binding);
                if (it == by_key.end()) {
                  by_key.emplace(i.key_binding, i);
                } else if (i.timestamp < it->second.timestamp) {
                  it->second = i;
                }
              }
            }
            for (auto& [_, i] : by_key) r.push_back(std::move(i));
          } else {
            const auto& ls = eval(n.lhs);
            const auto& rs = eval(n.rhs);
            for (const auto& l : ls) {
              if (first_compatible(rs, l.key_binding)) continue;
              auto settled = settle(n.rhs, l.key_binding);
              if (!settled) continue;
              r.push_back({l.key_binding, l.attributes,
                           std::max(l.timestamp, *settled)});
            }
          }
          return r;
        },
        e.node().value);
  }

  long now_;
  std::map<std::string, std::vector<const ModelEntry*>, std::less<>> by_schema_;
  std::unordered_map<const EventNode*, std::vector<EventInstance>> memo_;
  std::unordered_map<const EventNode*, EventExpr> expansions_;
};

}  // namespace

std::vector<EventInstance> eval(const EventExpr& e, const Model& model,
                                long now) {
  return Evaluator(model, now).eval(e);
}

std::optional<long> settled_false_at(const EventExpr& e, const Bindings& key,
                                     const Model& model, long now) {
  return Evaluator(model, now).settle(e, key);
}

std::vector<EventInstance> lifecycle_instances(LifecycleKind kind,
                                               const CommitmentSpec& c,
                                               const Model& model, long now) {
  return eval(lifecycle_formula(kind, c), model, now);
}

LifecycleState lifecycle_state(const CommitmentSpec& c, const Model& model,
                               long now) {
  LifecycleState s;
  // One evaluator for the five formulas, which share subformulas. The
  // formulas outlive it, since it memoizes by node address.
  std::array<EventExpr, 5> formulas;
  for (auto k : kLifecycleKinds)
    formulas[static_cast<std::size_t>(k)] = lifecycle_formula(k, c);
  Evaluator ev(model, now);
  for (auto k : kLifecycleKinds) {
    auto& keys = s[static_cast<std::size_t>(k)];
    for (const auto& i : ev.eval(formulas[static_cast<std::size_t>(k)]))
      keys.push_back(i.key_binding);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  }
  return s;
}

std::string print_misalignment(const Misalignment& m) {
  std::vector<std::string> kv;
  for (const auto& [k, v] : m.key_binding) kv.push_back(k + "=" + v);
  return fmt::format("{} [{}]: {} infers it, {} does not", to_string(m.kind),
                     fmt::join(kv, ", "), m.holder, m.lacking);
}

AlignmentReport check_alignment(const Model& debtor, const Model& creditor,
                                const CommitmentSpec& c, long now) {
  LifecycleState d = lifecycle_state(c, debtor, now);
  LifecycleState cr = lifecycle_state(c, creditor, now);
  AlignmentReport report;
  for (auto k : kLifecycleKinds) {
    bool creditor_leads = k == LifecycleKind::kCreated ||
                          k == LifecycleKind::kDetached ||
                          k == LifecycleKind::kViolated;
    const auto idx = static_cast<std::size_t>(k);
    const auto& holder = creditor_leads ? cr[idx] : d[idx];
    const auto& other = creditor_leads ? d[idx] : cr[idx];
    for (const auto& key : holder) {
      if (std::binary_search(other.begin(), other.end(), key)) continue;
      report.aligned = false;
      report.issues.push_back(Misalignment{
          k, key, creditor_leads ? c.creditor : c.debtor,
          creditor_leads ? c.debtor : c.creditor});
    }
  }
  return report;
}

AlignmentReport check_alignment(const HistoryVector& v, const CommitmentSpec& c,
                                long now, const ForwardingRegistry& fwd) {
  return check_alignment(project_model(v, c.debtor, fwd),
                         project_model(v, c.creditor, fwd), c, now);
}

}  // namespace tosca
