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

#include "tosca/enactment.hh"

#include <algorithm>
#include <set>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "tosca/error.hh"

namespace tosca {

bool compatible(const Bindings& a, const Bindings& b) {
  bool shared = false;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      if (i->second != j->second) return false;
      shared = true;
      ++i;
      ++j;
    }
  }
  return shared;
}

MessageInstance MessageInstance::make(const MessageSchema& s,
                                      Bindings bindings) {
  if (bindings.size() != s.params.size())
    throw WellFormednessError(fmt::format(
        "{} binds {} parameters but the schema has {}", s.name,
        bindings.size(), s.params.size()));
  MessageInstance m;
  m.schema = s.name;
  m.sender = s.sender;
  m.receiver = s.receiver;
  for (const auto& p : s.params) {
    auto it = bindings.find(p.name);
    if (it == bindings.end())
      throw WellFormednessError(
          fmt::format("{} does not bind parameter {}", s.name, p.name));
    if (p.is_key) m.key_binding.emplace(p.name, it->second);
  }
  m.bindings = std::move(bindings);
  return m;
}

namespace {

std::string print_bindings(const Bindings& b) {
  std::vector<std::string> parts;
  for (const auto& [k, v] : b) parts.push_back(fmt::format("{}={}", k, v));
  return fmt::format("{}", fmt::join(parts, ", "));
}

}  // namespace

std::string print_instance(const MessageInstance& m) {
  return fmt::format("{}[{}]", m.schema, print_bindings(m.bindings));
}

std::string_view to_string(Direction d) {
  return d == Direction::kEmit ? "emit" : "recv";
}

HistoryVector HistoryVector::empty_for(const Uod& u) {
  HistoryVector v;
  for (const auto& r : u.roles) v.histories.push_back(History{r, {}});
  return v;
}

History* HistoryVector::find(std::string_view role) {
  for (auto& h : histories)
    if (h.role == role) return &h;
  return nullptr;
}

const History* HistoryVector::find(std::string_view role) const {
  for (const auto& h : histories)
    if (h.role == role) return &h;
  return nullptr;
}

History& HistoryVector::at(std::string_view role) {
  if (auto* h = find(role)) return *h;
  throw WellFormednessError(fmt::format("no history for role {}", role));
}

const History& HistoryVector::at(std::string_view role) const {
  if (const auto* h = find(role)) return *h;
  throw WellFormednessError(fmt::format("no history for role {}", role));
}

void HistoryVector::record(const std::string& role, Observation o) {
  clock = std::max(clock, o.tick);
  at(role).events.push_back(std::move(o));
}

void HistoryVector::emit(const MessageInstance& m, long tick) {
  record(m.sender, Observation{m, Direction::kEmit, tick});
}

void HistoryVector::receive(const MessageInstance& m, long tick) {
  record(m.receiver, Observation{m, Direction::kReceive, tick});
}

HistoryVector HistoryVector::prefix(long cutoff) const {
  HistoryVector out;
  out.clock = std::min(clock, cutoff);
  for (const auto& h : histories) {
    History cut{h.role, {}};
    for (const auto& o : h.events)
      if (o.tick <= cutoff) cut.events.push_back(o);
    out.histories.push_back(std::move(cut));
  }
  return out;
}

std::string_view to_string(ViabilityRule r) {
  switch (r) {
    case ViabilityRule::kStructure: return "structure";
    case ViabilityRule::kUnsentReception: return "unsent-reception";
    case ViabilityRule::kInUnknown: return "a:in-unknown";
    case ViabilityRule::kOutBound: return "b:out-bound";
    case ViabilityRule::kKeyIntegrity: return "c:key-integrity";
    case ViabilityRule::kDuplicate: return "d:duplicate-emission";
  }
  return "?";
}

namespace {

ViabilityViolation violation(ViabilityRule rule, const std::string& role,
                             const Observation& o, std::string message) {
  return ViabilityViolation{rule, role, o.tick, o.instance, std::move(message)};
}

std::optional<ViabilityViolation> check_structure(const HistoryVector& v,
                                                  const Uod& u) {
  for (const auto& h : v.histories) {
    if (!u.has_role(h.role))
      return ViabilityViolation{ViabilityRule::kStructure, h.role, 0, {},
                                fmt::format("{} is not a role", h.role)};
    long last = 0;
    for (const auto& o : h.events) {
      const auto& m = o.instance;
      auto fail = [&](std::string msg) {
        return violation(ViabilityRule::kStructure, h.role, o, std::move(msg));
      };
      const MessageSchema* s = u.find_schema(m.schema);
      if (!s) return fail(fmt::format("unknown schema {}", m.schema));
      if (m.sender != s->sender || m.receiver != s->receiver)
        return fail(fmt::format("{} roles differ from its schema", m.schema));
      const std::string& own =
          o.direction == Direction::kEmit ? m.sender : m.receiver;
      if (own != h.role)
        return fail(fmt::format("{} of {} recorded in {}'s history",
                                to_string(o.direction), m.schema, h.role));
      try {
        if (MessageInstance::make(*s, m.bindings) != m)
          return fail(fmt::format("{} key binding is inconsistent", m.schema));
      } catch (const WellFormednessError& e) {
        return fail(e.what());
      }
      if (o.tick < last || o.tick < 0)
        return fail(fmt::format("tick {} goes backwards", o.tick));
      if (o.tick > v.clock)
        return fail(fmt::format("tick {} is past the clock {}", o.tick,
                                v.clock));
      last = o.tick;
    }
  }
  return std::nullopt;
}

std::optional<ViabilityViolation> check_receptions(const HistoryVector& v) {
  for (const auto& h : v.histories) {
    std::set<MessageInstance> seen;
    for (const auto& o : h.events) {
      if (o.direction != Direction::kReceive) continue;
      if (!seen.insert(o.instance).second)
        return violation(ViabilityRule::kStructure, h.role, o,
                         "instance received twice");
      const History* sender = v.find(o.instance.sender);
      bool sent = sender && std::any_of(
          sender->events.begin(), sender->events.end(), [&](const auto& e) {
            return e.direction == Direction::kEmit && e.tick <= o.tick &&
                   e.instance == o.instance;
          });
      if (!sent)
        return violation(ViabilityRule::kUnsentReception, h.role, o,
                         fmt::format("{} was never sent",
                                     print_instance(o.instance)));
    }
  }
  return std::nullopt;
}

std::optional<ViabilityViolation> check_emissions(const HistoryVector& v,
                                                  const Uod& u) {
  for (const auto& h : v.histories) {
    std::set<std::pair<std::string, Bindings>> emitted;
    for (std::size_t i = 0; i < h.events.size(); ++i) {
      const Observation& o = h.events[i];
      if (o.direction != Direction::kEmit) continue;
      const auto& m = o.instance;
      if (!emitted.emplace(m.schema, m.key_binding).second)
        return violation(ViabilityRule::kDuplicate, h.role, o,
                         fmt::format("{} emitted twice for {}", m.schema,
                                     print_bindings(m.key_binding)));
      const MessageSchema& s = *u.find_schema(m.schema);
      for (const auto& p : s.params) {
        const std::string& value = m.bindings.at(p.name);
        bool known = false;
        bool bound = false;
        for (std::size_t j = 0; j < i; ++j) {
          const auto& prior = h.events[j].instance;
          if (!compatible(prior.key_binding, m.key_binding)) continue;
          auto it = prior.bindings.find(p.name);
          if (it == prior.bindings.end()) continue;
          bound = true;
          if (it->second == value) known = true;
        }
        if (p.adornment == Adornment::kIn && !known)
          return violation(ViabilityRule::kInUnknown, h.role, o,
                           fmt::format("{} emitted without knowing {}={}",
                                       m.schema, p.name, value));
        if (p.adornment == Adornment::kOut && bound)
          return violation(ViabilityRule::kOutBound, h.role, o,
                           fmt::format("{} binds {} which was already known",
                                       m.schema, p.name));
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<ViabilityViolation> check_key_integrity(const HistoryVector& v) {
  std::vector<std::pair<const History*, const Observation*>> emits;
  for (const auto& h : v.histories)
    for (const auto& o : h.events)
      if (o.direction == Direction::kEmit) emits.emplace_back(&h, &o);
  for (std::size_t i = 0; i < emits.size(); ++i) {
    const auto& a = emits[i].second->instance;
    for (std::size_t j = 0; j < i; ++j) {
      const auto& b = emits[j].second->instance;
      if (!compatible(a.key_binding, b.key_binding)) continue;
      for (const auto& [param, value] : a.bindings) {
        auto it = b.bindings.find(param);
        if (it != b.bindings.end() && it->second != value)
          return violation(
              ViabilityRule::kKeyIntegrity, emits[i].first->role,
              *emits[i].second,
              fmt::format("{} binds {}={} but {} bound {}={}", a.schema, param,
                          value, b.schema, param, it->second));
      }
    }
  }
  return std::nullopt;
}

std::optional<ViabilityViolation> check_viable(const HistoryVector& v,
                                               const Uod& u) {
  if (auto r = check_structure(v, u)) return r;
  if (auto r = check_receptions(v)) return r;
  if (auto r = check_emissions(v, u)) return r;
  return check_key_integrity(v);
}

ValuePool ValuePool::with_keys(int n, int values_per_param) {
  ValuePool pool;
  pool.key_values.clear();
  for (int i = 1; i <= n; ++i) pool.key_values.push_back(std::to_string(i));
  pool.values_per_param = values_per_param;
  return pool;
}

std::string ValuePool::value(std::string_view schema, std::string_view param,
                             int j) const {
  if (j == 0) return fmt::format("{}.{}", schema, param);
  return fmt::format("{}.{}.{}", schema, param, j);
}

namespace {

// Calls `f` with every combination picking one entry from each choice list.
template <typename F>
void for_each_product(const std::vector<std::vector<std::string>>& choices,
                      F&& f) {
  std::vector<std::size_t> idx(choices.size(), 0);
  for (const auto& c : choices)
    if (c.empty()) return;
  while (true) {
    f(idx);
    std::size_t k = choices.size();
    while (k > 0) {
      --k;
      if (++idx[k] < choices[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (choices.empty()) return;
  }
}

}  // namespace

std::vector<MessageInstance> enabled_emissions(const History& h, const Uod& u,
                                               const ValuePool& pool) {
  std::vector<const MessageInstance*> known;
  std::set<std::pair<std::string, Bindings>> emitted;
  for (const auto& o : h.events) {
    known.push_back(&o.instance);
    if (o.direction == Direction::kEmit)
      emitted.emplace(o.instance.schema, o.instance.key_binding);
  }

  std::vector<MessageInstance> out;
  for (const auto& s : u.schemas) {
    if (s.sender != h.role) continue;

    std::vector<std::string> keys;
    std::vector<std::vector<std::string>> key_choices;
    for (const auto& p : s.params) {
      if (!p.is_key) continue;
      keys.push_back(p.name);
      if (p.adornment == Adornment::kOut) {
        key_choices.push_back(pool.key_values);
        continue;
      }
      std::set<std::string> seen;
      for (const auto* m : known) {
        auto it = m->bindings.find(p.name);
        if (it != m->bindings.end()) seen.insert(it->second);
      }
      key_choices.emplace_back(seen.begin(), seen.end());
    }

    for_each_product(key_choices, [&](const std::vector<std::size_t>& idx) {
      Bindings kb;
      for (std::size_t i = 0; i < keys.size(); ++i)
        kb.emplace(keys[i], key_choices[i][idx[i]]);
      if (emitted.count({s.name, kb})) return;

      Bindings fixed;
      std::vector<std::string> free_params;
      for (const auto& p : s.params) {
        std::set<std::string> values;
        for (const auto* m : known) {
          if (!compatible(m->key_binding, kb)) continue;
          auto it = m->bindings.find(p.name);
          if (it != m->bindings.end()) values.insert(it->second);
        }
        if (p.adornment == Adornment::kOut) {
          if (!values.empty()) return;
          if (p.is_key) {
            fixed.emplace(p.name, kb.at(p.name));
          } else {
            free_params.push_back(p.name);
          }
        } else {
          if (values.size() != 1) return;
          const std::string& v = *values.begin();
          if (p.is_key && v != kb.at(p.name)) return;
          fixed.emplace(p.name, v);
        }
      }

      std::vector<std::vector<std::string>> value_choices;
      for (const auto& p : free_params) {
        std::vector<std::string> vs;
        for (int j = 0; j < std::max(1, pool.values_per_param); ++j)
          vs.push_back(pool.value(s.name, p, j));
        value_choices.push_back(std::move(vs));
      }
      for_each_product(value_choices, [&](const std::vector<std::size_t>& vi) {
        Bindings b = fixed;
        for (std::size_t i = 0; i < free_params.size(); ++i)
          b.emplace(free_params[i], value_choices[i][vi[i]]);
        out.push_back(MessageInstance::make(s, std::move(b)));
      });
    });
  }
  return out;
}

std::vector<MessageInstance> enabled_emissions(const HistoryVector& v,
                                               const Uod& u,
                                               std::string_view role,
                                               const ValuePool& pool) {
  return enabled_emissions(v.at(role), u, pool);
}

std::string_view to_string(Delivery d) {
  return d == Delivery::kFifo ? "fifo" : "any";
}

std::optional<Delivery> parse_delivery(std::string_view word) {
  if (word == "fifo") return Delivery::kFifo;
  if (word == "any") return Delivery::kAny;
  return std::nullopt;
}

std::vector<MessageInstance> deliverable(const HistoryVector& v,
                                         Delivery delivery) {
  std::map<std::string, std::set<MessageInstance>> received;
  for (const auto& h : v.histories)
    for (const auto& o : h.events)
      if (o.direction == Direction::kReceive)
        received[h.role].insert(o.instance);

  std::vector<MessageInstance> out;
  for (const auto& h : v.histories) {
    std::set<std::string> blocked;  // receivers with an older pending message
    for (const auto& o : h.events) {
      if (o.direction != Direction::kEmit) continue;
      const auto& m = o.instance;
      if (received[m.receiver].count(m)) continue;
      if (delivery == Delivery::kFifo && !blocked.insert(m.receiver).second)
        continue;
      out.push_back(m);
    }
  }
  return out;
}

Model project_model(const History& h, const ForwardingRegistry& fwd) {
  std::map<std::pair<std::string, Bindings>, ModelEntry> first;
  for (const auto& o : h.events) {
    ModelEntry e{o.instance.schema, o.instance.bindings,
                 o.instance.key_binding, o.tick};
    if (const ForwardingName* f = fwd.find(e.schema)) {
      e.schema = f->base_message;
      e.bindings.erase(f->id_param);
    } else if (has_forward_prefix(e.schema)) {
      throw UnknownForwardName(
          fmt::format("{} looks like a forward but is not registered",
                      e.schema));
    }
    auto key = std::make_pair(e.schema, e.bindings);
    auto it = first.find(key);
    if (it == first.end()) {
      first.emplace(std::move(key), std::move(e));
    } else if (e.time < it->second.time) {
      it->second.time = e.time;
    }
  }
  Model m{h.role, {}};
  for (auto& [_, e] : first) m.entries.push_back(std::move(e));
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ModelEntry& a, const ModelEntry& b) {
              return std::tie(a.time, a.schema, a.bindings) <
                     std::tie(b.time, b.schema, b.bindings);
            });
  return m;
}

Model project_model(const HistoryVector& v, std::string_view role,
                    const ForwardingRegistry& fwd) {
  return project_model(v.at(role), fwd);
}

}  // namespace tosca
