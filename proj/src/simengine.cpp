// Copyright 2026 The dnnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dnnsim/simengine.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

namespace dnnsim {

SimTime cycles_to_time(uint64_t cycles, uint64_t freq_hz) {
  if (freq_hz == 0) throw ValidationError("frequency must be >= 1 Hz");
  unsigned __int128 num =
      static_cast<unsigned __int128>(cycles) * 1'000'000'000'000ULL;
  unsigned __int128 ps = (num + freq_hz - 1) / freq_hz;
  if (ps > static_cast<unsigned __int128>(std::numeric_limits<int64_t>::max())) {
    throw ValidationError("simulated time overflows 64-bit picoseconds");
  }
  return {static_cast<int64_t>(ps)};
}

SimTime task_duration(const Task& task, const SystemDescription& sys) {
  SimTime overhead = cycles_to_time(sys.hkp.dispatch_overhead_cycles, sys.bus.freq_hz);
  SimTime occupancy;
  if (task.kind == TaskKind::Compute) {
    occupancy = cycles_to_time(task.cost, sys.nce.freq_hz);
  } else {
    if (sys.bus.bytes_per_cycle == 0) {
      throw ValidationError("bus width must be >= 1 byte/cycle");
    }
    uint64_t cycles = sys.dma.setup_cycles + ceil_div(task.cost, sys.bus.bytes_per_cycle);
    occupancy = cycles_to_time(cycles, sys.bus.freq_hz);
  }
  return overhead + occupancy;
}

SimTrace simulate(const TaskGraph& tg, const SystemDescription& sys) {
  validate_taskgraph(tg, /*compute_invariant=*/false);
  const size_t n = tg.tasks.size();

  SimTrace trace;
  trace.intervals.resize(n);
  if (n == 0) return trace;

  std::vector<std::vector<uint64_t>> succs(n);
  std::vector<uint64_t> pending_preds(n, 0);
  for (const auto& [p, s] : tg.edges) {
    succs[p].push_back(s);
    pending_preds[s]++;
  }

  // Per-resource queue of ready tasks, FIFO by (ready time, id).
  using ReadyKey = std::pair<int64_t, uint64_t>;
  std::set<ReadyKey> ready_queue[2];
  bool res_busy[2] = {false, false};

  // Event heap. Completions settle before dispatch attempts at equal times.
  enum EventKind : int { kCompletion = 0, kTryDispatch = 1 };
  struct Event {
    int64_t time;
    int kind;
    uint64_t id;  // task id for completions, resource index for dispatches
    bool operator>(const Event& o) const {
      return std::tie(time, kind, id) > std::tie(o.time, o.kind, o.id);
    }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;

  auto resource_index = [](Resource r) { return r == Resource::Bus ? 0 : 1; };

  for (uint64_t i = 0; i < n; ++i) {
    if (pending_preds[i] == 0) {
      ready_queue[resource_index(tg.tasks[i].resource)].insert({0, i});
    }
  }
  events.push({0, kTryDispatch, 0});
  events.push({0, kTryDispatch, 1});

  while (!events.empty()) {
    Event ev = events.top();
    events.pop();
    SimTime now{ev.time};

    if (ev.kind == kCompletion) {
      const Task& task = tg.tasks[ev.id];
      int r = resource_index(task.resource);
      res_busy[r] = false;
      for (uint64_t s : succs[ev.id]) {
        if (--pending_preds[s] == 0) {
          // Ready time is the completion time of the last predecessor.
          ready_queue[resource_index(tg.tasks[s].resource)].insert({now.ps, s});
        }
      }
      events.push({now.ps, kTryDispatch, static_cast<uint64_t>(r)});
      // Successors on the other resource may now be dispatchable.
      events.push({now.ps, kTryDispatch, static_cast<uint64_t>(1 - r)});
    } else {
      int r = static_cast<int>(ev.id);
      if (res_busy[r] || ready_queue[r].empty()) continue;
      ReadyKey head = *ready_queue[r].begin();
      if (head.first > now.ps) {
        events.push({head.first, kTryDispatch, ev.id});
        continue;
      }
      ready_queue[r].erase(ready_queue[r].begin());
      uint64_t tid = head.second;
      SimTime start = now;
      SimTime end = start + task_duration(tg.tasks[tid], sys);
      trace.intervals[tid] = {tid, tg.tasks[tid].resource, start, end};
      res_busy[r] = true;
      events.push({end.ps, kCompletion, tid});
    }
  }

  for (const Interval& iv : trace.intervals) {
    trace.makespan = std::max(trace.makespan, iv.end);
    SimTime dur = iv.end - iv.start;
    if (iv.resource == Resource::Nce) {
      trace.nce_busy = trace.nce_busy + dur;
    } else {
      trace.bus_busy = trace.bus_busy + dur;
    }
  }
  return trace;
}

SimTime critical_path_time(const TaskGraph& tg, const SystemDescription& sys) {
  validate_taskgraph(tg, /*compute_invariant=*/false);
  const size_t n = tg.tasks.size();
  std::vector<std::vector<uint64_t>> preds(n);
  std::vector<uint64_t> indeg(n, 0);
  std::vector<std::vector<uint64_t>> succs(n);
  for (const auto& [p, s] : tg.edges) {
    preds[s].push_back(p);
    succs[p].push_back(s);
    indeg[s]++;
  }
  std::vector<uint64_t> order;
  order.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) order.push_back(i);
  }
  for (size_t k = 0; k < order.size(); ++k) {
    for (uint64_t s : succs[order[k]]) {
      if (--indeg[s] == 0) order.push_back(s);
    }
  }
  std::vector<SimTime> finish(n);
  SimTime best;
  for (uint64_t u : order) {
    SimTime start;
    for (uint64_t p : preds[u]) start = std::max(start, finish[p]);
    finish[u] = start + task_duration(tg.tasks[u], sys);
    best = std::max(best, finish[u]);
  }
  return best;
}

}  // namespace dnnsim
