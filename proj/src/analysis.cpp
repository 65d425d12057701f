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

#include "dnnsim/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "json.hpp"

namespace dnnsim {

using json = nlohmann::json;

const char* to_string(Boundedness b) {
  switch (b) {
    case Boundedness::ComputeBound: return "compute-bound";
    case Boundedness::CommunicationBound: return "communication-bound";
    case Boundedness::Neither: return "neither";
  }
  return "?";
}

namespace {

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 9);
  return std::string(buf, ptr);
}

SimTime clip_overlap(const Interval& iv, SimTime w0, SimTime w1) {
  SimTime lo = std::max(iv.start, w0);
  SimTime hi = std::min(iv.end, w1);
  return hi > lo ? hi - lo : SimTime{0};
}

}  // namespace

std::vector<LayerReport> layer_reports(const SimTrace& trace, const TaskGraph& tg,
                                       const DnnGraph& graph,
                                       const SystemDescription& /*sys*/) {
  if (trace.intervals.size() != tg.tasks.size()) {
    throw ValidationError("trace does not match task graph (" +
                          std::to_string(trace.intervals.size()) + " intervals, " +
                          std::to_string(tg.tasks.size()) + " tasks)");
  }
  for (const Interval& iv : trace.intervals) {
    if (iv.task_id >= tg.tasks.size()) {
      throw ValidationError("trace references unknown task id " +
                            std::to_string(iv.task_id));
    }
  }

  // Keep first-appearance order, which follows the compiled layer order.
  std::vector<std::string> order;
  std::map<std::string, LayerReport> by_layer;
  for (const Task& t : tg.tasks) {
    if (!by_layer.count(t.layer)) {
      order.push_back(t.layer);
      LayerReport r;
      r.layer = t.layer;
      r.start = trace.intervals[t.id].start;
      r.end = trace.intervals[t.id].end;
      by_layer.emplace(t.layer, std::move(r));
    }
    LayerReport& r = by_layer[t.layer];
    const Interval& iv = trace.intervals[t.id];
    r.start = std::min(r.start, iv.start);
    r.end = std::max(r.end, iv.end);
    if (t.kind != TaskKind::Compute) r.dram_bytes += t.cost;
  }

  std::vector<LayerReport> reports;
  reports.reserve(order.size());
  for (const std::string& name : order) {
    LayerReport r = by_layer[name];
    const LayerNode& layer = graph.layer(name);
    r.latency = r.end - r.start;
    r.macs = mac_count(layer, graph);
    r.ops = checked_mul(2, r.macs, "layer ops");
    r.min_dram_bytes = min_dram_traffic_bytes(layer, graph);
    for (const Interval& iv : trace.intervals) {
      SimTime overlap = clip_overlap(iv, r.start, r.end);
      if (iv.resource == Resource::Nce) {
        r.nce_busy = r.nce_busy + overlap;
      } else {
        r.bus_busy = r.bus_busy + overlap;
      }
    }
    if (r.latency.ps > 0) {
      r.nce_busy_fraction = static_cast<double>(r.nce_busy.ps) / r.latency.ps;
      r.bus_busy_fraction = static_cast<double>(r.bus_busy.ps) / r.latency.ps;
      r.achieved_ops_per_sec = static_cast<double>(r.ops) * 1e12 / r.latency.ps;
    }
    r.operational_intensity =
        r.dram_bytes > 0
            ? static_cast<double>(r.ops) / static_cast<double>(r.dram_bytes)
            : std::numeric_limits<double>::infinity();
    reports.push_back(std::move(r));
  }
  return reports;
}

Boundedness classify(const LayerReport& report, double theta) {
  if (!(theta > 0.0) || theta > 1.0) {
    throw ValidationError("theta must be in (0, 1]");
  }
  double nce = report.nce_busy_fraction;
  double bus = report.bus_busy_fraction;
  if (nce >= theta && nce >= bus) return Boundedness::ComputeBound;
  if (bus >= theta && bus > nce) return Boundedness::CommunicationBound;
  return Boundedness::Neither;
}

Roofline roofline(const std::vector<LayerReport>& reports,
                  const SystemDescription& sys) {
  if (reports.empty()) {
    throw ValidationError("roofline requires at least one layer report");
  }
  Roofline roof;
  roof.peak_ops_per_sec = peak_ops_per_sec(sys);
  roof.peak_bandwidth_bytes_per_sec = peak_bandwidth_bytes_per_sec(sys);
  roof.ridge_ops_per_byte = static_cast<double>(roof.peak_ops_per_sec) /
                            static_cast<double>(roof.peak_bandwidth_bytes_per_sec);
  int64_t total_latency = 0;
  for (const LayerReport& r : reports) total_latency += r.latency.ps;
  for (const LayerReport& r : reports) {
    RooflinePoint p;
    p.layer = r.layer;
    p.intensity = r.operational_intensity;
    p.achieved = r.achieved_ops_per_sec;
    p.weight = total_latency > 0
                   ? static_cast<double>(r.latency.ps) / total_latency
                   : 0.0;
    roof.points.push_back(std::move(p));
  }
  return roof;
}

double roofline_attainable(const Roofline& roof, double intensity) {
  double bw_bound = intensity * static_cast<double>(roof.peak_bandwidth_bytes_per_sec);
  return std::min(static_cast<double>(roof.peak_ops_per_sec), bw_bound);
}

std::string export_gantt(const SimTrace& trace, const TaskGraph& tg) {
  if (trace.intervals.size() != tg.tasks.size()) {
    throw ValidationError("trace does not match task graph");
  }
  json events = json::array();
  if (trace.intervals.empty()) {
    json doc;
    doc["traceEvents"] = std::move(events);
    doc["displayTimeUnit"] = "ms";
    return doc.dump(2) + "\n";
  }
  events.push_back({{"name", "process_name"},
                    {"ph", "M"},
                    {"pid", 1},
                    {"args", {{"name", "dnnsim"}}}});
  events.push_back({{"name", "thread_name"},
                    {"ph", "M"},
                    {"pid", 1},
                    {"tid", 1},
                    {"args", {{"name", "BUS"}}}});
  events.push_back({{"name", "thread_name"},
                    {"ph", "M"},
                    {"pid", 1},
                    {"tid", 2},
                    {"args", {{"name", "NCE"}}}});

  std::vector<Interval> ordered = trace.intervals;
  std::sort(ordered.begin(), ordered.end(), [](const Interval& a, const Interval& b) {
    return std::tie(a.start.ps, a.task_id) < std::tie(b.start.ps, b.task_id);
  });
  for (const Interval& iv : ordered) {
    const Task& t = tg.tasks[iv.task_id];
    json ev;
    ev["name"] = t.layer + " " + to_string(t.kind) + " t" + std::to_string(t.tile);
    ev["cat"] = to_string(t.kind);
    ev["ph"] = "X";
    ev["ts"] = static_cast<double>(iv.start.ps) / 1e6;
    ev["dur"] = static_cast<double>((iv.end - iv.start).ps) / 1e6;
    ev["pid"] = 1;
    ev["tid"] = iv.resource == Resource::Bus ? 1 : 2;
    ev["args"] = {{"task", iv.task_id},
                  {"layer", t.layer},
                  {"tile", t.tile},
                  {"kind", to_string(t.kind)},
                  {"cost", t.cost}};
    events.push_back(std::move(ev));
  }
  json doc;
  doc["traceEvents"] = std::move(events);
  doc["displayTimeUnit"] = "ms";
  return doc.dump(2) + "\n";
}

namespace {

LayerReport totals_row(const std::vector<LayerReport>& reports,
                       const SimTrace& trace) {
  LayerReport total;
  total.layer = "TOTAL";
  total.start = SimTime{0};
  total.end = trace.makespan;
  total.latency = trace.makespan;
  for (const LayerReport& r : reports) {
    total.macs += r.macs;
    total.ops += r.ops;
    total.dram_bytes += r.dram_bytes;
    total.min_dram_bytes += r.min_dram_bytes;
  }
  total.nce_busy = trace.nce_busy;
  total.bus_busy = trace.bus_busy;
  if (total.latency.ps > 0) {
    total.nce_busy_fraction = static_cast<double>(total.nce_busy.ps) / total.latency.ps;
    total.bus_busy_fraction = static_cast<double>(total.bus_busy.ps) / total.latency.ps;
    total.achieved_ops_per_sec = static_cast<double>(total.ops) * 1e12 / total.latency.ps;
  }
  total.operational_intensity =
      total.dram_bytes > 0
          ? static_cast<double>(total.ops) / static_cast<double>(total.dram_bytes)
          : std::numeric_limits<double>::infinity();
  return total;
}

}  // namespace

std::string export_reports_csv(const std::vector<LayerReport>& reports,
                               const SimTrace& trace, double theta) {
  std::string out =
      "layer,class,start_ps,end_ps,latency_ps,macs,ops,dram_bytes,"
      "min_dram_bytes,intensity_ops_per_byte,achieved_ops_per_sec,"
      "nce_busy_fraction,bus_busy_fraction\n";
  auto row = [&](const LayerReport& r) {
    out += r.layer;
    out += ',';
    out += to_string(classify(r, theta));
    out += ',' + std::to_string(r.start.ps) + ',' + std::to_string(r.end.ps) +
           ',' + std::to_string(r.latency.ps) + ',' + std::to_string(r.macs) +
           ',' + std::to_string(r.ops) + ',' + std::to_string(r.dram_bytes) +
           ',' + std::to_string(r.min_dram_bytes) + ',' +
           fmt_double(r.operational_intensity) + ',' +
           fmt_double(r.achieved_ops_per_sec) + ',' +
           fmt_double(r.nce_busy_fraction) + ',' +
           fmt_double(r.bus_busy_fraction) + '\n';
  };
  for (const LayerReport& r : reports) row(r);
  row(totals_row(reports, trace));
  return out;
}

namespace {

json report_to_json(const LayerReport& r, double theta) {
  json j;
  j["layer"] = r.layer;
  j["class"] = to_string(classify(r, theta));
  j["start_ps"] = r.start.ps;
  j["end_ps"] = r.end.ps;
  j["latency_ps"] = r.latency.ps;
  j["macs"] = r.macs;
  j["ops"] = r.ops;
  j["dram_bytes"] = r.dram_bytes;
  j["min_dram_bytes"] = r.min_dram_bytes;
  if (std::isinf(r.operational_intensity)) {
    j["intensity_ops_per_byte"] = nullptr;
  } else {
    j["intensity_ops_per_byte"] = r.operational_intensity;
  }
  j["achieved_ops_per_sec"] = r.achieved_ops_per_sec;
  j["nce_busy_ps"] = r.nce_busy.ps;
  j["bus_busy_ps"] = r.bus_busy.ps;
  j["nce_busy_fraction"] = r.nce_busy_fraction;
  j["bus_busy_fraction"] = r.bus_busy_fraction;
  return j;
}

}  // namespace

std::string export_reports_json(const std::vector<LayerReport>& reports,
                                const SimTrace& trace, double theta) {
  json doc;
  doc["layers"] = json::array();
  for (const LayerReport& r : reports) {
    doc["layers"].push_back(report_to_json(r, theta));
  }
  doc["total"] = report_to_json(totals_row(reports, trace), theta);
  doc["theta"] = theta;
  return doc.dump(2) + "\n";
}

std::string export_roofline_json(const Roofline& roof) {
  json doc;
  doc["peak_ops_per_sec"] = roof.peak_ops_per_sec;
  doc["peak_bandwidth_bytes_per_sec"] = roof.peak_bandwidth_bytes_per_sec;
  doc["ridge_ops_per_byte"] = roof.ridge_ops_per_byte;
  doc["points"] = json::array();
  for (const RooflinePoint& p : roof.points) {
    json j;
    j["layer"] = p.layer;
    if (std::isinf(p.intensity)) {
      j["intensity_ops_per_byte"] = nullptr;
    } else {
      j["intensity_ops_per_byte"] = p.intensity;
    }
    j["achieved_ops_per_sec"] = p.achieved;
    j["weight"] = p.weight;
    doc["points"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string export_trace_json(const SimTrace& trace) {
  json doc;
  doc["makespan_ps"] = trace.makespan.ps;
  doc["nce_busy_ps"] = trace.nce_busy.ps;
  doc["bus_busy_ps"] = trace.bus_busy.ps;
  doc["intervals"] = json::array();
  std::vector<Interval> ordered = trace.intervals;
  std::sort(ordered.begin(), ordered.end(), [](const Interval& a, const Interval& b) {
    return std::tie(a.start.ps, a.task_id) < std::tie(b.start.ps, b.task_id);
  });
  for (const Interval& iv : ordered) {
    doc["intervals"].push_back({{"task", iv.task_id},
                                {"resource", to_string(iv.resource)},
                                {"start_ps", iv.start.ps},
                                {"end_ps", iv.end.ps}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace dnnsim
