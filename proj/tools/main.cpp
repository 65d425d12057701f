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

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dnnsim/analysis.hpp"
#include "dnnsim/compiler.hpp"
#include "dnnsim/graph.hpp"
#include "dnnsim/simengine.hpp"
#include "dnnsim/sysdesc.hpp"

namespace fs = std::filesystem;

namespace {

enum class Mode { Compile, Simulate, Roofline };

struct Options {
  std::vector<std::string> networks;
  std::vector<std::string> systems;
  std::string out_dir = "out";
  double theta = 0.9;
  bool dump_taskgraph = false;
  bool gantt = false;
  bool roofline = false;
  bool reports = false;
  unsigned jobs = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs one (network, system) pair and returns the console report. Artifacts
// are collected in memory and written only after the whole pipeline
// succeeded, so a failed run leaves no partial outputs.
std::string run_pair(Mode mode, const std::string& network_path,
                     const std::string& system_path, const fs::path& out_dir,
                     const Options& opt) {
  std::ostringstream console;
  std::map<std::string, std::string> artifacts;
  bool select_all = !opt.dump_taskgraph && !opt.gantt && !opt.roofline && !opt.reports;

  auto t0 = std::chrono::steady_clock::now();
  dnnsim::DnnGraph graph = dnnsim::load_network(read_file(network_path));
  dnnsim::SystemDescription sys = dnnsim::load_system(read_file(system_path));
  double t_load = seconds_since(t0);

  auto t1 = std::chrono::steady_clock::now();
  dnnsim::TaskGraph tg = dnnsim::compile(graph, sys);
  double t_compile = seconds_since(t1);

  if (mode == Mode::Compile || select_all || opt.dump_taskgraph) {
    artifacts["taskgraph.json"] = dnnsim::save_taskgraph(tg);
  }

  double t_sim = 0.0;
  double t_analysis = 0.0;
  if (mode != Mode::Compile) {
    auto t2 = std::chrono::steady_clock::now();
    dnnsim::SimTrace trace = dnnsim::simulate(tg, sys);
    t_sim = seconds_since(t2);

    auto t3 = std::chrono::steady_clock::now();
    std::vector<dnnsim::LayerReport> reports =
        dnnsim::layer_reports(trace, tg, graph, sys);
    artifacts["trace.json"] = dnnsim::export_trace_json(trace);
    if (select_all || opt.gantt) {
      artifacts["gantt.json"] = dnnsim::export_gantt(trace, tg);
    }
    if (select_all || opt.reports) {
      artifacts["layer_reports.csv"] =
          dnnsim::export_reports_csv(reports, trace, opt.theta);
      artifacts["layer_reports.json"] =
          dnnsim::export_reports_json(reports, trace, opt.theta);
    }
    if ((select_all || opt.roofline) && !reports.empty()) {
      dnnsim::Roofline roof = dnnsim::roofline(reports, sys);
      artifacts["roofline.json"] = dnnsim::export_roofline_json(roof);
    }
    t_analysis = seconds_since(t3);

    console << "network: " << network_path << "\n";
    console << "system:  " << system_path << " (" << sys.label << ")\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-12s %-20s %14s %10s %8s %8s\n", "layer",
                  "class", "latency_ms", "gops", "nce", "bus");
    console << line;
    for (const dnnsim::LayerReport& r : reports) {
      std::snprintf(line, sizeof(line), "%-12s %-20s %14.4f %10.1f %7.1f%% %7.1f%%\n",
                    r.layer.c_str(), to_string(dnnsim::classify(r, opt.theta)),
                    r.latency.ps / 1e9, r.achieved_ops_per_sec / 1e9,
                    100.0 * r.nce_busy_fraction, 100.0 * r.bus_busy_fraction);
      console << line;
    }
    std::snprintf(line, sizeof(line), "%-12s %-20s %14.4f\n", "TOTAL", "",
                  trace.makespan.ps / 1e9);
    console << line;
  }

  fs::create_directories(out_dir);
  for (const auto& [name, contents] : artifacts) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write '" + (out_dir / name).string() + "'");
    }
    out << contents;
  }

  double total = t_load + t_compile + t_sim + t_analysis;
  char line[128];
  console << "\nphase timings\n";
  std::snprintf(line, sizeof(line), "  %-16s %8.3f s\n", "load network", t_load);
  console << line;
  std::snprintf(line, sizeof(line), "  %-16s %8.3f s\n", "compile", t_compile);
  console << line;
  std::snprintf(line, sizeof(line), "  %-16s %8.3f s\n", "simulate", t_sim);
  console << line;
  std::snprintf(line, sizeof(line), "  %-16s %8.3f s\n", "analyze+export", t_analysis);
  console << line;
  std::snprintf(line, sizeof(line), "  %-16s %8.3f s\n", "total", total);
  console << line;
  console << "artifacts written to " << out_dir.string() << "\n";
  return console.str();
}

int run(Mode mode, const Options& opt) {
  struct Job {
    std::string network;
    std::string system;
    fs::path out_dir;
  };
  std::vector<Job> jobs;
  bool single = opt.networks.size() == 1 && opt.systems.size() == 1;
  for (const std::string& net : opt.networks) {
    for (const std::string& sysp : opt.systems) {
      fs::path dir = opt.out_dir;
      if (!single) {
        dir /= fs::path(net).stem().string() + "__" + fs::path(sysp).stem().string();
      }
      jobs.push_back({net, sysp, dir});
    }
  }

  std::mutex io_mutex;
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        std::string report = run_pair(mode, jobs[i].network, jobs[i].system,
                                      jobs[i].out_dir, opt);
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << report << std::endl;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "error: " << jobs[i].network << " x " << jobs[i].system
                  << ": " << e.what() << std::endl;
        failed = true;
      }
    }
  };

  unsigned n_threads = std::max<size_t>(1, std::min<size_t>(opt.jobs, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return failed ? 1 : 0;
}

void add_common_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--network", opt.networks, "network description file")
      ->required();
  cmd->add_option("--system", opt.systems, "system description file")->required();
  cmd->add_option("--out", opt.out_dir, "output directory (default: out)");
  cmd->add_option("--theta", opt.theta,
                  "busy-fraction threshold for boundedness classes, in (0,1]")
      ->check(CLI::Range(1e-9, 1.0));
  cmd->add_flag("--dump-taskgraph", opt.dump_taskgraph, "write taskgraph.json");
  cmd->add_flag("--gantt", opt.gantt, "write gantt.json (trace-event format)");
  cmd->add_flag("--roofline", opt.roofline, "write roofline.json");
  cmd->add_flag("--reports", opt.reports, "write layer_reports.{csv,json}");
  cmd->add_option("--jobs", opt.jobs, "parallel (network, system) pairs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DNN system performance estimation on virtual hardware models"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* cmd_compile =
      app.add_subcommand("compile", "lower a network to a task graph");
  CLI::App* cmd_simulate =
      app.add_subcommand("simulate", "compile and run the discrete-event simulation");
  CLI::App* cmd_roofline =
      app.add_subcommand("roofline", "simulate and emit roofline data");
  add_common_options(cmd_compile, opt);
  add_common_options(cmd_simulate, opt);
  add_common_options(cmd_roofline, opt);

  CLI11_PARSE(app, argc, argv);

  Mode mode = Mode::Simulate;
  if (cmd_compile->parsed()) mode = Mode::Compile;
  if (cmd_roofline->parsed()) mode = Mode::Roofline;

  try {
    return run(mode, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
