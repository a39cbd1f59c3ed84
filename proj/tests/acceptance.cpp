// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Oracles here are written independently of the library internals
// wherever the criterion calls for a cross-check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "miriam/config.hpp"
#include "miriam/coordinator.hpp"
#include "miriam/kernel_harness.hpp"
#include "miriam/planner.hpp"
#include "miriam/simulator.hpp"

using namespace miriam;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, const std::string& name, bool pass, const std::string& note = "") {
    std::cout << "criterion " << n << " (" << name << "): " << (pass ? "PASS" : "FAIL");
    if (!note.empty()) std::cout << "  [" << note << "]";
    std::cout << "\n" << std::flush;
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> corpus_paths() {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator("data/kernels"))
        if (e.path().extension() == ".k") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

// Dyadic shard sizes, written out independently of the planner.
std::vector<int> dyadic_sizes(int m) {
    int s = m;
    while (s % 2 == 0) s /= 2;
    std::vector<int> sizes;
    for (; s <= m; s *= 2) sizes.push_back(s);
    return sizes;
}

// ---- criterion 1 & 2 ----

void criterion_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto paths = corpus_paths();
    bool pass = paths.size() >= 8;
    std::string note;
    if (!pass) note = "fewer than 8 corpus kernels";
    for (const auto& path : paths) {
        const dsl::KernelFile kf = dsl::load_kernel_file(path);
        const int m = kf.default_m, b = kf.default_b;
        std::vector<std::vector<int>> plans;
        for (int s : dyadic_sizes(m)) plans.push_back(std::vector<int>(m / s, s));
        const dsl::Arrays inputs = dsl::make_random_inputs(kf.ast, kf.lengths(m, b), 17);
        for (dsl::IndexMode mode : {dsl::IndexMode::Computation, dsl::IndexMode::Memory}) {
            const auto rep = dsl::verify_equivalence(kf.ast, dsl::elasticize(kf.ast, mode), m, b,
                                                     plans, inputs, kf.scalars(m, b));
            if (!rep.all_pass) {
                pass = false;
                for (const auto& e : rep.entries)
                    if (!e.pass) note = path + ": " + e.detail;
            }
        }
    }
    const double dt = seconds_since(t0);
    if (dt >= 60.0) {
        pass = false;
        note = "runtime over budget";
    }
    report(1, "transformer equivalence suite", pass, note);
}

void criterion_naive_resize() {
    bool found = false;
    for (const auto& path : corpus_paths()) {
        const dsl::KernelFile kf = dsl::load_kernel_file(path);
        const int m = kf.default_m, b = kf.default_b;
        const dsl::Arrays inputs = dsl::make_random_inputs(kf.ast, kf.lengths(m, b), 23);
        dsl::LaunchConfig orig;
        orig.grid_size = m;
        orig.block_size = b;
        orig.logical_grid_size = m;
        orig.logical_block_size = b;
        dsl::LaunchConfig resized = orig;
        resized.grid_size = 2 * m;
        resized.block_size = b / 2;
        try {
            const auto ref = dsl::interpret(kf.ast, orig, inputs, kf.scalars(m, b));
            const auto naive = dsl::interpret(kf.ast, resized, inputs, kf.scalars(m, b));
            if (naive.outputs != ref.outputs) found = true;
        } catch (const dsl::DslError&) {
            found = true;  // the resized launch faults: also a detected wrong result
        }
        if (found) break;
    }
    report(2, "naive-resize failure demonstration", found);
}

// ---- criterion 3 ----

void criterion_pruning_safety() {
    const auto t0 = std::chrono::steady_clock::now();
    const GpuSpec gpu = gpu_preset("rtx2060-like");
    std::mt19937_64 rng(404);
    int instances = 0, hits = 0;
    std::string note;
    while (instances < 100) {
        const int m = 1 + static_cast<int>(rng() % 16);
        const int block = 32 * (1 + static_cast<int>(rng() % 4));
        const double work = 100.0 + static_cast<double>(rng() % 1900);
        const CriticalProfile crit{1 + static_cast<int>(rng() % 100),
                                   32 * (1 + static_cast<int>(rng() % 31))};

        // Independent oracle: shards run back to back; each shard's blocks run
        // concurrently, each sharing an SM with one resident critical block.
        const int free_sms = gpu.n_sm - crit.n_blocks % gpu.n_sm;
        const int free_threads = gpu.l_threads - crit.block_threads;
        struct Cand {
            int s, b;
            double cost;
        };
        std::vector<Cand> feasible_set;
        for (int s : dyadic_sizes(m)) {
            if (s > free_sms) continue;
            for (int b = 32; b <= block; b += 32) {
                if (b > free_threads) continue;
                const double shard =
                    static_cast<double>(block) * work * (b + crit.block_threads) / (1e9 * b);
                const double cost = (m / s) * (15e-6 + shard);
                feasible_set.push_back({s, b, cost});
            }
        }
        if (feasible_set.empty()) continue;
        ++instances;
        double best = feasible_set[0].cost;
        for (const auto& c : feasible_set) best = std::min(best, c.cost);

        const KernelSpec spec{"k", m, block, work, 0.0, 0};
        const auto kept = shrink_design_space(spec, {crit}, gpu, {});
        bool hit = false;
        for (const auto& c : feasible_set) {
            if (c.cost > best * (1.0 + 1e-12)) continue;
            for (const auto& k : kept)
                if (k.candidate.shard_grid_size == c.s && k.candidate.elastic_block_size == c.b)
                    hit = true;
        }
        if (hit) ++hits;
        else
            std::cout << "  pruning violation: M=" << m << " block=" << block
                      << " crit=(" << crit.n_blocks << "," << crit.block_threads << ")\n";
    }
    bool pass = hits >= 95;
    std::string detail = std::to_string(hits) + "/" + std::to_string(instances) + " optima kept";
    if (seconds_since(t0) >= 300.0) {
        pass = false;
        detail += ", runtime over budget";
    }
    report(3, "pruning-safety oracle", pass, detail);
}

// ---- criterion 4 ----

void criterion_score_vectors() {
    bool pass = true;
    auto expect = [&](bool ok) { pass = pass && ok; };

    expect(slicing_plan(12) == std::vector<int>{3, 6, 12});
    expect(slicing_plan(1) == std::vector<int>{1});
    expect(slicing_plan(16) == std::vector<int>{1, 2, 4, 8, 16});
    expect(slicing_plan(34) == std::vector<int>{17, 34});

    const GpuSpec xav = gpu_preset("xavier-like");
    expect(feasible({6, 64, 1}, {10, 512}, xav));
    expect(!feasible({7, 64, 1}, {10, 512}, xav));
    expect(!feasible({1, 32, 1}, {4, 2048}, xav));

    GpuSpec g = xav;
    g.l_threads = 1024;
    expect(std::abs(wiscore({6, 512, 1}, {10, 512}, g) - 1.0) < 1e-12);
    expect(std::abs(wiscore({2, 256, 1}, {10, 256}, g) - 0.25) < 1e-12);

    expect(oscore({1, 64, 1}, 15e-6, 15e-6, 0.35e-3, 0.35e-3) == 1);
    expect(oscore({1, 64, 64}, 15e-6, 15e-6, 0.35e-3, 0.35e-3) == 0);
    expect(oscore({4, 64, 4}, 15e-6, 15e-6, 0.35e-3, 0.35e-3) == 1);

    const GpuSpec rtx = gpu_preset("rtx2060-like");
    std::mt19937_64 rng(4);
    int checked = 0;
    while (checked < 10000) {
        const CriticalProfile crit{1 + static_cast<int>(rng() % 100),
                                   32 * (1 + static_cast<int>(rng() % 31))};
        const ElasticCandidate c{1 + static_cast<int>(rng() % 34),
                                 32 * (1 + static_cast<int>(rng() % 32)),
                                 1 + static_cast<int>(rng() % 64)};
        if (!feasible(c, crit, rtx)) continue;
        const double s = wiscore(c, crit, rtx);
        expect(s >= 0.0 && s <= 1.0);
        ++checked;
    }
    report(4, "score unit vectors", pass);
}

// ---- criteria 5 & 6 ----

std::vector<double> critical_latencies_in_arrival_order(const SimResult& r) {
    std::vector<const RequestRecord*> crit;
    for (const auto& q : r.trace.requests)
        if (q.criticality == Criticality::Critical && q.completed) crit.push_back(&q);
    std::stable_sort(crit.begin(), crit.end(), [](const RequestRecord* a, const RequestRecord* b) {
        if (a->arrival != b->arrival) return a->arrival < b->arrival;
        return a->id < b->id;
    });
    std::vector<double> out;
    for (const auto* q : crit) out.push_back(q->completion - q->arrival);
    return out;
}

void criterion_sequential_optimality() {
    const GpuSpec gpu = gpu_preset("rtx2060-like");
    const ContentionModel model;
    bool pass = true;
    std::string note;
    int compared = 0;
    for (char id : {'A', 'B', 'C', 'D'}) {
        Workload w = build_mdtb(id, "data/profiles");
        w.duration = 1.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto seq = critical_latencies_in_arrival_order(
                run(w, Policy::Sequential, gpu, model, seed));
            for (Policy p : {Policy::Multistream, Policy::Miriam}) {
                const auto other =
                    critical_latencies_in_arrival_order(run(w, p, gpu, model, seed));
                const std::size_t n = std::min(seq.size(), other.size());
                if (n == 0) {
                    pass = false;
                    note = std::string("no completed critical requests on mdtb-") + id;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    ++compared;
                    if (seq[i] > other[i] + 1e-9) {
                        pass = false;
                        std::ostringstream os;
                        os << "mdtb-" << id << " seed " << seed << " request " << i << ": "
                           << policy_name(p) << " " << other[i] << " < sequential " << seq[i];
                        note = os.str();
                    }
                }
            }
        }
    }
    report(5, "sequential-optimality invariant", pass,
           pass ? std::to_string(compared) + " pointwise comparisons" : note);
}

void criterion_directional() {
    const GpuSpec gpu = gpu_preset("rtx2060-like");
    const ContentionModel model;
    bool pass = true;
    std::ostringstream note;

    Workload a = build_mdtb('A', "data/profiles");
    a.duration = 5.0;
    const SimResult a_seq = run(a, Policy::Sequential, gpu, model, 1);
    const SimResult a_mir = run(a, Policy::Miriam, gpu, model, 1);
    const double a_tp = a_mir.metrics.throughput / a_seq.metrics.throughput;
    const double a_ov = a_mir.metrics.critical_mean / a_seq.metrics.critical_mean - 1.0;
    if (a_tp < 1.4 || a_ov > 0.35) pass = false;
    note << "mdtb-A throughput x" << a_tp << " overhead " << a_ov * 100 << "%";

    ExperimentConfig lg = load_experiment_config("configs/lgsvl.cfg");
    const Workload trace = lg.make_workload();
    const SimResult t_seq = run(trace, Policy::Sequential, gpu, model, 1);
    const SimResult t_mir = run(trace, Policy::Miriam, gpu, model, 1);
    const double t_tp = t_mir.metrics.throughput / t_seq.metrics.throughput;
    const double t_ov = t_mir.metrics.critical_mean / t_seq.metrics.critical_mean - 1.0;
    if (t_tp < 1.5 || t_ov > 0.25) pass = false;
    note << "; lgsvl throughput x" << t_tp << " overhead " << t_ov * 100 << "%";

    report(6, "directional reproduction", pass, note.str());
}

// ---- criterion 7 ----

void criterion_coordinator_invariants() {
    const GpuSpec gpu = gpu_preset("rtx2060-like");
    std::mt19937_64 rng(777);
    bool pass = true;
    std::string note;
    long events = 0;
    auto fail = [&](const std::string& msg) {
        if (pass) note = msg;
        pass = false;
    };

    while (events < 10000 && pass) {
        const int grid = static_cast<int>(1 + rng() % 64);
        std::vector<ScoredCandidate> cands;
        for (int s : dyadic_sizes(grid)) {
            ScoredCandidate c;
            c.candidate = {s, 32 * (1 + static_cast<int>(rng() % 8)), grid / s};
            c.combined = 0.5;
            c.oscore = 1;
            cands.push_back(c);
        }
        Coordinator coord(gpu);
        coord.enqueue_normal_kernel(events, KernelSpec{"k", grid, 256, 1.0, 0.0, 0}, cands);

        std::optional<CriticalProfile> resident;
        std::vector<ShardDispatch> inflight;
        std::vector<int> executed(grid, 0);
        auto absorb = [&](const std::vector<ShardDispatch>& batch) {
            ++events;
            for (const auto& s : batch) {
                ++events;
                if (resident) {
                    if (s.block_size + resident->block_threads > gpu.l_threads)
                        fail("thread-slot safety violated");
                    if (coord.outstanding_blocks() >
                        gpu.n_sm - resident->n_blocks % gpu.n_sm)
                        fail("SM budget violated");
                }
                inflight.push_back(s);
            }
            if (const auto* tree = coord.head_tree()) {
                try {
                    tree->check_invariants();
                } catch (const std::logic_error& e) {
                    fail(e.what());
                }
            }
        };

        absorb(coord.on_normal_arrival(resident));
        int guard = 0;
        while (coord.take_completed().empty() && pass) {
            if (++guard > 10000) {
                fail("stalled kernel");
                break;
            }
            const int roll = static_cast<int>(rng() % 4);
            if (roll == 0 && !resident) {
                resident = CriticalProfile{1 + static_cast<int>(rng() % 40),
                                           32 * (1 + static_cast<int>(rng() % 16))};
                absorb(coord.on_critical_arrival(*resident));
            } else if (roll == 1 && resident) {
                resident.reset();
                absorb(coord.on_critical_retire(resident));
            } else if (!inflight.empty()) {
                const std::size_t i = rng() % inflight.size();
                const ShardDispatch s = inflight[i];
                inflight.erase(inflight.begin() + static_cast<long>(i));
                for (int b = s.start; b < s.start + s.count; ++b) executed[b] += 1;
                absorb(coord.on_shard_retire(s.kernel_id, s.start, s.count, resident));
            } else if (resident) {
                resident.reset();
                absorb(coord.on_critical_retire(resident));
            } else {
                absorb(coord.on_normal_arrival(resident));
            }
        }
        for (int b = 0; b < grid && pass; ++b)
            if (executed[b] != 1) fail("block executed " + std::to_string(executed[b]) + " times");
    }
    report(7, "coordinator structural invariants", pass,
           pass ? std::to_string(events) + " events" : note);
}

// ---- criterion 8 ----

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_cli_determinism() {
#ifndef MIRIAM_CLI_PATH
    report(8, "CLI run determinism", false, "CLI path not configured");
#else
    const std::string cfg_path = "/tmp/accept-run.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "workload = mdtb-A\npolicies = sequential,miriam\nseed = 7\n"
            << "duration = 0.05\nprofile_dir = data/profiles\n";
    }
    bool pass = true;
    std::string note;
    std::vector<std::string> metrics, traces;
    for (int i = 0; i < 3 && pass; ++i) {
        const std::string out = "/tmp/accept-out-" + std::to_string(i);
        fs::remove_all(out);
        const std::string cmd =
            std::string(MIRIAM_CLI_PATH) + " run " + cfg_path + " --out " + out + " > /dev/null";
        if (std::system(cmd.c_str()) != 0) {
            pass = false;
            note = "CLI run failed";
            break;
        }
        metrics.push_back(slurp(out + "/sequential-metrics.txt") +
                          slurp(out + "/miriam-metrics.txt"));
        traces.push_back(slurp(out + "/sequential-trace.txt") + slurp(out + "/miriam-trace.txt"));
        if (metrics.back().empty() || traces.back().empty()) {
            pass = false;
            note = "missing output files";
        }
    }
    for (std::size_t i = 1; i < metrics.size() && pass; ++i) {
        if (metrics[i] != metrics[0] || traces[i] != traces[0]) {
            pass = false;
            note = "outputs differ between runs";
        }
    }
    report(8, "CLI run determinism", pass, note);
#endif
}

// ---- criterion 9 ----

void criterion_occupancy_oracle() {
    const GpuSpec gpu = gpu_preset("rtx2060-like");
    std::mt19937_64 rng(909);
    bool pass = true;
    std::string note;
    for (int iter = 0; iter < 20 && pass; ++iter) {
        SimTrace trace;
        const int blocks = 5 + static_cast<int>(rng() % 60);
        struct Interval {
            double t0, t1;
            int sm, threads;
        };
        std::vector<Interval> ivs;
        for (int i = 0; i < blocks; ++i) {
            Interval iv;
            iv.sm = static_cast<int>(rng() % gpu.n_sm);
            iv.threads = 32 * (1 + static_cast<int>(rng() % 8));
            const double a = static_cast<double>(rng() % 1000000) / 1e5;
            const double b = static_cast<double>(1 + rng() % 1000000) / 1e5;
            iv.t0 = a;
            iv.t1 = a + b;
            ivs.push_back(iv);
            trace.events.push_back(
                {TraceEvent::Kind::Dispatch, iv.t0, 0, i, 0, 1, iv.sm, iv.threads});
            trace.events.push_back(
                {TraceEvent::Kind::Retire, iv.t1, 0, i, 0, 1, iv.sm, iv.threads});
        }
        std::sort(trace.events.begin(), trace.events.end(),
                  [](const TraceEvent& a, const TraceEvent& b) { return a.t < b.t; });

        // brute force: sweep every boundary-to-boundary interval
        std::vector<double> ts;
        for (const auto& iv : ivs) {
            ts.push_back(iv.t0);
            ts.push_back(iv.t1);
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        double acc = 0, active_time = 0;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
            const double mid = (ts[i] + ts[i + 1]) / 2;
            std::vector<long long> resident(gpu.n_sm, 0);
            for (const auto& iv : ivs)
                if (iv.t0 <= mid && mid < iv.t1) resident[iv.sm] += iv.threads;
            int active = 0;
            double sum = 0;
            for (int s = 0; s < gpu.n_sm; ++s) {
                if (resident[s] > 0) {
                    ++active;
                    sum += (static_cast<double>(resident[s]) / gpu.warp_size) /
                           gpu.max_warps_per_sm;
                }
            }
            if (active > 0) {
                acc += (sum / active) * (ts[i + 1] - ts[i]);
                active_time += ts[i + 1] - ts[i];
            }
        }
        const double expected = active_time > 0 ? std::min(1.0, acc / active_time) : 0.0;
        const double got = achieved_occupancy(trace, gpu);
        const double rel = std::abs(got - expected) / std::max(1e-30, std::abs(expected));
        if (rel > 1e-9) {
            pass = false;
            std::ostringstream os;
            os << "trace " << iter << ": engine " << got << " vs oracle " << expected;
            note = os.str();
        }
    }
    report(9, "occupancy metric oracle", pass, note);
}

}  // namespace

int main() {
    criterion_equivalence();
    criterion_naive_resize();
    criterion_pruning_safety();
    criterion_score_vectors();
    criterion_sequential_optimality();
    criterion_directional();
    criterion_coordinator_invariants();
    criterion_cli_determinism();
    criterion_occupancy_oracle();
    if (failures > 0) {
        std::cout << failures << " criteria failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
