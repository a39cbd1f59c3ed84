#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "miriam/config.hpp"
#include "miriam/kernel_harness.hpp"
#include "miriam/planner.hpp"
#include "miriam/simulator.hpp"

namespace {

// Exit codes: 0 ok, 1 usage/config error, 2 simulation/verification failure.
struct SimFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<int> warp_multiples(int original_block, int warp) {
    std::vector<int> sizes;
    for (int s = warp; s <= original_block; s += warp) sizes.push_back(s);
    if (sizes.empty() || sizes.back() != original_block) sizes.push_back(original_block);
    return sizes;
}

std::vector<miriam::CriticalProfile> profiles_of(const miriam::TaskSpec& task) {
    std::vector<miriam::CriticalProfile> out;
    for (const auto& k : task.kernels) out.push_back({k.grid_size, k.block_size});
    return out;
}

int cmd_plan(const std::string& profile_path, const std::string& critical_path,
             const std::string& gpu_name) {
    const miriam::GpuSpec gpu = miriam::gpu_preset(gpu_name);
    const miriam::TaskSpec normal =
        miriam::load_profile(profile_path, miriam::Criticality::Normal);
    std::vector<miriam::CriticalProfile> crit_profiles;
    if (!critical_path.empty()) {
        const miriam::TaskSpec crit =
            miriam::load_profile(critical_path, miriam::Criticality::Critical);
        crit_profiles = profiles_of(crit);
    }
    miriam::CriticalProfile worst{0, 0};
    for (const auto& p : crit_profiles) {
        worst.n_blocks = std::max(worst.n_blocks, p.n_blocks);
        worst.block_threads = std::max(worst.block_threads, p.block_threads);
    }
    const miriam::OverheadParams ov;

    for (const auto& kernel : normal.kernels) {
        const auto kept = miriam::shrink_design_space(kernel, crit_profiles, gpu, ov);
        auto is_kept = [&](int g, int b) {
            for (const auto& sc : kept)
                if (!sc.fallback && sc.candidate.shard_grid_size == g &&
                    sc.candidate.elastic_block_size == b)
                    return true;
            return false;
        };
        const int raw = miriam::raw_candidate_count(kernel, gpu);
        const int n_kept = kept.size() == 1 && kept[0].fallback ? 0 : static_cast<int>(kept.size());
        std::cout << "kernel " << kernel.id << " M=" << kernel.grid_size
                  << " B=" << kernel.block_size << ": " << raw << " candidates, " << n_kept
                  << " kept, pruned fraction " << std::fixed << std::setprecision(3)
                  << (raw > 0 ? 1.0 - static_cast<double>(n_kept) / raw : 0.0) << "\n";
        std::cout << "  shard  block  shards  feasible  wiscore    oscore  kept\n";
        for (int g : miriam::slicing_plan(kernel.grid_size)) {
            for (int b : warp_multiples(kernel.block_size, gpu.warp_size)) {
                miriam::ElasticCandidate c{g, b, (kernel.grid_size + g - 1) / g};
                const bool feas = miriam::feasible(c, worst, gpu);
                double wi = 0.0;
                if (feas) {
                    if (crit_profiles.empty()) {
                        wi = miriam::wiscore(c, worst, gpu);
                    } else {
                        for (const auto& p : crit_profiles)
                            wi += miriam::feasible(c, p, gpu) ? miriam::wiscore(c, p, gpu) : 0.0;
                        wi /= static_cast<double>(crit_profiles.size());
                    }
                }
                const int os = miriam::oscore(c, ov.launch_overhead_per_shard, ov.baseline_launch,
                                              ov.max_blk_overhead, ov.max_pt_overhead);
                std::cout << "  " << std::setw(5) << g << "  " << std::setw(5) << b << "  "
                          << std::setw(6) << c.n_shards << "  " << std::setw(8)
                          << (feas ? "yes" : "no") << "  " << std::fixed << std::setprecision(6)
                          << wi << "  " << std::setw(6) << os << "  "
                          << (feas && is_kept(g, b) ? "*" : "") << "\n";
            }
        }
        if (kept.size() == 1 && kept[0].fallback)
            std::cout << "  (nothing feasible: falling back to the un-sliced original)\n";
    }
    return 0;
}

struct Cell {
    miriam::Policy policy;
    miriam::SimResult result;
};

void write_decision_log(const miriam::SimTrace& trace, const std::string& path) {
    std::ofstream out(path);
    out << std::fixed << std::setprecision(9);
    for (const auto& e : trace.events) {
        if (e.kind != miriam::TraceEvent::Kind::Dispatch) continue;
        out << "t=" << e.t << " event=dispatch dispatched=[(" << e.block_begin << ","
            << (e.block_end - e.block_begin) << "," << e.threads << ")]\n";
    }
}

int run_cells(const miriam::ExperimentConfig& cfg, int parallel, bool emit_files,
              const std::string& decision_log, bool compare_mode) {
    const miriam::Workload workload = cfg.make_workload();
    std::vector<Cell> cells;
    for (auto p : cfg.policies) cells.push_back({p, {}});

    std::vector<std::string> errors(cells.size());
    auto run_one = [&](std::size_t i) {
        try {
            cells[i].result = miriam::run(workload, cells[i].policy, cfg.gpu, cfg.model, cfg.seed);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    if (parallel <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            pool.emplace_back(run_one, i);
            if (static_cast<int>(pool.size()) == parallel) {
                for (auto& t : pool) t.join();
                pool.clear();
            }
        }
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (!errors[i].empty())
            throw SimFailure(miriam::policy_name(cells[i].policy) + ": " + errors[i]);

    if (emit_files) {
        std::filesystem::create_directories(cfg.out_dir);
        for (const auto& cell : cells) {
            const std::string base = cfg.out_dir + "/" + miriam::policy_name(cell.policy);
            miriam::export_metrics(cell.result.metrics, base + "-metrics.txt");
            miriam::export_trace(cell.result.trace, base + "-trace.txt");
            miriam::export_latency_cdf(cell.result.metrics, base + "-latency-cdf.txt");
            if (!decision_log.empty() && cell.policy == miriam::Policy::Miriam)
                write_decision_log(cell.result.trace, decision_log);
        }
    }

    const miriam::Metrics* seq = nullptr;
    for (const auto& cell : cells)
        if (cell.policy == miriam::Policy::Sequential) seq = &cell.result.metrics;

    std::cout << "workload " << cfg.workload_name << " seed " << cfg.seed << " gpu "
              << cfg.gpu_name << "\n";
    std::cout << std::left << std::setw(12) << "policy" << std::right << std::setw(14)
              << "crit_mean_ms" << std::setw(13) << "crit_p99_ms" << std::setw(12) << "thrpt_rps"
              << std::setw(11) << "occupancy";
    if (seq) std::cout << std::setw(12) << "lat_ratio" << std::setw(12) << "thr_ratio";
    std::cout << "\n";
    std::cout << std::fixed;
    for (const auto& cell : cells) {
        const auto& m = cell.result.metrics;
        std::cout << std::left << std::setw(12) << miriam::policy_name(cell.policy) << std::right
                  << std::setprecision(4) << std::setw(14) << m.critical_mean * 1e3
                  << std::setw(13) << m.critical_p99 * 1e3 << std::setw(12) << m.throughput
                  << std::setprecision(4) << std::setw(11) << m.achieved_occupancy;
        if (seq) {
            const double lat_ratio =
                seq->critical_mean > 0 ? m.critical_mean / seq->critical_mean : 0.0;
            const double thr_ratio = seq->throughput > 0 ? m.throughput / seq->throughput : 0.0;
            std::cout << std::setw(12) << lat_ratio << std::setw(12) << thr_ratio;
        }
        std::cout << "\n";
    }
    if (compare_mode && seq) {
        std::cout << "# columns: policy latency_ratio throughput_ratio occupancy\n";
        for (const auto& cell : cells) {
            const auto& m = cell.result.metrics;
            std::cout << miriam::policy_name(cell.policy) << " " << std::setprecision(6)
                      << (seq->critical_mean > 0 ? m.critical_mean / seq->critical_mean : 0.0)
                      << " " << (seq->throughput > 0 ? m.throughput / seq->throughput : 0.0) << " "
                      << m.achieved_occupancy << "\n";
        }
    }
    return 0;
}

int cmd_transform(const std::string& path, int m, int b, const std::string& mode_name,
                  bool verify, std::uint64_t seed) {
    const miriam::dsl::KernelFile kf = miriam::dsl::load_kernel_file(path);
    if (m <= 0) m = kf.default_m;
    if (b <= 0) b = kf.default_b;
    const auto mode = mode_name == "memory" ? miriam::dsl::IndexMode::Memory
                                            : miriam::dsl::IndexMode::Computation;
    const miriam::dsl::KernelAst elastic = miriam::dsl::elasticize(kf.ast, mode);
    std::cout << miriam::dsl::to_source(elastic);
    if (!verify) return 0;

    std::vector<std::vector<int>> plans;
    for (int s : miriam::slicing_plan(m)) {
        std::vector<int> plan;
        for (int start = 0; start < m; start += s) plan.push_back(std::min(s, m - start));
        plans.push_back(plan);
    }
    const auto inputs = miriam::dsl::make_random_inputs(kf.ast, kf.lengths(m, b), seed);
    const auto report = miriam::dsl::verify_equivalence(kf.ast, elastic, m, b, plans, inputs,
                                                        kf.scalars(m, b));
    for (const auto& e : report.entries)
        if (!e.pass)
            std::cerr << "mismatch: blocks/shard=" << e.plan[0] << " elastic_block="
                      << e.elastic_block_size << ": " << e.detail << "\n";
    std::cout << (report.all_pass ? "PASS" : "FAIL") << "\n";
    if (!report.all_pass) throw SimFailure("equivalence verification failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elastic-kernel mixed-criticality GPU scheduling simulator"};
    app.require_subcommand(1);

    std::string gpu_name = "rtx2060-like";
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;

    // plan
    auto* plan = app.add_subcommand("plan", "Score the elastic design space of a model profile");
    std::string plan_profile, plan_critical;
    plan->add_option("profile", plan_profile, "normal-task model profile")->required();
    plan->add_option("--critical", plan_critical, "co-running critical model profile");
    plan->add_option("--gpu", gpu_name, "GPU preset");

    // run
    auto* runc = app.add_subcommand("run", "Run an experiment config and write metrics");
    std::string run_config, decision_log;
    int parallel = 1;
    runc->add_option("config", run_config, "experiment config file")->required();
    runc->add_option("--gpu", gpu_name, "override GPU preset");
    runc->add_option("--seed", seed, "override seed")->each([&](const std::string&) {
        seed_set = true;
    });
    runc->add_option("--out", out_dir, "override output directory");
    runc->add_option("--parallel", parallel, "concurrent (workload, policy) cells");
    runc->add_option("--decision-log", decision_log, "coordinator decision log path");

    // transform
    auto* tr = app.add_subcommand("transform", "Elasticize a kernel source file");
    std::string kernel_path, mode_name = "computation";
    int tr_m = 0, tr_b = 0;
    bool verify = false;
    tr->add_option("kernel", kernel_path, "kernel source file")->required();
    tr->add_option("--m", tr_m, "logical grid size (default from file)");
    tr->add_option("--b", tr_b, "logical block size (default from file)");
    tr->add_option("--mode", mode_name, "computation|memory")
        ->check(CLI::IsMember({"computation", "memory"}));
    tr->add_flag("--verify", verify, "check elastic outputs against the original");
    tr->add_option("--seed", seed, "seed for generated inputs");

    // compare
    auto* cmp = app.add_subcommand("compare", "Run all configured policies, report ratios");
    std::string cmp_config;
    cmp->add_option("config", cmp_config, "experiment config file")->required();
    cmp->add_option("--gpu", gpu_name, "override GPU preset");
    cmp->add_option("--seed", seed, "override seed")->each([&](const std::string&) {
        seed_set = true;
    });
    cmp->add_option("--out", out_dir, "override output directory");
    cmp->add_option("--parallel", parallel, "concurrent cells");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (plan->parsed()) return cmd_plan(plan_profile, plan_critical, gpu_name);
        if (tr->parsed()) return cmd_transform(kernel_path, tr_m, tr_b, mode_name, verify, seed);

        const std::string config_path = runc->parsed() ? run_config : cmp_config;
        miriam::ExperimentConfig cfg = miriam::load_experiment_config(config_path);
        if (runc->parsed() ? runc->count("--gpu") > 0 : cmp->count("--gpu") > 0) {
            cfg.gpu_name = gpu_name;
            cfg.gpu = miriam::gpu_preset(gpu_name);
        }
        if (seed_set) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (cmp->parsed() && cfg.policies.size() < 2)
            throw std::runtime_error("compare needs at least two policies in the config");
        return run_cells(cfg, parallel, runc->parsed(), decision_log, cmp->parsed());
    } catch (const SimFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
