#include "miriam/planner.hpp"

#include <algorithm>
#include <cmath>

namespace miriam {

std::vector<int> slicing_plan(int m) {
    if (m < 1) throw std::invalid_argument("slicing_plan: M >= 1 required");
    int n = 0;
    while (m % (1 << (n + 1)) == 0) ++n;
    std::vector<int> sizes;
    for (int i = n; i >= 0; --i) sizes.push_back(m / (1 << i));
    return sizes;
}

bool feasible(const ElasticCandidate& c, const CriticalProfile& crit, const GpuSpec& gpu) {
    if (c.shard_grid_size < 1 || c.elastic_block_size < 1)
        throw std::invalid_argument("feasible: candidate sizes must be >= 1");
    const int free_sms = gpu.n_sm - (crit.n_blocks % gpu.n_sm);
    const int free_threads = gpu.l_threads - crit.block_threads;
    return c.shard_grid_size <= free_sms && c.elastic_block_size <= free_threads;
}

double wiscore(const ElasticCandidate& c, const CriticalProfile& crit, const GpuSpec& gpu) {
    if (!feasible(c, crit, gpu))
        throw std::invalid_argument("wiscore: candidate is infeasible against profile");
    const double grid_factor =
        static_cast<double>(crit.n_blocks % gpu.n_sm + c.shard_grid_size) / gpu.n_sm;
    const double thread_factor =
        static_cast<double>(crit.block_threads + c.elastic_block_size) / gpu.l_threads;
    return std::clamp(grid_factor * thread_factor, 0.0, 1.0);
}

int oscore(const ElasticCandidate& c, double launch_overhead_per_shard,
           double baseline_launch, double max_blk_overhead, double max_pt_overhead) {
    if (launch_overhead_per_shard < 0 || baseline_launch < 0 || max_blk_overhead < 0 ||
        max_pt_overhead < 0)
        throw std::invalid_argument("oscore: times must be >= 0");
    const double lo = c.n_shards * launch_overhead_per_shard - baseline_launch;
    return (lo < max_blk_overhead && lo < max_pt_overhead) ? 1 : 0;
}

namespace {

std::vector<int> elastic_block_sizes(int original_block, int warp) {
    std::vector<int> sizes;
    for (int s = warp; s <= original_block; s += warp) sizes.push_back(s);
    if (sizes.empty() || sizes.back() != original_block) sizes.push_back(original_block);
    return sizes;
}

}  // namespace

int raw_candidate_count(const KernelSpec& kernel, const GpuSpec& gpu) {
    return static_cast<int>(slicing_plan(kernel.grid_size).size() *
                            elastic_block_sizes(kernel.block_size, gpu.warp_size).size());
}

std::vector<ScoredCandidate> shrink_design_space(const KernelSpec& kernel,
                                                 const std::vector<CriticalProfile>& crit_profiles,
                                                 const GpuSpec& gpu,
                                                 const OverheadParams& ov) {
    kernel.validate();
    const auto shard_sizes = slicing_plan(kernel.grid_size);
    const auto block_sizes = elastic_block_sizes(kernel.block_size, gpu.warp_size);

    CriticalProfile worst{0, 0};
    for (const auto& p : crit_profiles) {
        worst.n_blocks = std::max(worst.n_blocks, p.n_blocks);
        worst.block_threads = std::max(worst.block_threads, p.block_threads);
    }

    std::vector<ScoredCandidate> scored;
    int raw = 0;
    for (int g : shard_sizes) {
        for (int b : block_sizes) {
            ++raw;
            ElasticCandidate c{g, b, (kernel.grid_size + g - 1) / g};
            if (!feasible(c, worst, gpu)) continue;
            const int os = oscore(c, ov.launch_overhead_per_shard, ov.baseline_launch,
                                  ov.max_blk_overhead, ov.max_pt_overhead);
            double wsum = 0.0;
            if (crit_profiles.empty()) {
                wsum = wiscore(c, worst, gpu);
            } else {
                for (const auto& p : crit_profiles)
                    wsum += feasible(c, p, gpu) ? wiscore(c, p, gpu) : 0.0;
                wsum /= static_cast<double>(crit_profiles.size());
            }
            ScoredCandidate sc;
            sc.candidate = c;
            sc.wiscore = wsum;
            sc.oscore = os;
            sc.combined = wsum * os;
            scored.push_back(sc);
        }
    }

    if (scored.empty()) {
        // Nothing fits next to the worst-case critical kernel; fall back to
        // the un-sliced original and flag it.
        ScoredCandidate sc;
        sc.candidate = {kernel.grid_size, kernel.block_size, 1};
        sc.fallback = true;
        return {sc};
    }

    std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.combined != b.combined) return a.combined > b.combined;
        if (a.candidate.shard_grid_size != b.candidate.shard_grid_size)
            return a.candidate.shard_grid_size < b.candidate.shard_grid_size;
        return a.candidate.elastic_block_size < b.candidate.elastic_block_size;
    });

    const int keep = std::max(1, raw / 5);
    if (static_cast<int>(scored.size()) > keep) scored.resize(keep);
    return scored;
}

}  // namespace miriam
