#pragma once

#include <vector>

#include "miriam/gpu_model.hpp"
#include "miriam/workload.hpp"

namespace miriam {

/// One (shard grid size, elastic block size) implementation pattern.
struct ElasticCandidate {
    int shard_grid_size = 0;    // blocks per dispatched elastic shard
    int elastic_block_size = 0; // working threads per elastic block
    int n_shards = 0;           // shards covering the full grid M
};

/// Grid/block footprint of a co-running critical kernel.
struct CriticalProfile {
    int n_blocks = 0;      // N_blk_rt
    int block_threads = 0; // S_blk_rt
};

struct ScoredCandidate {
    ElasticCandidate candidate;
    double wiscore = 0.0;
    int oscore = 0;
    double combined = 0.0;
    bool fallback = false;  // un-sliced original returned because nothing was feasible
};

struct OverheadParams {
    double launch_overhead_per_shard = 15e-6;  // seconds
    double baseline_launch = 15e-6;
    double max_blk_overhead = 0.35e-3;
    double max_pt_overhead = 0.35e-3;
};

/// Dyadic slicing plan (M/2^n, ..., M), n = max{i : M mod 2^i = 0}.
std::vector<int> slicing_plan(int m);

/// Resource-balance feasibility of a candidate against a critical profile.
bool feasible(const ElasticCandidate& c, const CriticalProfile& crit, const GpuSpec& gpu);

/// Workload-imbalance score in [0,1]. Rejects infeasible candidates.
double wiscore(const ElasticCandidate& c, const CriticalProfile& crit, const GpuSpec& gpu);

/// Binary launch-overhead acceptability: 1 iff the summed extra launch
/// cost stays below both budget constants.
int oscore(const ElasticCandidate& c, double launch_overhead_per_shard,
           double baseline_launch, double max_blk_overhead, double max_pt_overhead);

/// Enumerate shard sizes x elastic block sizes, drop candidates infeasible
/// against the worst-case profile, score the rest by mean WIScore*OScore
/// over all profiles, and keep the top 20% (floor of one).
std::vector<ScoredCandidate> shrink_design_space(const KernelSpec& kernel,
                                                 const std::vector<CriticalProfile>& crit_profiles,
                                                 const GpuSpec& gpu,
                                                 const OverheadParams& overhead);

/// Raw candidate count for the same enumeration (for reports).
int raw_candidate_count(const KernelSpec& kernel, const GpuSpec& gpu);

}  // namespace miriam
