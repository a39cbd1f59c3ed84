#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "miriam/gpu_model.hpp"

namespace miriam {

enum class Criticality { Critical, Normal };

struct KernelSpec {
    std::string id;
    int grid_size = 0;          // M, thread blocks
    int block_size = 0;         // threads per block
    double work_per_thread = 0; // abstract work units
    double mem_intensity = 0;   // fraction of work that is memory-bound
    int shmem_per_block = 0;

    void validate() const;
};

struct TaskSpec {
    std::string name;
    std::vector<KernelSpec> kernels;  // executed FIFO within the task's stream
    Criticality criticality = Criticality::Normal;
};

enum class ArrivalKind { Uniform, Poisson, ClosedLoop };

struct ArrivalPattern {
    ArrivalKind kind = ArrivalKind::ClosedLoop;
    double rate = 0.0;  // requests per second; unused for closed_loop
};

struct TraceRequest {
    double time = 0.0;
    Criticality criticality = Criticality::Normal;
};

struct Workload {
    TaskSpec critical_task;
    ArrivalPattern critical_pattern;
    TaskSpec normal_task;
    ArrivalPattern normal_pattern;
    double duration = 10.0;  // simulated seconds
    std::uint64_t seed = 1;
    // When non-empty, explicit arrivals override the patterns.
    std::vector<TraceRequest> explicit_arrivals;
};

/// Arrival times for one pattern. Closed-loop patterns return an empty
/// list; the simulator re-issues on completion.
std::vector<double> generate_arrivals(const ArrivalPattern& pattern, double duration,
                                      std::uint64_t seed);

/// Parse a model profile file (key-value blocks, one kernel per [kernel]
/// section). Throws std::runtime_error with a line number on bad input.
TaskSpec load_profile(const std::string& path, Criticality crit);

/// MDTB workload A-D assembled from the profile files in `profile_dir`.
Workload build_mdtb(char id, const std::string& profile_dir);

/// Load an arrival trace: `<arrival_seconds> <critical|normal>` per line.
/// Task shapes come from the two given profiles.
Workload load_trace(const std::string& path, const TaskSpec& critical_task,
                    const TaskSpec& normal_task);

}  // namespace miriam
