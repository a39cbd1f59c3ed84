#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miriam/coordinator.hpp"
#include "miriam/gpu_model.hpp"
#include "miriam/workload.hpp"

namespace miriam {

enum class Policy { Sequential, Multistream, InterStreamBarrier, Miriam };

Policy policy_from_string(const std::string& s);
std::string policy_name(Policy p);

struct ContentionModel {
    double sm_throughput = 1.0e9;      // thread-work units per second per SM
    double mem_bandwidth = 0.0;        // 0 = take the GpuSpec value
    double launch_overhead = 15e-6;    // per kernel/shard launch, seconds
    double coordinator_overhead = 50e-6;  // per shard-selection decision
    double max_shard_overhead = 0.35e-3;  // OScore budget (both channels)
    int ib_group = 2;                  // normal kernels per inter-stream barrier

    void validate() const;
};

struct TraceEvent {
    enum class Kind { Arrival, Dispatch, Retire, KernelRetire } kind;
    double t = 0.0;
    std::int64_t task = 0;    // request id
    std::int64_t kernel = 0;  // kernel instance id (-1 for arrivals)
    int block_begin = 0;      // [begin, end)
    int block_end = 0;
    int sm = -1;
    int threads = 0;  // resident threads of the block (not serialized)
};

struct RequestRecord {
    std::int64_t id = 0;
    Criticality criticality = Criticality::Normal;
    double arrival = 0.0;
    double start = -1.0;
    double completion = -1.0;
    bool completed = false;
};

struct SimTrace {
    std::vector<TraceEvent> events;
    std::vector<RequestRecord> requests;
};

struct Metrics {
    std::vector<double> critical_latencies;  // sorted ascending
    double critical_mean = 0.0;
    double critical_p50 = 0.0;
    double critical_p99 = 0.0;
    std::int64_t completed_critical = 0;
    std::int64_t completed_normal = 0;
    double throughput = 0.0;          // completed requests per second, both queues
    double achieved_occupancy = 0.0;  // [0,1]
};

struct SimResult {
    SimTrace trace;
    Metrics metrics;
};

/// Service time of one resident block under fixed residency (the engine
/// re-evaluates this piecewise at every residency change).
double block_service_time(int threads, double work_per_thread, double mem_intensity,
                          const SmState& sm, double demand_share, const GpuSpec& gpu,
                          const ContentionModel& model);

/// Deterministic discrete-event execution of a workload under one policy.
SimResult run(const Workload& workload, Policy policy, const GpuSpec& gpu,
              const ContentionModel& model, std::uint64_t seed);

/// Time-weighted mean of (resident threads / warp) / max_warps over SMs
/// with at least one resident block.
double achieved_occupancy(const SimTrace& trace, const GpuSpec& gpu);

void export_latency_cdf(const Metrics& metrics, const std::string& path);
void export_trace(const SimTrace& trace, const std::string& path);
void export_metrics(const Metrics& metrics, const std::string& path);

}  // namespace miriam
