#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace miriam {

/// Modeled GPU device parameters.
struct GpuSpec {
    int n_sm = 0;                 // streaming multiprocessors
    int l_threads = 0;            // max concurrent working threads per SM
    int warp_size = 32;           // threads per warp
    int max_warps_per_sm = 0;     // warp slots per SM (independent cap)
    int shared_mem_per_sm = 0;    // shared-memory capacity units
    double mem_bandwidth = 0.0;   // memory-work units per second, GPU-wide

    void validate() const;
};

// Built-in presets. Thread/warp limits for the Xavier-like preset are
// conventional values, not measured ones; override via config if needed.
GpuSpec gpu_preset(const std::string& name);
std::vector<std::string> gpu_preset_names();

struct ResidentBlock {
    std::int64_t kernel_id = 0;
    int block_id = 0;
    int threads = 0;
    int shmem = 0;
};

/// Residency state of one SM. Derived free counts are kept in sync with
/// the resident list.
class SmState {
public:
    SmState() = default;
    explicit SmState(const GpuSpec& gpu)
        : free_threads_(gpu.l_threads), free_shmem_(gpu.shared_mem_per_sm) {}

    int free_threads() const { return free_threads_; }
    int free_shared_mem() const { return free_shmem_; }
    const std::vector<ResidentBlock>& resident_blocks() const { return blocks_; }

    void add_block(const ResidentBlock& b);
    void remove_block(std::int64_t kernel_id, int block_id);
    int resident_thread_sum() const;

private:
    std::vector<ResidentBlock> blocks_;
    int free_threads_ = 0;
    int free_shmem_ = 0;
};

/// True iff the SM has room for a block of `threads` threads and `shmem`
/// shared-memory units.
bool can_accommodate(const SmState& sm, int threads, int shmem, const GpuSpec& gpu);

/// Least-loaded placement: accommodating SM with maximum free threads,
/// lowest index on ties. nullopt means the block waits in the FIFO queue.
std::optional<int> select_sm(const std::vector<SmState>& sms, int threads, int shmem,
                             const GpuSpec& gpu);

}  // namespace miriam
