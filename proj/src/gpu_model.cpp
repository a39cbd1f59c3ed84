#include "miriam/gpu_model.hpp"

#include <algorithm>

namespace miriam {

void GpuSpec::validate() const {
    if (n_sm <= 0 || l_threads <= 0 || warp_size <= 0 || max_warps_per_sm <= 0 ||
        shared_mem_per_sm <= 0 || mem_bandwidth <= 0.0)
        throw std::invalid_argument("GpuSpec: all fields must be strictly positive");
    if (l_threads % warp_size != 0)
        throw std::invalid_argument("GpuSpec: l_threads must be a multiple of warp_size");
}

GpuSpec gpu_preset(const std::string& name) {
    if (name == "rtx2060-like") {
        GpuSpec g;
        g.n_sm = 34;
        g.l_threads = 1024;
        g.warp_size = 32;
        g.max_warps_per_sm = 32;
        g.shared_mem_per_sm = 64;
        g.mem_bandwidth = 4.0e9;
        return g;
    }
    if (name == "xavier-like") {
        GpuSpec g;
        g.n_sm = 8;
        g.l_threads = 2048;
        g.warp_size = 32;
        g.max_warps_per_sm = 64;
        g.shared_mem_per_sm = 96;
        g.mem_bandwidth = 1.5e9;
        return g;
    }
    throw std::invalid_argument("unknown GPU preset: " + name);
}

std::vector<std::string> gpu_preset_names() { return {"rtx2060-like", "xavier-like"}; }

void SmState::add_block(const ResidentBlock& b) {
    if (b.threads > free_threads_ || b.shmem > free_shmem_)
        throw std::logic_error("SmState::add_block: residency capacity exceeded");
    blocks_.push_back(b);
    free_threads_ -= b.threads;
    free_shmem_ -= b.shmem;
}

void SmState::remove_block(std::int64_t kernel_id, int block_id) {
    for (auto it = blocks_.begin(); it != blocks_.end(); ++it) {
        if (it->kernel_id == kernel_id && it->block_id == block_id) {
            free_threads_ += it->threads;
            free_shmem_ += it->shmem;
            blocks_.erase(it);
            return;
        }
    }
    throw std::logic_error("SmState::remove_block: block not resident");
}

int SmState::resident_thread_sum() const {
    int s = 0;
    for (const auto& b : blocks_) s += b.threads;
    return s;
}

bool can_accommodate(const SmState& sm, int threads, int shmem, const GpuSpec&) {
    if (threads < 1) throw std::invalid_argument("can_accommodate: threads >= 1 required");
    return sm.free_threads() >= threads && sm.free_shared_mem() >= shmem;
}

std::optional<int> select_sm(const std::vector<SmState>& sms, int threads, int shmem,
                             const GpuSpec& gpu) {
    int best = -1;
    int best_free = -1;
    for (int i = 0; i < static_cast<int>(sms.size()); ++i) {
        if (!can_accommodate(sms[i], threads, shmem, gpu)) continue;
        if (sms[i].free_threads() > best_free) {
            best_free = sms[i].free_threads();
            best = i;
        }
    }
    if (best < 0) return std::nullopt;
    return best;
}

}  // namespace miriam
