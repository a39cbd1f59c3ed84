#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>

#include "miriam/planner.hpp"

namespace miriam {

/// Dyadic shard tree over the M logical blocks of one normal kernel.
/// Nodes are virtual until dispatched; "shading" (the elastic block size)
/// is chosen per dispatch. Dispatch always proceeds from the head of the
/// un-dispatched range, so splitting and re-merging stay local.
class ShadedBinaryTree {
public:
    ShadedBinaryTree(int grid_size, std::vector<int> admissible_sizes);

    int grid_size() const { return grid_size_; }
    /// First logical block not yet dispatched.
    int cursor() const { return cursor_; }
    int remaining() const { return grid_size_ - cursor_; }
    bool fully_dispatched() const { return cursor_ == grid_size_; }
    bool fully_retired() const;
    const std::vector<int>& admissible_sizes() const { return admissible_; }

    /// Largest admissible node size at the cursor, capped by max_blocks.
    /// 0 when nothing fits.
    int largest_admissible_at_cursor(int max_blocks) const;

    void mark_dispatched(int start, int count, int block_size);
    void mark_retired(int start, int count);
    /// Re-merge sibling virtual shards into the largest admissible node
    /// (frontier re-expansion after a critical kernel retires).
    void merge_virtual();

    /// Throws std::logic_error if the partition/coverage invariants do not
    /// hold: leaf ranges must partition [0, M), everything before the
    /// cursor dispatched or retired, everything after it virtual.
    void check_invariants() const;

    struct Leaf {
        int start;
        int count;
        enum class Status { Virtual, Actual, Retired } status;
        int block_size;  // shading; 0 while virtual
    };
    std::vector<Leaf> leaves() const;

private:
    struct Node {
        int start;
        int count;
        Leaf::Status status = Leaf::Status::Virtual;
        int block_size = 0;
        int left = -1;
        int right = -1;
        bool split = false;
    };

    int find_or_split(int start, int count);
    bool merge_node(int idx);
    void collect_leaves(int idx, std::vector<Leaf>& out) const;

    int grid_size_;
    std::vector<int> admissible_;  // ascending
    int min_size_;
    int cursor_ = 0;
    std::vector<Node> nodes_;
};

struct ShardDispatch {
    std::int64_t kernel_id = 0;
    int start = 0;
    int count = 0;       // N_blk_be of this shard
    int block_size = 0;  // S_blk_be
};

/// Runtime coordinator: FIFO queue of normal kernels, each with its
/// shrunk candidate set and shard tree; greedy selection that pads the
/// leftover resources of resident critical kernels.
class Coordinator {
public:
    explicit Coordinator(const GpuSpec& gpu) : gpu_(gpu) {}

    void enqueue_normal_kernel(std::int64_t kernel_id, const KernelSpec& kernel,
                               const std::vector<ScoredCandidate>& candidates);

    std::vector<ShardDispatch> on_normal_arrival(const std::optional<CriticalProfile>& resident);
    std::vector<ShardDispatch> on_critical_arrival(const CriticalProfile& resident);
    std::vector<ShardDispatch> on_critical_retire(const std::optional<CriticalProfile>& resident);
    /// Retire one shard of the head kernel; returns follow-up dispatches.
    std::vector<ShardDispatch> on_shard_retire(std::int64_t kernel_id, int start, int count,
                                               const std::optional<CriticalProfile>& resident);

    /// Kernel ids that completed (all blocks retired) since the last call.
    std::vector<std::int64_t> take_completed();

    bool idle() const { return queue_.empty(); }
    int outstanding_blocks() const { return outstanding_blocks_; }
    const ShadedBinaryTree* head_tree() const;

    static ShadedBinaryTree build_tree(const KernelSpec& kernel,
                                       const std::vector<ScoredCandidate>& candidates);

private:
    struct PendingKernel {
        std::int64_t id;
        KernelSpec spec;
        std::vector<ScoredCandidate> candidates;
        ShadedBinaryTree tree;
    };

    std::vector<ShardDispatch> select_shards(const std::optional<CriticalProfile>& resident);
    int pick_block_size(const PendingKernel& k, int shard_size, int max_threads) const;

    GpuSpec gpu_;
    std::deque<PendingKernel> queue_;
    int outstanding_blocks_ = 0;
    std::vector<std::int64_t> completed_;
};

}  // namespace miriam
