#include "miriam/coordinator.hpp"

#include <algorithm>

namespace miriam {

ShadedBinaryTree::ShadedBinaryTree(int grid_size, std::vector<int> admissible_sizes)
    : grid_size_(grid_size), admissible_(std::move(admissible_sizes)) {
    if (grid_size_ < 1) throw std::invalid_argument("ShadedBinaryTree: grid size >= 1 required");
    std::sort(admissible_.begin(), admissible_.end());
    admissible_.erase(std::unique(admissible_.begin(), admissible_.end()), admissible_.end());
    if (admissible_.empty() || admissible_.front() < 1)
        throw std::invalid_argument("ShadedBinaryTree: admissible sizes must be positive");
    min_size_ = admissible_.front();
    nodes_.push_back(Node{0, grid_size_});
}

bool ShadedBinaryTree::fully_retired() const {
    if (!fully_dispatched()) return false;
    for (const auto& l : leaves())
        if (l.status == Leaf::Status::Actual) return false;
    return true;
}

int ShadedBinaryTree::largest_admissible_at_cursor(int max_blocks) const {
    int best = 0;
    for (int s : admissible_) {
        if (s > max_blocks) break;
        if (cursor_ % s == 0 && cursor_ + s <= grid_size_) best = s;
    }
    return best;
}

int ShadedBinaryTree::find_or_split(int start, int count) {
    int idx = 0;
    for (;;) {
        Node& n = nodes_[idx];
        if (n.start == start && n.count == count) return idx;
        if (n.status != Leaf::Status::Virtual && !n.split)
            throw std::logic_error("ShadedBinaryTree: range already dispatched");
        if (!n.split) {
            if (n.count / 2 < min_size_)
                throw std::logic_error("ShadedBinaryTree: split below minimum shard size");
            const int node_start = n.start;
            const int node_count = n.count;
            const int half = node_count / 2;
            const int l = static_cast<int>(nodes_.size());
            nodes_.push_back(Node{node_start, half});
            nodes_.push_back(Node{node_start + half, node_count - half});
            Node& n2 = nodes_[idx];  // vector may have reallocated
            n2.split = true;
            n2.left = l;
            n2.right = l + 1;
        }
        const Node& cur = nodes_[idx];
        const Node& left = nodes_[cur.left];
        idx = (start < left.start + left.count) ? cur.left : cur.right;
        if (start + count > nodes_[idx].start + nodes_[idx].count)
            throw std::logic_error("ShadedBinaryTree: range not aligned to the dichotomy");
    }
}

void ShadedBinaryTree::mark_dispatched(int start, int count, int block_size) {
    if (start != cursor_)
        throw std::logic_error("ShadedBinaryTree: dispatch must start at the cursor");
    if (std::find(admissible_.begin(), admissible_.end(), count) == admissible_.end())
        throw std::logic_error("ShadedBinaryTree: shard size not admissible");
    const int idx = find_or_split(start, count);
    Node& n = nodes_[idx];
    if (n.split || n.status != Leaf::Status::Virtual)
        throw std::logic_error("ShadedBinaryTree: node not virtual");
    n.status = Leaf::Status::Actual;
    n.block_size = block_size;
    cursor_ += count;
}

void ShadedBinaryTree::mark_retired(int start, int count) {
    for (auto& n : nodes_) {
        if (n.start == start && n.count == count && !n.split &&
            n.status == Leaf::Status::Actual) {
            n.status = Leaf::Status::Retired;
            return;
        }
    }
    throw std::logic_error("ShadedBinaryTree: no matching actual shard to retire");
}

bool ShadedBinaryTree::merge_node(int idx) {
    Node& n = nodes_[idx];
    if (!n.split) return n.status == Leaf::Status::Virtual;
    const bool l = merge_node(n.left);
    const bool r = merge_node(n.right);
    if (l && r) {
        Node& n2 = nodes_[idx];
        n2.split = false;
        n2.left = n2.right = -1;
        n2.status = Leaf::Status::Virtual;
        return true;
    }
    return false;
}

void ShadedBinaryTree::merge_virtual() { merge_node(0); }

void ShadedBinaryTree::collect_leaves(int idx, std::vector<Leaf>& out) const {
    const Node& n = nodes_[idx];
    if (n.split) {
        collect_leaves(n.left, out);
        collect_leaves(n.right, out);
        return;
    }
    out.push_back(Leaf{n.start, n.count, n.status, n.block_size});
}

std::vector<ShadedBinaryTree::Leaf> ShadedBinaryTree::leaves() const {
    std::vector<Leaf> out;
    collect_leaves(0, out);
    return out;
}

void ShadedBinaryTree::check_invariants() const {
    const auto ls = leaves();
    int pos = 0;
    for (const auto& l : ls) {
        if (l.start != pos) throw std::logic_error("tree leaves do not partition the grid");
        if (l.start < cursor_) {
            if (l.status == Leaf::Status::Virtual)
                throw std::logic_error("virtual leaf before the cursor");
        } else {
            if (l.status != Leaf::Status::Virtual)
                throw std::logic_error("dispatched leaf after the cursor");
        }
        pos += l.count;
    }
    if (pos != grid_size_) throw std::logic_error("tree leaves do not cover the grid");
}

// ---- Coordinator ----

ShadedBinaryTree Coordinator::build_tree(const KernelSpec& kernel,
                                         const std::vector<ScoredCandidate>& candidates) {
    if (candidates.empty())
        throw std::invalid_argument("build_tree: candidate set must be non-empty");
    const auto plan = slicing_plan(kernel.grid_size);
    std::vector<int> sizes;
    for (const auto& c : candidates) {
        if (std::find(plan.begin(), plan.end(), c.candidate.shard_grid_size) != plan.end())
            sizes.push_back(c.candidate.shard_grid_size);
    }
    if (sizes.empty()) sizes.push_back(kernel.grid_size);
    return ShadedBinaryTree(kernel.grid_size, sizes);
}

void Coordinator::enqueue_normal_kernel(std::int64_t kernel_id, const KernelSpec& kernel,
                                        const std::vector<ScoredCandidate>& candidates) {
    queue_.push_back(PendingKernel{kernel_id, kernel, candidates, build_tree(kernel, candidates)});
}

const ShadedBinaryTree* Coordinator::head_tree() const {
    return queue_.empty() ? nullptr : &queue_.front().tree;
}

int Coordinator::pick_block_size(const PendingKernel& k, int shard_size, int max_threads) const {
    // Highest-combined-score candidate with this shard size that fits;
    // candidate lists are already sorted by score.
    for (const auto& c : k.candidates) {
        if (c.candidate.shard_grid_size == shard_size &&
            c.candidate.elastic_block_size <= max_threads)
            return c.candidate.elastic_block_size;
    }
    // No scored candidate fits: fall back to the largest warp multiple.
    const int cap = std::min(max_threads, k.spec.block_size);
    const int w = gpu_.warp_size;
    if (cap >= k.spec.block_size) return k.spec.block_size;
    return (cap / w) * w;
}

std::vector<ShardDispatch> Coordinator::select_shards(
    const std::optional<CriticalProfile>& resident) {
    std::vector<ShardDispatch> out;
    while (!queue_.empty()) {
        PendingKernel& head = queue_.front();
        if (head.tree.fully_retired()) {
            completed_.push_back(head.id);
            queue_.pop_front();
            continue;
        }
        if (head.tree.fully_dispatched()) break;  // stream FIFO: wait for retires

        if (!resident) {
            // Solo case: allocate all available resources to the normal
            // kernel, largest shards, full-width blocks.
            while (head.tree.remaining() > 0) {
                const int s = head.tree.largest_admissible_at_cursor(head.tree.remaining());
                if (s == 0) break;
                const int bs = head.spec.block_size;
                out.push_back({head.id, head.tree.cursor(), s, bs});
                head.tree.mark_dispatched(head.tree.cursor(), s, bs);
                outstanding_blocks_ += s;
            }
            break;
        }

        const int free_sms = gpu_.n_sm - resident->n_blocks % gpu_.n_sm;
        const int free_threads = gpu_.l_threads - resident->block_threads;
        if (free_threads < 1) break;
        int budget = free_sms - outstanding_blocks_;
        while (budget > 0 && head.tree.remaining() > 0) {
            const int s = head.tree.largest_admissible_at_cursor(budget);
            if (s == 0) break;
            const int bs = pick_block_size(head, s, free_threads);
            if (bs < 1) break;
            out.push_back({head.id, head.tree.cursor(), s, bs});
            head.tree.mark_dispatched(head.tree.cursor(), s, bs);
            outstanding_blocks_ += s;
            budget -= s;
        }
        break;
    }
    return out;
}

std::vector<ShardDispatch> Coordinator::on_normal_arrival(
    const std::optional<CriticalProfile>& resident) {
    return select_shards(resident);
}

std::vector<ShardDispatch> Coordinator::on_critical_arrival(const CriticalProfile& resident) {
    // In-flight shards run to completion; future selections shrink to the
    // Eq-bounded sizes automatically. Pad leftover resources right away.
    return select_shards(resident);
}

std::vector<ShardDispatch> Coordinator::on_critical_retire(
    const std::optional<CriticalProfile>& resident) {
    if (!queue_.empty()) queue_.front().tree.merge_virtual();
    return select_shards(resident);
}

std::vector<ShardDispatch> Coordinator::on_shard_retire(
    std::int64_t kernel_id, int start, int count,
    const std::optional<CriticalProfile>& resident) {
    if (queue_.empty() || queue_.front().id != kernel_id)
        throw std::logic_error("on_shard_retire: shard does not belong to the head kernel");
    queue_.front().tree.mark_retired(start, count);
    outstanding_blocks_ -= count;
    return select_shards(resident);
}

std::vector<std::int64_t> Coordinator::take_completed() {
    auto out = std::move(completed_);
    completed_.clear();
    return out;
}

}  // namespace miriam
