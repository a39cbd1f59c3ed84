#include "miriam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace miriam {

Policy policy_from_string(const std::string& s) {
    if (s == "sequential") return Policy::Sequential;
    if (s == "multistream") return Policy::Multistream;
    if (s == "ib") return Policy::InterStreamBarrier;
    if (s == "miriam") return Policy::Miriam;
    throw std::invalid_argument("unknown policy: " + s);
}

std::string policy_name(Policy p) {
    switch (p) {
        case Policy::Sequential: return "sequential";
        case Policy::Multistream: return "multistream";
        case Policy::InterStreamBarrier: return "ib";
        case Policy::Miriam: return "miriam";
    }
    return "?";
}

void ContentionModel::validate() const {
    if (sm_throughput <= 0 || launch_overhead < 0 || coordinator_overhead < 0 ||
        max_shard_overhead <= 0 || ib_group < 1 || mem_bandwidth < 0)
        throw std::invalid_argument("ContentionModel: invalid parameter");
}

double block_service_time(int threads, double work_per_thread, double mem_intensity,
                          const SmState& sm, double demand_share, const GpuSpec& gpu,
                          const ContentionModel& model) {
    const double total = static_cast<double>(threads) * work_per_thread;
    const double thread_share =
        static_cast<double>(threads) / static_cast<double>(sm.resident_thread_sum());
    const double bw = model.mem_bandwidth > 0 ? model.mem_bandwidth : gpu.mem_bandwidth;
    const double compute = total * (1.0 - mem_intensity) / (model.sm_throughput * thread_share);
    const double mem_work = total * mem_intensity;
    const double memory = mem_work > 0 ? mem_work / (bw * demand_share) : 0.0;
    return std::max(compute, memory);
}

namespace {

struct Event {
    double t;
    int pri;  // retire(0) < dispatch/launch(1) < arrival(2)
    std::int64_t seq;
    enum class Type { RetireCheck, LaunchReady, Arrival } type;
    std::int64_t a = 0;  // payload: generation / instance id / request id

    bool operator>(const Event& o) const {
        if (t != o.t) return t > o.t;
        if (pri != o.pri) return pri > o.pri;
        return seq > o.seq;
    }
};

struct Request {
    std::int64_t id;
    Criticality crit;
    double arrival;
    const TaskSpec* task;
    int kernels_done = 0;
    double start = -1.0;
};

struct Instance {
    std::int64_t id;
    std::int64_t request_id;
    Criticality crit;
    int grid;
    int block_threads;
    double mem_intensity;
    int shmem;
    double block_total_work;  // logical threads x work per thread
    int kernel_index;         // index within the task's kernel sequence
    int retired = 0;
    bool launched = false;
    // miriam shard bookkeeping
    bool is_shard = false;
    std::int64_t coord_kernel_id = -1;
    int shard_start = 0;
};

struct ActiveBlock {
    std::int64_t inst;
    int block_id;
    int sm;
    int threads;
    double rc, rm;
    double demand;
    double total;
};

struct PendingBlock {
    std::int64_t inst;
    int block_id;
};

class Engine {
public:
    Engine(const Workload& w, Policy policy, const GpuSpec& gpu, const ContentionModel& model,
           std::uint64_t seed)
        : w_(w), policy_(policy), gpu_(gpu), model_(model), seed_(seed), coordinator_(gpu) {
        gpu_.validate();
        model_.validate();
        bw_ = model_.mem_bandwidth > 0 ? model_.mem_bandwidth : gpu_.mem_bandwidth;
        sms_.assign(gpu_.n_sm, SmState(gpu_));
        if (policy_ == Policy::Miriam) prepare_candidates();
    }

    SimResult run_all() {
        seed_arrivals();
        while (!events_.empty()) {
            const Event ev = events_.top();
            events_.pop();
            if (ev.type == Event::Type::RetireCheck && ev.a != retire_generation_) continue;
            advance_progress(ev.t);
            now_ = ev.t;
            switch (ev.type) {
                case Event::Type::Arrival: handle_arrival(ev.a); break;
                case Event::Type::LaunchReady: handle_launch_ready(ev.a); break;
                case Event::Type::RetireCheck: handle_retires(); break;
            }
            try_dispatch();
            pump();
            try_dispatch();
            schedule_retire_check();
        }
        finalize_metrics();
        return std::move(result_);
    }

private:
    // ---- setup ----

    void prepare_candidates() {
        std::vector<CriticalProfile> profiles;
        for (const auto& k : w_.critical_task.kernels)
            profiles.push_back({k.grid_size, k.block_size});
        OverheadParams ov;
        ov.launch_overhead_per_shard = model_.launch_overhead;
        ov.baseline_launch = model_.launch_overhead;
        ov.max_blk_overhead = model_.max_shard_overhead;
        ov.max_pt_overhead = model_.max_shard_overhead;
        for (const auto& k : w_.normal_task.kernels)
            candidates_.push_back(shrink_design_space(k, profiles, gpu_, ov));
    }

    void seed_arrivals() {
        if (!w_.explicit_arrivals.empty()) {
            for (const auto& a : w_.explicit_arrivals) make_request(a.criticality, a.time);
            return;
        }
        auto seed_stream = [&](const ArrivalPattern& p, Criticality c, std::uint64_t salt) {
            if (p.kind == ArrivalKind::ClosedLoop) {
                make_request(c, 0.0);
                return;
            }
            for (double t : generate_arrivals(p, w_.duration, seed_ ^ salt)) make_request(c, t);
        };
        seed_stream(w_.critical_pattern, Criticality::Critical, 0x9e3779b97f4a7c15ull);
        seed_stream(w_.normal_pattern, Criticality::Normal, 0xc2b2ae3d27d4eb4full);
    }

    void make_request(Criticality c, double t) {
        Request r;
        r.id = static_cast<std::int64_t>(requests_.size());
        r.crit = c;
        r.arrival = t;
        r.task = c == Criticality::Critical ? &w_.critical_task : &w_.normal_task;
        requests_.push_back(r);
        result_.trace.requests.push_back(
            {r.id, c, t, -1.0, -1.0, false});
        push_event(t, 2, Event::Type::Arrival, r.id);
    }

    void push_event(double t, int pri, Event::Type type, std::int64_t a) {
        events_.push(Event{t, pri, next_seq_++, type, a});
    }

    // ---- piecewise-linear progress ----

    double total_mem_demand() const {
        double d = 0;
        for (const auto& [id, b] : active_) {
            if (b.rm > 1e-12) d += b.demand;
        }
        return d;
    }

    void advance_progress(double to) {
        const double dt = to - last_update_;
        if (dt > 0 && !active_.empty()) {
            const double demand = total_mem_demand();
            for (auto& [id, b] : active_) {
                const double eps = 1e-9 * (b.total + 1.0);
                if (b.rc > 0) {
                    const int ts = sms_[b.sm].resident_thread_sum();
                    const double rate = model_.sm_throughput * b.threads / ts;
                    b.rc = std::max(0.0, b.rc - rate * dt);
                    if (b.rc <= eps) b.rc = 0.0;
                }
                if (b.rm > 0 && demand > 0) {
                    const double rate = bw_ * b.demand / demand;
                    b.rm = std::max(0.0, b.rm - rate * dt);
                    if (b.rm <= eps) b.rm = 0.0;
                }
            }
        }
        last_update_ = to;
    }

    // Earliest channel drain across all blocks. Rates are only valid until
    // the first channel empties (shares shift), so that is the next event.
    double next_finish() const {
        double best = std::numeric_limits<double>::infinity();
        const double demand = total_mem_demand();
        for (const auto& [id, b] : active_) {
            if (b.rc <= 0 && b.rm <= 0) return 0.0;  // zero-work block retires now
            if (b.rc > 0) {
                const int ts = sms_[b.sm].resident_thread_sum();
                best = std::min(best, b.rc * ts / (model_.sm_throughput * b.threads));
            }
            if (b.rm > 0 && demand > 0) best = std::min(best, b.rm * demand / (bw_ * b.demand));
        }
        return best;
    }

    void schedule_retire_check() {
        if (active_.empty()) return;
        const double f = next_finish();
        ++retire_generation_;
        push_event(last_update_ + f, 0, Event::Type::RetireCheck, retire_generation_);
    }

    // ---- dispatch ----

    void try_dispatch() {
        // Critical blocks go first; strict FIFO within each class, no bypass.
        while (!pending_critical_.empty() && place_block(pending_critical_.front()))
            pending_critical_.pop_front();
        if (!pending_critical_.empty()) return;
        while (!pending_normal_.empty() && place_block(pending_normal_.front()))
            pending_normal_.pop_front();
    }

    bool place_block(const PendingBlock& pb) {
        Instance& inst = instances_.at(pb.inst);
        const auto sm = select_sm(sms_, inst.block_threads, inst.shmem, gpu_);
        if (!sm) return false;
        sms_[*sm].add_block({inst.id, pb.block_id, inst.block_threads, inst.shmem});
        ActiveBlock b;
        b.inst = inst.id;
        b.block_id = pb.block_id;
        b.sm = *sm;
        b.threads = inst.block_threads;
        b.total = inst.block_total_work;
        b.rc = b.total * (1.0 - inst.mem_intensity);
        b.rm = b.total * inst.mem_intensity;
        b.demand = std::max(b.rm, 1e-12);
        active_[key(inst.id, pb.block_id)] = b;
        trace(TraceEvent::Kind::Dispatch, inst.request_id, inst.id, pb.block_id, pb.block_id + 1,
              *sm, inst.block_threads);
        return true;
    }

    static std::int64_t key(std::int64_t inst, int block) { return inst * 100000 + block; }

    // ---- event handlers ----

    void handle_arrival(std::int64_t request_id) {
        Request& r = requests_[request_id];
        trace(TraceEvent::Kind::Arrival, r.id, -1, 0, 0, -1, 0);
        if (r.crit == Criticality::Critical) crit_queue_.push_back(r.id);
        else norm_queue_.push_back(r.id);
    }

    void handle_launch_ready(std::int64_t inst_id) {
        Instance& inst = instances_.at(inst_id);
        inst.launched = true;
        auto& q = inst.crit == Criticality::Critical ? pending_critical_ : pending_normal_;
        for (int b = 0; b < inst.grid; ++b) q.push_back({inst.id, b});
        if (policy_ == Policy::Miriam && inst.crit == Criticality::Critical)
            coordinator_dispatch(coordinator_.on_critical_arrival(*resident_profile()));
    }

    void handle_retires() {
        std::vector<std::int64_t> done;
        for (auto& [k, b] : active_) {
            if (b.rc <= 0.0 && b.rm <= 0.0) done.push_back(k);
        }
        for (std::int64_t k : done) {
            const ActiveBlock b = active_.at(k);
            active_.erase(k);
            Instance& inst = instances_.at(b.inst);
            sms_[b.sm].remove_block(inst.id, b.block_id);
            trace(TraceEvent::Kind::Retire, inst.request_id, inst.id, b.block_id, b.block_id + 1,
                  b.sm, b.threads);
            inst.retired += 1;
            if (inst.retired == inst.grid) kernel_complete(inst);
        }
    }

    void kernel_complete(Instance& inst) {
        trace(TraceEvent::Kind::KernelRetire, inst.request_id, inst.id, 0, inst.grid, -1, 0);
        --inflight_kernels_;
        if (inst.crit == Criticality::Critical) {
            active_critical_.erase(
                std::remove(active_critical_.begin(), active_critical_.end(), inst.id),
                active_critical_.end());
        }
        if (policy_ == Policy::Miriam) {
            if (inst.is_shard) {
                coordinator_dispatch(coordinator_.on_shard_retire(
                    inst.coord_kernel_id, inst.shard_start, inst.grid, resident_profile()));
                for (std::int64_t ck : coordinator_.take_completed())
                    kernel_sequence_advance(requests_[coord_kernel_map_.at(ck).first]);
            } else {
                // critical kernel finished
                kernel_sequence_advance(requests_[inst.request_id]);
                coordinator_dispatch(coordinator_.on_critical_retire(resident_profile()));
            }
        } else {
            if (policy_ == Policy::InterStreamBarrier && inst.crit == Criticality::Normal) {
                if (++normal_since_barrier_ >= model_.ib_group) barrier_engaged_ = true;
            }
            kernel_sequence_advance(requests_[inst.request_id]);
        }
        if (barrier_engaged_ && inflight_kernels_ == 0) {
            barrier_engaged_ = false;
            normal_since_barrier_ = 0;
        }
    }

    void kernel_sequence_advance(Request& r) {
        r.kernels_done += 1;
        if (r.kernels_done < static_cast<int>(r.task->kernels.size())) {
            if (policy_ != Policy::Miriam || r.crit == Criticality::Critical)
                launch_kernel(r, r.kernels_done);
            return;
        }
        complete_request(r);
    }

    void complete_request(Request& r) {
        auto& rec = result_.trace.requests[r.id];
        rec.start = r.start;
        rec.completion = now_;
        rec.completed = true;
        if (r.crit == Criticality::Critical) active_request_critical_ = -1;
        else active_request_normal_ = -1;
        if (sequential_owner_ == r.id) {
            sequential_owner_ = -1;
            seq_prefer_ = r.crit == Criticality::Critical ? Criticality::Normal
                                                          : Criticality::Critical;
        }
        const auto& pattern =
            r.crit == Criticality::Critical ? w_.critical_pattern : w_.normal_pattern;
        if (w_.explicit_arrivals.empty() && pattern.kind == ArrivalKind::ClosedLoop &&
            now_ < w_.duration)
            make_request(r.crit, now_);
    }

    // ---- kernel launching ----

    void launch_kernel(Request& r, int kernel_index) {
        const KernelSpec& ks = r.task->kernels[kernel_index];
        if (r.start < 0) r.start = now_;
        if (policy_ == Policy::Miriam && r.crit == Criticality::Normal) {
            throw std::logic_error("normal kernels go through the coordinator under miriam");
        }
        Instance inst;
        inst.id = next_instance_id_++;
        inst.request_id = r.id;
        inst.crit = r.crit;
        inst.grid = ks.grid_size;
        inst.block_threads = ks.block_size;
        inst.mem_intensity = ks.mem_intensity;
        inst.shmem = ks.shmem_per_block;
        inst.block_total_work = static_cast<double>(ks.block_size) * ks.work_per_thread;
        inst.kernel_index = kernel_index;
        instances_[inst.id] = inst;
        ++inflight_kernels_;
        if (r.crit == Criticality::Critical) active_critical_.push_back(inst.id);
        push_event(now_ + model_.launch_overhead, 1, Event::Type::LaunchReady, inst.id);
    }

    void launch_shard(const ShardDispatch& d) {
        const auto [req_id, kidx] = coord_kernel_map_.at(d.kernel_id);
        Request& r = requests_[req_id];
        if (r.start < 0) r.start = now_;
        const KernelSpec& ks = r.task->kernels[kidx];
        Instance inst;
        inst.id = next_instance_id_++;
        inst.request_id = req_id;
        inst.crit = Criticality::Normal;
        inst.grid = d.count;
        inst.block_threads = d.block_size;
        inst.mem_intensity = ks.mem_intensity;
        inst.shmem = ks.shmem_per_block;
        // persistent threads: a shard block carries the full logical block's work
        inst.block_total_work = static_cast<double>(ks.block_size) * ks.work_per_thread;
        inst.kernel_index = kidx;
        inst.is_shard = true;
        inst.coord_kernel_id = d.kernel_id;
        inst.shard_start = d.start;
        instances_[inst.id] = inst;
        ++inflight_kernels_;
        push_event(now_ + model_.coordinator_overhead + model_.launch_overhead, 1,
                   Event::Type::LaunchReady, inst.id);
    }

    void coordinator_dispatch(const std::vector<ShardDispatch>& ds) {
        for (const auto& d : ds) launch_shard(d);
    }

    std::optional<CriticalProfile> resident_profile() const {
        int blocks = 0;
        int threads = 0;
        for (std::int64_t id : active_critical_) {
            const Instance& inst = instances_.at(id);
            blocks += inst.grid - inst.retired;
            threads = std::max(threads, inst.block_threads);
        }
        if (blocks <= 0) return std::nullopt;
        return CriticalProfile{blocks, threads};
    }

    // ---- policy pumps ----

    void pump() {
        switch (policy_) {
            case Policy::Sequential: pump_sequential(); break;
            case Policy::Multistream: pump_streams(); break;
            case Policy::InterStreamBarrier: pump_streams(); break;
            case Policy::Miriam: pump_miriam(); break;
        }
    }

    void pump_sequential() {
        if (sequential_owner_ >= 0) return;
        if (crit_queue_.empty() && norm_queue_.empty()) return;
        Criticality pick = seq_prefer_;
        if (pick == Criticality::Critical && crit_queue_.empty()) pick = Criticality::Normal;
        if (pick == Criticality::Normal && norm_queue_.empty()) pick = Criticality::Critical;
        std::int64_t id;
        if (pick == Criticality::Critical) {
            id = crit_queue_.front();
            crit_queue_.pop_front();
        } else {
            id = norm_queue_.front();
            norm_queue_.pop_front();
        }
        sequential_owner_ = id;
        launch_kernel(requests_[id], 0);
    }

    void pump_streams() {
        if (barrier_engaged_) return;
        if (active_request_critical_ < 0 && !crit_queue_.empty()) {
            active_request_critical_ = crit_queue_.front();
            crit_queue_.pop_front();
            launch_kernel(requests_[active_request_critical_], 0);
        }
        if (active_request_normal_ < 0 && !norm_queue_.empty()) {
            active_request_normal_ = norm_queue_.front();
            norm_queue_.pop_front();
            launch_kernel(requests_[active_request_normal_], 0);
        }
    }

    void pump_miriam() {
        if (active_request_critical_ < 0 && !crit_queue_.empty()) {
            active_request_critical_ = crit_queue_.front();
            crit_queue_.pop_front();
            launch_kernel(requests_[active_request_critical_], 0);
        }
        while (!norm_queue_.empty()) {
            const std::int64_t id = norm_queue_.front();
            norm_queue_.pop_front();
            Request& r = requests_[id];
            for (int i = 0; i < static_cast<int>(r.task->kernels.size()); ++i) {
                const std::int64_t ck = next_coord_kernel_id_++;
                coord_kernel_map_[ck] = {id, i};
                coordinator_.enqueue_normal_kernel(ck, r.task->kernels[i], candidates_[i]);
            }
            coordinator_dispatch(coordinator_.on_normal_arrival(resident_profile()));
        }
    }

    // ---- trace / metrics ----

    void trace(TraceEvent::Kind kind, std::int64_t task, std::int64_t kernel, int b0, int b1,
               int sm, int threads) {
        result_.trace.events.push_back(TraceEvent{kind, now_, task, kernel, b0, b1, sm, threads});
    }

    void finalize_metrics() {
        Metrics& m = result_.metrics;
        for (const auto& r : result_.trace.requests) {
            if (!r.completed) continue;
            if (r.completion <= w_.duration) {
                if (r.criticality == Criticality::Critical) ++m.completed_critical;
                else ++m.completed_normal;
            }
            if (r.criticality == Criticality::Critical)
                m.critical_latencies.push_back(r.completion - r.arrival);
        }
        std::sort(m.critical_latencies.begin(), m.critical_latencies.end());
        if (!m.critical_latencies.empty()) {
            double s = 0;
            for (double v : m.critical_latencies) s += v;
            m.critical_mean = s / m.critical_latencies.size();
            auto q = [&](double p) {
                const auto n = m.critical_latencies.size();
                std::size_t i = static_cast<std::size_t>(std::ceil(p * n));
                if (i > 0) --i;
                return m.critical_latencies[std::min(i, n - 1)];
            };
            m.critical_p50 = q(0.50);
            m.critical_p99 = q(0.99);
        }
        m.throughput = static_cast<double>(m.completed_critical + m.completed_normal) / w_.duration;
        m.achieved_occupancy = achieved_occupancy(result_.trace, gpu_);
    }

    // ---- state ----

    const Workload& w_;
    Policy policy_;
    GpuSpec gpu_;
    ContentionModel model_;
    std::uint64_t seed_;
    double bw_ = 0;

    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
    std::int64_t next_seq_ = 0;
    double now_ = 0;
    double last_update_ = 0;
    std::int64_t retire_generation_ = 0;

    std::vector<SmState> sms_;
    std::map<std::int64_t, ActiveBlock> active_;
    std::deque<PendingBlock> pending_critical_;
    std::deque<PendingBlock> pending_normal_;

    std::vector<Request> requests_;
    std::map<std::int64_t, Instance> instances_;
    std::int64_t next_instance_id_ = 0;
    std::deque<std::int64_t> crit_queue_;
    std::deque<std::int64_t> norm_queue_;
    std::vector<std::int64_t> active_critical_;
    int inflight_kernels_ = 0;

    // sequential
    std::int64_t sequential_owner_ = -1;
    Criticality seq_prefer_ = Criticality::Critical;
    // multistream / ib
    std::int64_t active_request_critical_ = -1;
    std::int64_t active_request_normal_ = -1;
    bool barrier_engaged_ = false;
    int normal_since_barrier_ = 0;
    // miriam
    Coordinator coordinator_;
    std::vector<std::vector<ScoredCandidate>> candidates_;
    std::map<std::int64_t, std::pair<std::int64_t, int>> coord_kernel_map_;
    std::int64_t next_coord_kernel_id_ = 0;

    SimResult result_;
};

}  // namespace

SimResult run(const Workload& workload, Policy policy, const GpuSpec& gpu,
              const ContentionModel& model, std::uint64_t seed) {
    for (const auto& k : workload.critical_task.kernels) k.validate();
    for (const auto& k : workload.normal_task.kernels) k.validate();
    if (workload.duration <= 0) throw std::invalid_argument("run: duration must be > 0");
    Engine engine(workload, policy, gpu, model, seed);
    return engine.run_all();
}

double achieved_occupancy(const SimTrace& trace, const GpuSpec& gpu) {
    struct Edge {
        double t;
        int sm;
        int delta;
    };
    std::vector<Edge> edges;
    for (const auto& e : trace.events) {
        if (e.kind == TraceEvent::Kind::Dispatch) edges.push_back({e.t, e.sm, e.threads});
        else if (e.kind == TraceEvent::Kind::Retire) edges.push_back({e.t, e.sm, -e.threads});
    }
    if (edges.empty()) return 0.0;
    std::stable_sort(edges.begin(), edges.end(),
                     [](const Edge& a, const Edge& b) { return a.t < b.t; });
    std::vector<long long> resident(gpu.n_sm, 0);
    double acc = 0, active_time = 0;
    std::size_t i = 0;
    double t = edges.front().t;
    while (i < edges.size()) {
        // apply all edges at time t
        while (i < edges.size() && edges[i].t <= t) {
            resident[edges[i].sm] += edges[i].delta;
            ++i;
        }
        if (i >= edges.size()) break;
        const double t2 = edges[i].t;
        int active_sms = 0;
        double sum = 0;
        for (int s = 0; s < gpu.n_sm; ++s) {
            if (resident[s] > 0) {
                ++active_sms;
                sum += (static_cast<double>(resident[s]) / gpu.warp_size) / gpu.max_warps_per_sm;
            }
        }
        if (active_sms > 0) {
            acc += (sum / active_sms) * (t2 - t);
            active_time += t2 - t;
        }
        t = t2;
    }
    return active_time > 0 ? std::min(1.0, acc / active_time) : 0.0;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(9) << std::fixed << v;
    return os.str();
}

}  // namespace

void export_latency_cdf(const Metrics& metrics, const std::string& path) {
    if (metrics.critical_latencies.empty())
        throw std::runtime_error("export_latency_cdf: no completed critical requests");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const std::size_t n = metrics.critical_latencies.size();
    for (std::size_t i = 0; i < n; ++i)
        out << fmt(metrics.critical_latencies[i]) << " "
            << fmt(static_cast<double>(i + 1) / static_cast<double>(n)) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

void export_trace(const SimTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& e : trace.events) {
        const char* kind = "?";
        switch (e.kind) {
            case TraceEvent::Kind::Arrival: kind = "arr"; break;
            case TraceEvent::Kind::Dispatch: kind = "disp"; break;
            case TraceEvent::Kind::Retire: kind = "ret"; break;
            case TraceEvent::Kind::KernelRetire: kind = "kret"; break;
        }
        out << "t=" << fmt(e.t) << " kind=" << kind << " task=" << e.task << " kernel=" << e.kernel
            << " blocks=" << e.block_begin << ".." << e.block_end << " sm=" << e.sm << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void export_metrics(const Metrics& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "completed_critical = " << m.completed_critical << "\n";
    out << "completed_normal = " << m.completed_normal << "\n";
    out << "throughput = " << fmt(m.throughput) << "\n";
    out << "critical_mean_latency = " << fmt(m.critical_mean) << "\n";
    out << "critical_p50_latency = " << fmt(m.critical_p50) << "\n";
    out << "critical_p99_latency = " << fmt(m.critical_p99) << "\n";
    out << "achieved_occupancy = " << fmt(m.achieved_occupancy) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace miriam
