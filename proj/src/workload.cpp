#include "miriam/workload.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace miriam {

void KernelSpec::validate() const {
    if (grid_size < 1) throw std::invalid_argument("KernelSpec " + id + ": grid_size >= 1");
    if (block_size < 1) throw std::invalid_argument("KernelSpec " + id + ": block_size >= 1");
    if (mem_intensity < 0.0 || mem_intensity > 1.0)
        throw std::invalid_argument("KernelSpec " + id + ": mem_intensity in [0,1]");
    if (work_per_thread < 0.0)
        throw std::invalid_argument("KernelSpec " + id + ": work_per_thread >= 0");
    if (shmem_per_block < 0)
        throw std::invalid_argument("KernelSpec " + id + ": shmem_per_block >= 0");
}

namespace {

// Uniform double in (0,1], stable across platforms (std distributions are
// implementation-defined).
double next_unit(std::mt19937_64& rng) {
    const std::uint64_t v = rng();
    return (static_cast<double>(v >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::vector<double> generate_arrivals(const ArrivalPattern& pattern, double duration,
                                      std::uint64_t seed) {
    if (pattern.kind == ArrivalKind::ClosedLoop) return {};
    if (pattern.rate <= 0.0)
        throw std::invalid_argument("generate_arrivals: rate must be > 0");
    std::vector<double> times;
    if (pattern.kind == ArrivalKind::Uniform) {
        const long n = static_cast<long>(std::floor(duration * pattern.rate));
        for (long k = 0; k < n; ++k) times.push_back(static_cast<double>(k) / pattern.rate);
        return times;
    }
    // Poisson: exponential inter-arrival times.
    std::mt19937_64 rng(seed);
    double t = 0.0;
    for (;;) {
        t += -std::log(next_unit(rng)) / pattern.rate;
        if (t >= duration) break;
        times.push_back(t);
    }
    return times;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

TaskSpec load_profile(const std::string& path, Criticality crit) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile: " + path);
    TaskSpec task;
    task.criticality = crit;
    KernelSpec cur;
    bool in_kernel = false;
    int kernel_no = 0;
    std::string line;
    int ln = 0;
    auto flush = [&]() {
        if (!in_kernel) return;
        if (cur.id.empty()) cur.id = task.name + "/k" + std::to_string(kernel_no);
        cur.validate();
        task.kernels.push_back(cur);
        ++kernel_no;
        cur = KernelSpec{};
        in_kernel = false;
    };
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line == "[kernel]") {
            flush();
            in_kernel = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(path, ln, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "model") {
            task.name = val;
            continue;
        }
        if (!in_kernel) parse_fail(path, ln, "kernel field outside [kernel] block: " + key);
        try {
            if (key == "id") cur.id = val;
            else if (key == "grid") cur.grid_size = std::stoi(val);
            else if (key == "block") cur.block_size = std::stoi(val);
            else if (key == "work") cur.work_per_thread = std::stod(val);
            else if (key == "mem_intensity") cur.mem_intensity = std::stod(val);
            else if (key == "shmem") cur.shmem_per_block = std::stoi(val);
            else parse_fail(path, ln, "unknown profile key: " + key);
        } catch (const std::invalid_argument&) {
            parse_fail(path, ln, "bad numeric value for " + key);
        }
    }
    flush();
    if (task.kernels.empty()) throw std::runtime_error(path + ": profile has no kernels");
    if (task.name.empty()) task.name = path;
    return task;
}

Workload build_mdtb(char id, const std::string& profile_dir) {
    auto profile = [&](const std::string& model, Criticality c) {
        return load_profile(profile_dir + "/" + model + ".profile", c);
    };
    const ArrivalPattern closed{ArrivalKind::ClosedLoop, 0.0};
    const ArrivalPattern uni10{ArrivalKind::Uniform, 10.0};
    const ArrivalPattern poi10{ArrivalKind::Poisson, 10.0};
    Workload w;
    switch (id) {
        case 'A':
            w.critical_task = profile("alexnet-like", Criticality::Critical);
            w.critical_pattern = closed;
            w.normal_task = profile("cifarnet-like", Criticality::Normal);
            w.normal_pattern = closed;
            break;
        case 'B':
            w.critical_task = profile("squeezenet-like", Criticality::Critical);
            w.critical_pattern = uni10;
            w.normal_task = profile("alexnet-like", Criticality::Normal);
            w.normal_pattern = closed;
            break;
        case 'C':
            w.critical_task = profile("gru-like", Criticality::Critical);
            w.critical_pattern = poi10;
            w.normal_task = profile("resnet-like", Criticality::Normal);
            w.normal_pattern = closed;
            break;
        case 'D':
            w.critical_task = profile("lstm-like", Criticality::Critical);
            w.critical_pattern = uni10;
            w.normal_task = profile("squeezenet-like", Criticality::Normal);
            w.normal_pattern = closed;
            break;
        default:
            throw std::invalid_argument(std::string("unknown MDTB id: ") + id);
    }
    return w;
}

Workload load_trace(const std::string& path, const TaskSpec& critical_task,
                    const TaskSpec& normal_task) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace: " + path);
    Workload w;
    w.critical_task = critical_task;
    w.normal_task = normal_task;
    double last = -1.0;
    double horizon = 0.0;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        double t;
        std::string kind;
        if (!(ss >> t >> kind)) parse_fail(path, ln, "expected `<seconds> <critical|normal>`");
        if (t < last) parse_fail(path, ln, "non-monotone timestamp");
        last = t;
        horizon = std::max(horizon, t);
        Criticality c;
        if (kind == "critical") c = Criticality::Critical;
        else if (kind == "normal") c = Criticality::Normal;
        else parse_fail(path, ln, "unknown request kind: " + kind);
        w.explicit_arrivals.push_back({t, c});
    }
    if (w.explicit_arrivals.empty()) throw std::runtime_error(path + ": trace is empty");
    w.duration = horizon + 1.0;
    return w;
}

}  // namespace miriam
