#include "miriam/config.hpp"

#include <fstream>
#include <sstream>

namespace miriam {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

}  // namespace

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    ConfigMap map;
    std::string section = "experiment";
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path + ":" + std::to_string(ln) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(ln) + ": expected key = value");
        map[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return map;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    const ConfigMap map = parse_config_file(path);
    ExperimentConfig cfg;

    auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
        auto s = map.find(sec);
        if (s == map.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };

    if (const auto* v = get("experiment", "gpu")) cfg.gpu_name = *v;
    cfg.gpu = gpu_preset(cfg.gpu_name);

    if (const auto* v = get("experiment", "workload")) cfg.workload_name = *v;
    else throw std::runtime_error(path + ": missing experiment.workload");
    if (cfg.workload_name.rfind("mdtb-", 0) == 0 && cfg.workload_name.size() == 6) {
        cfg.mdtb_id = cfg.workload_name[5];
    } else if (cfg.workload_name.rfind("trace:", 0) == 0) {
        cfg.trace_path = cfg.workload_name.substr(6);
    } else {
        throw std::runtime_error(path + ": workload must be mdtb-A..D or trace:<path>");
    }

    if (const auto* v = get("experiment", "policies")) {
        for (const auto& p : split_list(*v)) cfg.policies.push_back(policy_from_string(p));
    }
    if (cfg.policies.empty()) throw std::runtime_error(path + ": at least one policy required");

    if (const auto* v = get("experiment", "seed")) cfg.seed = std::stoull(*v);
    else throw std::runtime_error(path + ": missing experiment.seed (no wall-clock default)");

    if (const auto* v = get("experiment", "duration")) cfg.duration = std::stod(*v);
    if (const auto* v = get("experiment", "out")) cfg.out_dir = *v;
    if (const auto* v = get("experiment", "profile_dir")) cfg.profile_dir = *v;
    if (const auto* v = get("experiment", "trace_critical")) cfg.trace_critical_profile = *v;
    if (const auto* v = get("experiment", "trace_normal")) cfg.trace_normal_profile = *v;

    if (const auto* v = get("model", "sm_throughput")) cfg.model.sm_throughput = std::stod(*v);
    if (const auto* v = get("model", "mem_bandwidth")) cfg.model.mem_bandwidth = std::stod(*v);
    if (const auto* v = get("model", "launch_overhead")) cfg.model.launch_overhead = std::stod(*v);
    if (const auto* v = get("model", "coordinator_overhead"))
        cfg.model.coordinator_overhead = std::stod(*v);
    if (const auto* v = get("model", "max_shard_overhead"))
        cfg.model.max_shard_overhead = std::stod(*v);
    if (const auto* v = get("model", "ib_group")) cfg.model.ib_group = std::stoi(*v);

    if (const auto* v = get("gpu", "n_sm")) cfg.gpu.n_sm = std::stoi(*v);
    if (const auto* v = get("gpu", "l_threads")) cfg.gpu.l_threads = std::stoi(*v);
    if (const auto* v = get("gpu", "warp_size")) cfg.gpu.warp_size = std::stoi(*v);
    if (const auto* v = get("gpu", "max_warps_per_sm")) cfg.gpu.max_warps_per_sm = std::stoi(*v);
    if (const auto* v = get("gpu", "shared_mem_per_sm")) cfg.gpu.shared_mem_per_sm = std::stoi(*v);
    if (const auto* v = get("gpu", "mem_bandwidth")) cfg.gpu.mem_bandwidth = std::stod(*v);
    cfg.gpu.validate();
    cfg.model.validate();
    return cfg;
}

Workload ExperimentConfig::make_workload() const {
    Workload w;
    if (mdtb_id != 0) {
        w = build_mdtb(mdtb_id, profile_dir);
    } else {
        const TaskSpec crit =
            load_profile(profile_dir + "/" + trace_critical_profile + ".profile",
                         Criticality::Critical);
        const TaskSpec norm =
            load_profile(profile_dir + "/" + trace_normal_profile + ".profile",
                         Criticality::Normal);
        w = load_trace(trace_path, crit, norm);
        w.seed = seed;
        return w;
    }
    w.duration = duration;
    w.seed = seed;
    return w;
}

}  // namespace miriam
