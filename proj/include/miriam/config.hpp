#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "miriam/simulator.hpp"

namespace miriam {

/// Parsed experiment configuration (line-oriented `key = value` file with
/// `[section]` headers).
struct ExperimentConfig {
    GpuSpec gpu;
    std::string gpu_name = "rtx2060-like";
    // workload selector: "mdtb-A".."mdtb-D" or "trace:<path>"
    std::string workload_name;
    char mdtb_id = 0;
    std::string trace_path;
    std::string trace_critical_profile = "lgsvl-critical";
    std::string trace_normal_profile = "lgsvl-normal";
    std::string profile_dir = "data/profiles";
    std::vector<Policy> policies;
    ContentionModel model;
    std::uint64_t seed = 0;
    double duration = 10.0;
    std::string out_dir = "results";

    Workload make_workload() const;
};

/// Raw section/key/value view of a config file.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

ConfigMap parse_config_file(const std::string& path);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace miriam
