#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "placegen/optimizers.hpp"
#include "placegen/robustness.hpp"
#include "placegen/samplers.hpp"
#include "placegen/space.hpp"

namespace placegen {

enum class Method {
    me_rand,
    me_scs,
    cma_mae,
    rand_sample,
    face_alignment,
    pca_alignment,
    contact_rand_sample,
    contact_me_rand,
    contact_me_scs,
    contact_cma_mae,
};

const char* to_string(Method m);
Method method_from_string(const std::string& s);
bool method_is_baseline(Method m);
SpaceTag method_space(Method m);
BaselineMethod method_baseline(Method m);

struct RunConfig {
    std::string scenario_path; // resolved absolute/relative path
    Method method = Method::me_rand;
    std::vector<std::uint64_t> seeds;
    std::int64_t budget = 5000;
    std::string output_dir = "runs";
    int threads = 0; // 0 = hardware
    QdParams qd;
    SamplerConfig sampler;
    DrConfig dr;
    std::string config_hash;
    nlohmann::json raw;
};

/// Strict parsers: unknown keys are configuration errors.
Scenario load_scenario(const std::string& path);
RunConfig load_run_config(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::string& path);

} // namespace placegen
