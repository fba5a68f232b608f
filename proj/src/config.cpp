#include "placegen/config.hpp"

#include <filesystem>
#include <fstream>

#include "placegen/error.hpp"

namespace placegen {

namespace fs = std::filesystem;

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

nlohmann::json json_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Wraps a JSON object; every field access is recorded and leftover keys are
/// reported as errors, so config typos cannot silently change an experiment.
class Strict {
public:
    Strict(const nlohmann::json& obj, std::string where)
        : obj_(obj), where_(std::move(where)) {
        if (!obj.is_object()) throw ConfigError(where_ + ": expected an object");
    }
    ~Strict() = default;

    bool has(const std::string& key) {
        seen_.push_back(key);
        return obj_.contains(key);
    }

    template <typename T>
    T require(const std::string& key) {
        seen_.push_back(key);
        if (!obj_.contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
        try {
            return obj_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where_ + "." + key + ": " + e.what());
        }
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) {
        seen_.push_back(key);
        if (!obj_.contains(key)) return fallback;
        try {
            return obj_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where_ + "." + key + ": " + e.what());
        }
    }

    nlohmann::json sub(const std::string& key) {
        seen_.push_back(key);
        return obj_.contains(key) ? obj_.at(key) : nlohmann::json::object();
    }

    void finish() {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
        }
    }

private:
    const nlohmann::json& obj_;
    std::string where_;
    std::vector<std::string> seen_;
};

Vec3 vec3_of(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError(where + ": expected an array of 3 numbers");
    return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

SimConfig parse_sim(const nlohmann::json& j, const std::string& where) {
    Strict s(j, where);
    SimConfig cfg;
    cfg.dt = s.get_or("dt", cfg.dt);
    cfg.total_steps = s.get_or("total_steps", cfg.total_steps);
    cfg.window = s.get_or("window", cfg.window);
    if (s.has("gravity")) cfg.gravity = vec3_of(j.at("gravity"), where + ".gravity");
    cfg.contact_stiffness = s.get_or("contact_stiffness", cfg.contact_stiffness);
    cfg.contact_damping = s.get_or("contact_damping", cfg.contact_damping);
    cfg.friction = s.get_or("friction", cfg.friction);
    cfg.linear_damping = s.get_or("linear_damping", cfg.linear_damping);
    cfg.angular_damping = s.get_or("angular_damping", cfg.angular_damping);
    cfg.velocity_eps = s.get_or("velocity_eps", cfg.velocity_eps);
    cfg.stability_threshold = s.get_or("stability_threshold", cfg.stability_threshold);
    cfg.skin_depth = s.get_or("skin_depth", cfg.skin_depth);
    cfg.penetration_tol = s.get_or("penetration_tol", cfg.penetration_tol);
    cfg.friction_vreg = s.get_or("friction_vreg", cfg.friction_vreg);
    cfg.char_length = s.get_or("char_length", cfg.char_length);
    s.finish();
    if (cfg.dt <= 0.0) throw ConfigError(where + ".dt: must be positive");
    if (cfg.window <= 0 || cfg.window > cfg.total_steps)
        throw ConfigError(where + ".window: must satisfy 0 < window <= total_steps");
    if (cfg.stability_threshold <= 0.0)
        throw ConfigError(where + ".stability_threshold: must be positive");
    if (cfg.contact_stiffness <= 0.0)
        throw ConfigError(where + ".contact_stiffness: must be positive");
    return cfg;
}

} // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::me_rand: return "me_rand";
        case Method::me_scs: return "me_scs";
        case Method::cma_mae: return "cma_mae";
        case Method::rand_sample: return "rand_sample";
        case Method::face_alignment: return "face_alignment";
        case Method::pca_alignment: return "pca_alignment";
        case Method::contact_rand_sample: return "contact_rand_sample";
        case Method::contact_me_rand: return "contact_me_rand";
        case Method::contact_me_scs: return "contact_me_scs";
        case Method::contact_cma_mae: return "contact_cma_mae";
    }
    return "me_rand";
}

Method method_from_string(const std::string& s) {
    static const std::pair<const char*, Method> table[] = {
        {"me_rand", Method::me_rand},
        {"me_scs", Method::me_scs},
        {"cma_mae", Method::cma_mae},
        {"rand_sample", Method::rand_sample},
        {"face_alignment", Method::face_alignment},
        {"pca_alignment", Method::pca_alignment},
        {"contact_rand_sample", Method::contact_rand_sample},
        {"contact_me_rand", Method::contact_me_rand},
        {"contact_me_scs", Method::contact_me_scs},
        {"contact_cma_mae", Method::contact_cma_mae},
    };
    for (const auto& [name, m] : table)
        if (s == name) return m;
    throw ConfigError("method: unknown method '" + s + "'");
}

bool method_is_baseline(Method m) {
    return m == Method::rand_sample || m == Method::face_alignment ||
           m == Method::pca_alignment || m == Method::contact_rand_sample;
}

SpaceTag method_space(Method m) {
    switch (m) {
        case Method::contact_me_rand:
        case Method::contact_me_scs:
        case Method::contact_cma_mae:
        case Method::contact_rand_sample:
            return SpaceTag::contact;
        default:
            return SpaceTag::naive;
    }
}

BaselineMethod method_baseline(Method m) {
    switch (m) {
        case Method::rand_sample: return BaselineMethod::rand_sample;
        case Method::face_alignment: return BaselineMethod::face_alignment;
        case Method::pca_alignment: return BaselineMethod::pca_alignment;
        case Method::contact_rand_sample: return BaselineMethod::contact_rand_sample;
        default: throw Error("method is not a baseline sampler");
    }
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for hashing");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a_hex(bytes);
}

Scenario load_scenario(const std::string& path) {
    const nlohmann::json j = json_from_file(path);
    const fs::path base = fs::path(path).parent_path();
    Strict s(j, path);

    Scenario sc;
    sc.name = s.require<std::string>("name");

    std::string combined_bytes;
    {
        std::ifstream in(path, std::ios::binary);
        combined_bytes.assign((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    }

    {
        Strict o(s.sub("object"), path + ".object");
        const std::string mesh_rel = o.require<std::string>("mesh");
        const std::string mesh_path = (base / mesh_rel).string();
        const double scale = o.get_or("scale", 1.0);
        const double density = o.get_or("density", 1000.0);
        const int n_samples = o.get_or("surface_samples", 256);
        const std::uint64_t sample_seed = o.get_or("sample_seed", std::uint64_t{7});
        o.finish();
        sc.object = make_body(load_mesh(mesh_path, scale, density), n_samples, sample_seed);
        combined_bytes += hash_file(mesh_path);
    }
    {
        Strict o(s.sub("support"), path + ".support");
        const std::string mesh_rel = o.require<std::string>("mesh");
        const std::string mesh_path = (base / mesh_rel).string();
        const double scale = o.get_or("scale", 1.0);
        const double density = o.get_or("density", 1000.0);
        o.finish();
        sc.support = load_mesh(mesh_path, scale, density);
        combined_bytes += hash_file(mesh_path);
    }
    {
        Strict v(s.sub("placement_volume"), path + ".placement_volume");
        sc.volume.lo = vec3_of(v.sub("lo"), path + ".placement_volume.lo");
        sc.volume.hi = vec3_of(v.sub("hi"), path + ".placement_volume.hi");
        v.finish();
        if (!((sc.volume.lo.array() < sc.volume.hi.array()).all()))
            throw ConfigError(path + ".placement_volume: lo must be < hi per axis");
    }

    double sdf_cell = 0.0, sdf_padding = 0.0;
    {
        Strict g(s.sub("sdf"), path + ".sdf");
        sdf_cell = g.require<double>("cell");
        sdf_padding = g.require<double>("padding");
        g.finish();
    }

    sc.sim = parse_sim(s.sub("sim"), path + ".sim");

    if (s.has("archive")) {
        Strict a(j.at("archive"), path + ".archive");
        if (a.has("box_lo"))
            sc.archive_spec.box_lo = vec3_of(j.at("archive").at("box_lo"), path + ".archive.box_lo");
        if (a.has("box_hi"))
            sc.archive_spec.box_hi = vec3_of(j.at("archive").at("box_hi"), path + ".archive.box_hi");
        if (a.has("position_bins")) {
            const auto& pb = j.at("archive").at("position_bins");
            sc.archive_spec.nx = pb.at(0).get<int>();
            sc.archive_spec.ny = pb.at(1).get<int>();
            sc.archive_spec.nz = pb.at(2).get<int>();
        }
        if (a.has("orientation_bins")) {
            const auto& ob = j.at("archive").at("orientation_bins");
            sc.archive_spec.nr = ob.at(0).get<int>();
            sc.archive_spec.np = ob.at(1).get<int>();
            sc.archive_spec.nyaw = ob.at(2).get<int>();
        }
        a.finish();
    }

    {
        Strict c(s.sub("contact_space"), path + ".contact_space");
        sc.contact.cone_half_angle =
            c.get_or("cone_half_angle_deg", 30.0) * kDegToRad;
        sc.contact.standoff_min = c.get_or("standoff_min", 0.0);
        sc.contact.standoff_max = c.get_or("standoff_max", 0.0);
        c.finish();
    }

    sc.table_top = s.get_or("table_top", false);
    sc.support_top_z = s.get_or("support_top_z", sc.support.bbox.hi.z());
    s.finish();

    if (!sc.support.watertight)
        throw ConfigError(path + ": support mesh is not watertight");
    sc.support_sdf = build_sdf(sc.support, sdf_cell, sdf_padding);
    sc.config_hash = fnv1a_hex(combined_bytes);
    finalize_scenario(sc);
    return sc;
}

RunConfig load_run_config(const std::string& path) {
    const nlohmann::json j = json_from_file(path);
    const fs::path base = fs::path(path).parent_path();
    Strict s(j, path);

    RunConfig cfg;
    cfg.raw = j;
    cfg.scenario_path = (base / s.require<std::string>("scenario")).string();
    cfg.method = method_from_string(s.require<std::string>("method"));
    cfg.seeds = s.require<std::vector<std::uint64_t>>("seeds");
    if (cfg.seeds.empty()) throw ConfigError(path + ".seeds: must be non-empty");
    cfg.budget = s.require<std::int64_t>("budget");
    if (cfg.budget < 1) throw ConfigError(path + ".budget: must be >= 1");
    cfg.output_dir = s.get_or<std::string>("output_dir", "runs");
    cfg.threads = s.get_or("threads", 0);

    {
        Strict q(s.sub("qd"), path + ".qd");
        cfg.qd.mu = q.get_or("mu", cfg.qd.mu);
        cfg.qd.lambda = q.get_or("lambda", cfg.qd.lambda);
        cfg.qd.novelty_k = q.get_or("novelty_k", cfg.qd.novelty_k);
        cfg.qd.ind_pb = q.get_or("ind_pb", cfg.qd.ind_pb);
        cfg.qd.mut_sigma = q.get_or("mutation_sigma", cfg.qd.mut_sigma);
        cfg.qd.emitters = q.get_or("emitters", cfg.qd.emitters);
        cfg.qd.emitter_batch = q.get_or("emitter_batch", cfg.qd.emitter_batch);
        cfg.qd.archive_alpha = q.get_or("archive_alpha", cfg.qd.archive_alpha);
        cfg.qd.f_min = q.get_or("f_min", cfg.qd.f_min);
        cfg.qd.initial_step = q.get_or("initial_step", cfg.qd.initial_step);
        cfg.qd.restart_patience = q.get_or("restart_patience", cfg.qd.restart_patience);
        q.finish();
        if (cfg.qd.mu < 1 || cfg.qd.lambda < 1)
            throw ConfigError(path + ".qd: mu and lambda must be >= 1");
        if (cfg.qd.archive_alpha < 0.0 || cfg.qd.archive_alpha > 1.0)
            throw ConfigError(path + ".qd.archive_alpha: must be in [0, 1]");
    }
    cfg.qd.budget = cfg.budget;

    {
        Strict p(s.sub("sampler"), path + ".sampler");
        cfg.sampler.pca_rot_sigma = p.get_or("pca_rot_sigma_deg", 5.0) * kDegToRad;
        cfg.sampler.pca_pos_sigma = p.get_or("pca_pos_sigma", cfg.sampler.pca_pos_sigma);
        cfg.sampler.pca_clearance = p.get_or("pca_clearance", cfg.sampler.pca_clearance);
        p.finish();
    }

    {
        Strict d(s.sub("dr"), path + ".dr");
        cfg.dr.trials = d.get_or("trials", cfg.dr.trials);
        cfg.dr.resettle_steps = d.get_or("resettle_steps", cfg.dr.resettle_steps);
        cfg.dr.variance_threshold = d.get_or("variance_threshold", cfg.dr.variance_threshold);
        cfg.dr.translation_frac = d.get_or("translation_frac", cfg.dr.translation_frac);
        cfg.dr.rotation_mag = d.get_or("rotation_mag_deg", 5.0) * kDegToRad;
        cfg.dr.same_pose_pos_frac = d.get_or("same_pose_pos_frac", cfg.dr.same_pose_pos_frac);
        cfg.dr.same_pose_angle = d.get_or("same_pose_angle", cfg.dr.same_pose_angle);
        cfg.dr.seed = d.get_or("seed", cfg.dr.seed);
        cfg.dr.mass_scaled_impulse = d.get_or("mass_scaled_impulse", cfg.dr.mass_scaled_impulse);
        cfg.dr.impulse_magnitude = d.get_or("impulse_magnitude", cfg.dr.impulse_magnitude);
        d.finish();
        if (cfg.dr.trials < 1) throw ConfigError(path + ".dr.trials: must be >= 1");
        if (cfg.dr.variance_threshold <= 0.0)
            throw ConfigError(path + ".dr.variance_threshold: must be positive");
    }

    s.finish();
    cfg.config_hash = hash_file(path);
    return cfg;
}

} // namespace placegen
