#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "placegen/pack.hpp"
#include "placegen/runner.hpp"
#include "placegen/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"placegen: diverse stable placement poses via quality-diversity search"};
    app.set_version_flag("--version", placegen::kCodeVersion);
    app.require_subcommand(1);

    // run
    std::string run_config_path, out_root;
    int run_threads = -1;
    auto* cmd_run = app.add_subcommand("run", "execute a configured run, one output per seed");
    cmd_run->add_option("--config", run_config_path, "run config JSON")->required();
    cmd_run->add_option("--out-root", out_root, "output root override");
    cmd_run->add_option("--threads", run_threads, "evaluation threads (0 = hardware)");

    // compare
    std::vector<std::string> compare_dirs;
    std::vector<std::int64_t> compare_checkpoints;
    std::string compare_out = "comparison";
    auto* cmd_compare =
        app.add_subcommand("compare", "median/IQR coverage across runs, per method");
    cmd_compare->add_option("--runs", compare_dirs, "seed run directories")->required();
    cmd_compare->add_option("--checkpoints", compare_checkpoints, "evaluation checkpoints");
    cmd_compare->add_option("--out", compare_out, "output prefix (.csv/.svg)");

    // filter-dr
    std::string dr_archive, dr_scenario, dr_out_archive, dr_out_summary = "dr_summary.csv";
    placegen::DrConfig dr_cfg;
    double dr_rot_deg = 5.0;
    int dr_threads = 0;
    auto* cmd_dr = app.add_subcommand("filter-dr", "label archive elites as robust/fragile");
    cmd_dr->add_option("--archive", dr_archive, "archive file")->required();
    cmd_dr->add_option("--scenario", dr_scenario, "scenario config JSON")->required();
    cmd_dr->add_option("--out", dr_out_archive, "labeled archive output")->required();
    cmd_dr->add_option("--summary", dr_out_summary, "summary CSV output");
    cmd_dr->add_option("--trials", dr_cfg.trials, "perturbation trials per elite");
    cmd_dr->add_option("--resettle-steps", dr_cfg.resettle_steps, "steps per trial");
    cmd_dr->add_option("--sigma-dr", dr_cfg.variance_threshold, "variance threshold");
    cmd_dr->add_option("--translation-frac", dr_cfg.translation_frac,
                       "translation magnitude (fraction of bbox diagonal)");
    cmd_dr->add_option("--rotation-deg", dr_rot_deg, "rotation magnitude (degrees)");
    cmd_dr->add_option("--seed", dr_cfg.seed, "perturbation seed");
    cmd_dr->add_option("--threads", dr_threads, "threads (0 = hardware)");
    cmd_dr->add_flag("--mass-scaled-impulse", dr_cfg.mass_scaled_impulse,
                     "perturb with an impulse dv = J/m instead of a pose offset");

    // analyze
    std::string an_archive, an_kind, an_scenario, an_out = "analysis";
    auto* cmd_an = app.add_subcommand("analyze", "derive metrics/figures from an archive");
    cmd_an->add_option("--archive", an_archive, "archive file")->required();
    cmd_an->add_option("--kind", an_kind, "coverage | heatmap | histogram")->required();
    cmd_an->add_option("--scenario", an_scenario, "scenario config (heatmap only)");
    cmd_an->add_option("--out-dir", an_out, "output directory");

    // scenarios
    auto* cmd_sc = app.add_subcommand("scenarios", "bundled scenario pack");
    std::string sc_configs_dir = "configs";
    auto* cmd_sc_list = cmd_sc->add_subcommand("list", "list bundled scenarios");
    cmd_sc_list->add_option("--dir", sc_configs_dir, "configs directory");
    std::string sc_mesh_dir = "assets/meshes";
    auto* cmd_sc_gen = cmd_sc->add_subcommand("generate", "regenerate pack meshes");
    cmd_sc_gen->add_option("--out-dir", sc_mesh_dir, "mesh output directory");
    cmd_sc->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*cmd_run) {
            placegen::RunConfig cfg = placegen::load_run_config(run_config_path);
            if (run_threads >= 0) cfg.threads = run_threads;
            const auto results = placegen::cli_run(cfg, out_root);
            for (const auto& r : results)
                std::printf("seed %llu -> %s\n", static_cast<unsigned long long>(r.seed),
                            r.dir.c_str());
        } else if (*cmd_compare) {
            placegen::cli_compare(compare_dirs, compare_checkpoints, compare_out);
            std::printf("wrote %s.csv and %s.svg\n", compare_out.c_str(), compare_out.c_str());
        } else if (*cmd_dr) {
            dr_cfg.rotation_mag = dr_rot_deg * kDegToRad;
            const auto summary = placegen::cli_filter_dr(dr_archive, dr_scenario, dr_cfg,
                                                         dr_threads, dr_out_archive,
                                                         dr_out_summary);
            std::printf("labeled %lld elites: %lld robust, %lld fragile\n",
                        static_cast<long long>(summary.valid),
                        static_cast<long long>(summary.robust),
                        static_cast<long long>(summary.fragile));
        } else if (*cmd_an) {
            placegen::cli_analyze(an_archive, an_kind, an_scenario, an_out);
            std::printf("analysis written to %s\n", an_out.c_str());
        } else if (*cmd_sc) {
            if (*cmd_sc_list) {
                for (const auto& entry : placegen::scenario_pack()) {
                    const auto cfg_path =
                        std::filesystem::path(sc_configs_dir) / entry.config_file;
                    std::printf("%-18s config=%s object=%s support=%s\n", entry.name.c_str(),
                                cfg_path.string().c_str(), entry.object_mesh.c_str(),
                                entry.support_mesh.c_str());
                }
            } else if (*cmd_sc_gen) {
                placegen::write_pack_meshes(sc_mesh_dir);
                std::printf("meshes written to %s\n", sc_mesh_dir.c_str());
            }
        }
    } catch (const placegen::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const placegen::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
