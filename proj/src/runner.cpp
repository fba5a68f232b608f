#include "placegen/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include "placegen/error.hpp"
#include "placegen/version.hpp"

namespace placegen {

namespace fs = std::filesystem;

namespace {

nlohmann::json spec_json(const ArchiveSpec& s) {
    return {{"box_lo", {s.box_lo.x(), s.box_lo.y(), s.box_lo.z()}},
            {"box_hi", {s.box_hi.x(), s.box_hi.y(), s.box_hi.z()}},
            {"position_bins", {s.nx, s.ny, s.nz}},
            {"orientation_bins", {s.nr, s.np, s.nyaw}}};
}

nlohmann::json params_json(const RunConfig& cfg) {
    nlohmann::json p = {{"budget", cfg.budget}};
    if (method_is_baseline(cfg.method)) {
        p["sampler"] = {{"pca_rot_sigma", cfg.sampler.pca_rot_sigma},
                        {"pca_pos_sigma", cfg.sampler.pca_pos_sigma},
                        {"pca_clearance", cfg.sampler.pca_clearance}};
    } else {
        p["qd"] = {{"mu", cfg.qd.mu},
                   {"lambda", cfg.qd.lambda},
                   {"novelty_k", cfg.qd.novelty_k},
                   {"ind_pb", cfg.qd.ind_pb},
                   {"mutation_sigma", cfg.qd.mut_sigma},
                   {"emitters", cfg.qd.emitters},
                   {"emitter_batch", cfg.qd.emitter_batch},
                   {"archive_alpha", cfg.qd.archive_alpha},
                   {"f_min", cfg.qd.f_min},
                   {"initial_step", cfg.qd.initial_step},
                   {"restart_patience", cfg.qd.restart_patience}};
    }
    return p;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << text;
    if (!out) throw IoError(path + ": write failed");
}

} // namespace

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error("quantile of empty set");
    std::sort(values.begin(), values.end());
    const double pos = q * (values.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(i);
    return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

std::vector<RunDirResult> cli_run(const RunConfig& cfg, const std::string& out_root_override) {
    std::string root = cfg.output_dir;
    if (const char* env = std::getenv("PLACEGEN_OUT_ROOT"); env && *env) root = env;
    if (!out_root_override.empty()) root = out_root_override;

    const Scenario sc = load_scenario(cfg.scenario_path);
    std::vector<RunDirResult> results;

    for (const std::uint64_t seed : cfg.seeds) {
        const fs::path dir =
            fs::path(root) / sc.name / to_string(cfg.method) / ("seed_" + std::to_string(seed));
        fs::create_directories(dir);

        const auto t0 = std::chrono::steady_clock::now();

        Archive archive(sc.archive_spec);
        CoverageSeries series;
        std::vector<std::pair<std::int64_t, double>> novelty;
        std::int64_t sample_failures = 0;

        if (method_is_baseline(cfg.method)) {
            SamplerConfig sampler = cfg.sampler;
            sampler.method = method_baseline(cfg.method);
            sampler.seed = seed;
            BaselineRunResult r = run_baseline(sc, sampler, cfg.budget, cfg.threads);
            archive = std::move(r.archive);
            series = std::move(r.series);
            sample_failures = r.sample_failures;
        } else {
            const SpaceTag space = method_space(cfg.method);
            QdRunResult r = [&] {
                switch (cfg.method) {
                    case Method::me_rand:
                    case Method::contact_me_rand:
                        return run_me_rand(sc, space, cfg.qd, seed, cfg.threads);
                    case Method::me_scs:
                    case Method::contact_me_scs:
                        return run_me_scs(sc, space, cfg.qd, seed, cfg.threads);
                    default:
                        return run_cma_mae(sc, space, cfg.qd, seed, cfg.threads);
                }
            }();
            archive = std::move(r.archive);
            series = std::move(r.series);
            novelty = std::move(r.novelty);
        }

        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();

        ArchiveFileMeta meta;
        meta.scenario_name = sc.name;
        meta.scenario_hash = sc.config_hash;
        meta.method = to_string(cfg.method);
        meta.space = to_string(method_space(cfg.method));
        meta.seed = seed;
        meta.params = params_json(cfg);
        save_archive(archive, meta, (dir / "archive.jsonl").string());
        series.save_csv((dir / "coverage.csv").string());

        if (!novelty.empty()) {
            std::ofstream out(dir / "novelty.csv");
            out << "cell,novelty\n";
            out.precision(17);
            for (const auto& [cell, score] : novelty) out << cell << ',' << score << "\n";
        }

        const nlohmann::json manifest = {
            {"schema_version", kArchiveSchemaVersion},
            {"kind", "run_manifest"},
            {"code_version", kCodeVersion},
            {"config_hash", cfg.config_hash},
            {"scenario", sc.name},
            {"scenario_hash", sc.config_hash},
            {"scenario_path", cfg.scenario_path},
            {"method", to_string(cfg.method)},
            {"space", to_string(method_space(cfg.method))},
            {"seed", seed},
            {"budget", cfg.budget},
            {"archive_spec", spec_json(sc.archive_spec)},
            {"params", params_json(cfg)},
        };
        write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");

        std::string log;
        log += "method=" + std::string(to_string(cfg.method)) + "\n";
        log += "scenario=" + sc.name + "\n";
        log += "seed=" + std::to_string(seed) + "\n";
        log += "budget=" + std::to_string(cfg.budget) + "\n";
        log += "filled_cells=" + std::to_string(archive.filled_cells()) + "\n";
        log += "out_of_bounds=" + std::to_string(archive.out_of_bounds_count()) + "\n";
        log += "sample_failures=" + std::to_string(sample_failures) + "\n";
        log += "coverage=" + std::to_string(archive.coverage()) + "\n";
        log += "elapsed_ms=" + std::to_string(elapsed) + "\n";
        write_text((dir / "log.txt").string(), log);

        results.push_back({dir.string(), seed});
    }
    return results;
}

void cli_compare(const std::vector<std::string>& run_dirs,
                 std::vector<std::int64_t> checkpoints, const std::string& out_prefix) {
    if (run_dirs.empty()) throw ConfigError("compare: no run directories given");

    struct Entry {
        std::string method;
        CoverageSeries series;
    };
    std::vector<Entry> entries;
    nlohmann::json ref_spec;

    for (const std::string& dir : run_dirs) {
        const fs::path p(dir);
        std::ifstream in(p / "manifest.json");
        if (!in) throw IoError(dir + ": missing manifest.json");
        nlohmann::json manifest;
        try {
            in >> manifest;
        } catch (const nlohmann::json::exception& e) {
            throw CorruptFile(dir + "/manifest.json: " + e.what());
        }
        const nlohmann::json spec = manifest.at("archive_spec");
        if (ref_spec.is_null())
            ref_spec = spec;
        else if (spec != ref_spec)
            throw SpecMismatch(dir + ": archive spec differs from the first run");
        entries.push_back({manifest.at("method").get<std::string>(),
                           CoverageSeries::load_csv((p / "coverage.csv").string())});
    }

    if (checkpoints.empty()) {
        std::int64_t max_eval = 0;
        for (const Entry& e : entries)
            for (const auto& pt : e.series.points())
                max_eval = std::max(max_eval, pt.evaluations);
        for (int i = 1; i <= 10; ++i) checkpoints.push_back(max_eval * i / 10);
    }
    std::sort(checkpoints.begin(), checkpoints.end());

    std::map<std::string, std::vector<const CoverageSeries*>> by_method;
    for (const Entry& e : entries) by_method[e.method].push_back(&e.series);

    std::ofstream csv(out_prefix + ".csv");
    if (!csv) throw IoError(out_prefix + ".csv: cannot open for writing");
    csv << "method,evaluations,median_coverage,q1,q3\n";
    csv.precision(17);

    std::vector<std::pair<std::string, CoverageSeries>> median_curves;
    for (const auto& [method, list] : by_method) {
        CoverageSeries curve;
        for (const std::int64_t cp : checkpoints) {
            std::vector<double> vals;
            vals.reserve(list.size());
            for (const CoverageSeries* s : list) vals.push_back(s->coverage_at(cp));
            const double med = median(vals);
            csv << method << ',' << cp << ',' << med << ',' << quantile(vals, 0.25) << ','
                << quantile(vals, 0.75) << "\n";
            // store medians as a pseudo-series for the plot
            const std::int64_t total = 1000000;
            curve.record(cp, static_cast<std::int64_t>(med * total), total);
        }
        median_curves.emplace_back(method, std::move(curve));
    }
    if (!csv) throw IoError(out_prefix + ".csv: write failed");
    write_coverage_svg(median_curves, out_prefix + ".svg");
}

LabelSummary cli_filter_dr(const std::string& archive_path, const std::string& scenario_path,
                           const DrConfig& dr, int threads, const std::string& out_archive,
                           const std::string& out_summary) {
    auto [archive, meta] = load_archive(archive_path);
    const Scenario sc = load_scenario(scenario_path);
    if (meta.scenario_hash != sc.config_hash)
        throw SpecMismatch("filter-dr: archive was produced for scenario hash " +
                           meta.scenario_hash + ", got " + sc.config_hash);

    const LabelSummary summary = label_archive(archive, sc, dr, threads);

    meta.params["dr"] = {{"trials", dr.trials},
                         {"resettle_steps", dr.resettle_steps},
                         {"variance_threshold", dr.variance_threshold},
                         {"translation_frac", dr.translation_frac},
                         {"rotation_mag", dr.rotation_mag},
                         {"seed", dr.seed},
                         {"mass_scaled_impulse", dr.mass_scaled_impulse}};
    save_archive(archive, meta, out_archive);

    std::ofstream out(out_summary);
    if (!out) throw IoError(out_summary + ": cannot open for writing");
    out << "scenario,total,valid,robust,fragile\n";
    out << meta.scenario_name << ',' << summary.total << ',' << summary.valid << ','
        << summary.robust << ',' << summary.fragile << "\n";
    if (!out) throw IoError(out_summary + ": write failed");
    return summary;
}

void cli_analyze(const std::string& archive_path, const std::string& kind,
                 const std::string& scenario_path, const std::string& out_dir) {
    auto [archive, meta] = load_archive(archive_path);
    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    if (kind == "coverage") {
        std::ofstream csv(out / "coverage_summary.csv");
        if (!csv) throw IoError((out / "coverage_summary.csv").string() + ": cannot open");
        csv.precision(17);
        csv << "scenario,filled_cells,total_cells,coverage\n";
        csv << meta.scenario_name << ',' << archive.filled_cells() << ','
            << archive.spec().total_cells() << ',' << archive.coverage() << "\n";
        return;
    }
    if (kind == "heatmap") {
        if (scenario_path.empty())
            throw ConfigError("analyze heatmap: --scenario is required");
        const Scenario sc = load_scenario(scenario_path);
        if (meta.scenario_hash != sc.config_hash)
            throw SpecMismatch("analyze: archive/scenario hash mismatch");
        const HeatmapResult heatmap = placement_heatmap(archive, sc);
        write_heatmap_points(heatmap, (out / "heatmap.xyz").string());
        write_heatmap_svg(heatmap, (out / "heatmap.svg").string());
        return;
    }
    if (kind == "histogram") {
        const PerturbationHistogram per_trial = perturbation_histogram(archive, false);
        const PerturbationHistogram per_pose = perturbation_histogram(archive, true);
        write_histogram_csv(per_trial, (out / "histogram_per_trial.csv").string());
        write_histogram_svg(per_trial, (out / "histogram_per_trial.svg").string());
        write_histogram_csv(per_pose, (out / "histogram_per_pose.csv").string());
        write_histogram_svg(per_pose, (out / "histogram_per_pose.svg").string());
        return;
    }
    throw ConfigError("analyze: unknown kind '" + kind + "' (coverage|heatmap|histogram)");
}

} // namespace placegen
