#include "placegen/archive.hpp"

#include <cmath>
#include <fstream>

#include "placegen/error.hpp"

namespace placegen {

namespace {

constexpr double kPi = 3.14159265358979323846;

// floor binning; values exactly on the box max clamp into the last bin
int bin_of(double value, double lo, double hi, int n) {
    const double u = (value - lo) / (hi - lo);
    if (u < 0.0 || u > 1.0) return -1;
    return std::min(static_cast<int>(u * n), n - 1);
}

int angle_bin(double angle, double lo, double hi, int n) {
    const double u = (angle - lo) / (hi - lo);
    return std::clamp(static_cast<int>(u * n), 0, n - 1);
}

} // namespace

std::optional<std::array<int, 6>> cell_coords(const FeatureDescriptor& phi,
                                              const ArchiveSpec& spec) {
    const int ix = bin_of(phi.position.x(), spec.box_lo.x(), spec.box_hi.x(), spec.nx);
    const int iy = bin_of(phi.position.y(), spec.box_lo.y(), spec.box_hi.y(), spec.ny);
    const int iz = bin_of(phi.position.z(), spec.box_lo.z(), spec.box_hi.z(), spec.nz);
    if (ix < 0 || iy < 0 || iz < 0) return std::nullopt;

    const Vec3 euler = euler_xyz_from_quat(phi.orientation.normalized());
    const int ir = angle_bin(wrap_angle(euler.x()), -kPi, kPi, spec.nr);
    const int ip = angle_bin(euler.y(), -kPi / 2, kPi / 2, spec.np);
    const int iyw = angle_bin(wrap_angle(euler.z()), -kPi, kPi, spec.nyaw);
    return std::array<int, 6>{ix, iy, iz, ir, ip, iyw};
}

std::optional<std::int64_t> cell_index(const FeatureDescriptor& phi, const ArchiveSpec& spec) {
    const auto c = cell_coords(phi, spec);
    if (!c) return std::nullopt;
    const auto& v = *c;
    std::int64_t idx = v[0];
    idx = idx * spec.ny + v[1];
    idx = idx * spec.nz + v[2];
    idx = idx * spec.nr + v[3];
    idx = idx * spec.np + v[4];
    idx = idx * spec.nyaw + v[5];
    return idx;
}

std::int64_t orientation_bin(const Quat& q, const ArchiveSpec& spec) {
    const Vec3 euler = euler_xyz_from_quat(q.normalized());
    const std::int64_t ir = angle_bin(wrap_angle(euler.x()), -kPi, kPi, spec.nr);
    const std::int64_t ip = angle_bin(euler.y(), -kPi / 2, kPi / 2, spec.np);
    const std::int64_t iyw = angle_bin(wrap_angle(euler.z()), -kPi, kPi, spec.nyaw);
    return (ir * spec.np + ip) * spec.nyaw + iyw;
}

const char* to_string(OfferStatus s) {
    switch (s) {
        case OfferStatus::inserted_new: return "inserted_new";
        case OfferStatus::replaced: return "replaced";
        case OfferStatus::threshold_accepted: return "threshold_accepted";
        case OfferStatus::rejected: return "rejected";
        case OfferStatus::out_of_bounds: return "out_of_bounds";
    }
    return "rejected";
}

double Archive::threshold(std::int64_t cell) const {
    const auto it = thresholds_.find(cell);
    return it == thresholds_.end() ? f_min_ : it->second;
}

OfferOutcome Archive::offer(const Elite& candidate) {
    OfferOutcome out;
    const auto cell = cell_index(candidate.feature, spec_);
    if (!cell) {
        ++out_of_bounds_;
        out.status = OfferStatus::out_of_bounds;
        return out;
    }
    out.cell = *cell;

    const auto it = cells_.find(*cell);
    const double f = candidate.fitness;

    if (annealed_) {
        const double t = threshold(*cell);
        out.delta = f - t;
        if (!(f > t)) {
            out.status = OfferStatus::rejected;
            return out;
        }
        thresholds_[*cell] = (1.0 - alpha_) * t + alpha_ * f;
        if (it == cells_.end()) {
            cells_.emplace(*cell, candidate);
            out.status = OfferStatus::inserted_new;
        } else if (f > it->second.fitness) {
            it->second = candidate;
            out.status = OfferStatus::replaced;
        } else {
            out.status = OfferStatus::threshold_accepted;
        }
        return out;
    }

    if (it == cells_.end()) {
        cells_.emplace(*cell, candidate);
        out.status = OfferStatus::inserted_new;
        out.delta = 0.0;
        return out;
    }
    out.delta = f - it->second.fitness;
    if (f > it->second.fitness) {
        it->second = candidate;
        out.status = OfferStatus::replaced;
    } else {
        out.status = OfferStatus::rejected; // ties keep the incumbent
    }
    return out;
}

void CoverageSeries::record(std::int64_t evaluations, std::int64_t filled, std::int64_t total) {
    if (!points_.empty() && points_.back().evaluations == evaluations) {
        points_.back().filled = filled;
        return;
    }
    if (!points_.empty() && points_.back().filled == filled) return;
    points_.push_back({evaluations, filled, total});
}

double CoverageSeries::coverage_at(std::int64_t evaluations) const {
    double cov = 0.0;
    for (const Point& p : points_) {
        if (p.evaluations > evaluations) break;
        cov = p.coverage();
    }
    return cov;
}

void CoverageSeries::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "evaluations,filled_success_cells,total_cells,coverage\n";
    out.precision(17);
    for (const Point& p : points_)
        out << p.evaluations << ',' << p.filled << ',' << p.total_cells << ','
            << p.coverage() << "\n";
    if (!out) throw IoError(path + ": write failed");
}

CoverageSeries CoverageSeries::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open");
    CoverageSeries series;
    std::string line;
    if (!std::getline(in, line)) throw CorruptFile(path + ": empty coverage file");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Point p{};
        if (std::sscanf(line.c_str(), "%ld,%ld,%ld", &p.evaluations, &p.filled,
                        &p.total_cells) != 3)
            throw CorruptFile(path + ": bad coverage row '" + line + "'");
        series.points_.push_back(p);
    }
    return series;
}

namespace {

nlohmann::json pose_to_json(const Pose& p) {
    return {{"pos", {p.position.x(), p.position.y(), p.position.z()}},
            {"quat", {p.orientation.w(), p.orientation.x(), p.orientation.y(),
                      p.orientation.z()}}};
}

Pose pose_from_json(const nlohmann::json& j) {
    Pose p;
    const auto& pos = j.at("pos");
    const auto& q = j.at("quat");
    p.position = Vec3(pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>());
    p.orientation = Quat(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                         q.at(3).get<double>());
    return p;
}

nlohmann::json spec_to_json(const ArchiveSpec& s) {
    return {{"box_lo", {s.box_lo.x(), s.box_lo.y(), s.box_lo.z()}},
            {"box_hi", {s.box_hi.x(), s.box_hi.y(), s.box_hi.z()}},
            {"position_bins", {s.nx, s.ny, s.nz}},
            {"orientation_bins", {s.nr, s.np, s.nyaw}}};
}

ArchiveSpec spec_from_json(const nlohmann::json& j) {
    ArchiveSpec s;
    const auto& lo = j.at("box_lo");
    const auto& hi = j.at("box_hi");
    s.box_lo = Vec3(lo.at(0).get<double>(), lo.at(1).get<double>(), lo.at(2).get<double>());
    s.box_hi = Vec3(hi.at(0).get<double>(), hi.at(1).get<double>(), hi.at(2).get<double>());
    const auto& pb = j.at("position_bins");
    s.nx = pb.at(0).get<int>();
    s.ny = pb.at(1).get<int>();
    s.nz = pb.at(2).get<int>();
    const auto& ob = j.at("orientation_bins");
    s.nr = ob.at(0).get<int>();
    s.np = ob.at(1).get<int>();
    s.nyaw = ob.at(2).get<int>();
    return s;
}

} // namespace

void save_archive(const Archive& archive, const ArchiveFileMeta& meta, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");

    nlohmann::json header = {
        {"schema_version", kArchiveSchemaVersion},
        {"kind", "archive"},
        {"scenario", meta.scenario_name},
        {"scenario_hash", meta.scenario_hash},
        {"method", meta.method},
        {"space", meta.space},
        {"seed", meta.seed},
        {"params", meta.params},
        {"archive_spec", spec_to_json(archive.spec())},
        {"annealed", archive.is_annealed()},
        {"alpha", archive.alpha()},
        {"f_min", archive.f_min()},
        {"out_of_bounds", archive.out_of_bounds_count()},
    };
    out << header.dump() << "\n";

    for (const auto& [cell, elite] : archive.cells()) {
        nlohmann::json rec = {
            {"cell", cell},
            {"space", to_string(elite.genome.space)},
            {"genome", elite.genome.values},
            {"initial_pose", pose_to_json(elite.initial_pose)},
            {"fitness", elite.fitness},
            {"feature", pose_to_json(elite.feature)},
            {"reason", to_string(elite.reason)},
        };
        if (elite.robust.has_value()) {
            rec["robust"] = *elite.robust;
            rec["dr_sigmas"] = elite.dr_sigmas;
        } else {
            rec["robust"] = nullptr;
        }
        out << rec.dump() << "\n";
    }
    if (!out) throw IoError(path + ": write failed");
}

std::pair<Archive, ArchiveFileMeta> load_archive(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw CorruptFile(path + ": missing header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFile(path + ": bad header: " + e.what());
    }
    if (!header.contains("schema_version") ||
        header.at("schema_version").get<int>() != kArchiveSchemaVersion)
        throw SchemaMismatch(path + ": unsupported schema version");

    ArchiveFileMeta meta;
    Archive archive(ArchiveSpec{});
    try {
        meta.scenario_name = header.at("scenario").get<std::string>();
        meta.scenario_hash = header.at("scenario_hash").get<std::string>();
        meta.method = header.at("method").get<std::string>();
        meta.space = header.at("space").get<std::string>();
        meta.seed = header.at("seed").get<std::uint64_t>();
        meta.params = header.at("params");

        ArchiveSpec spec = spec_from_json(header.at("archive_spec"));
        if (header.at("annealed").get<bool>())
            archive = Archive::annealed(spec, header.at("alpha").get<double>(),
                                        header.at("f_min").get<double>());
        else
            archive = Archive(spec);

        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const nlohmann::json rec = nlohmann::json::parse(line);
            Elite e;
            e.genome.space = space_tag_from_string(rec.at("space").get<std::string>());
            e.genome.values = rec.at("genome").get<std::vector<double>>();
            e.initial_pose = pose_from_json(rec.at("initial_pose"));
            e.fitness = rec.at("fitness").get<double>();
            e.feature = pose_from_json(rec.at("feature"));
            e.reason = reject_reason_from_string(rec.at("reason").get<std::string>());
            if (rec.contains("robust") && !rec.at("robust").is_null()) {
                e.robust = rec.at("robust").get<bool>();
                e.dr_sigmas = rec.at("dr_sigmas").get<std::vector<double>>();
            }
            archive.cells_mutable().emplace(rec.at("cell").get<std::int64_t>(), std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFile(path + ": " + e.what());
    }
    return {std::move(archive), std::move(meta)};
}

} // namespace placegen
