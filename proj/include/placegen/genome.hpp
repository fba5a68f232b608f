#pragma once

#include <string>
#include <vector>

#include "placegen/error.hpp"
#include "placegen/rng.hpp"

namespace placegen {

enum class SpaceTag { naive, contact };

inline const char* to_string(SpaceTag t) {
    return t == SpaceTag::naive ? "naive" : "contact";
}

inline SpaceTag space_tag_from_string(const std::string& s) {
    if (s == "naive") return SpaceTag::naive;
    if (s == "contact") return SpaceTag::contact;
    throw ConfigError("unknown search space '" + s + "'");
}

inline int genome_length(SpaceTag t) { return t == SpaceTag::naive ? 6 : 7; }

/// Flat real vector in [-1, 1]^n; decodes to an initial pose.
struct Genome {
    SpaceTag space = SpaceTag::naive;
    std::vector<double> values;
};

inline Genome random_genome(SpaceTag tag, Rng& rng) {
    Genome g;
    g.space = tag;
    g.values.resize(genome_length(tag));
    for (double& v : g.values) v = rng.uniform(-1.0, 1.0);
    return g;
}

/// Gaussian per-gene mutation with probability ind_pb, clamped to [-1, 1].
inline Genome mutate(const Genome& parent, double ind_pb, double sigma, Rng& rng) {
    Genome child = parent;
    for (double& v : child.values) {
        if (rng.uniform01() < ind_pb) {
            v = std::clamp(v + rng.normal(0.0, sigma), -1.0, 1.0);
        }
    }
    return child;
}

} // namespace placegen
