#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mot/assoc/assocnet.hpp"
#include "mot/core/optimizer.hpp"
#include "mot/data/detections.hpp"
#include "mot/data/scenario.hpp"
#include "mot/eval/clearmot.hpp"
#include "mot/sim/pairs.hpp"
#include "mot/sim/simnet.hpp"
#include "mot/track/tracker.hpp"

namespace mot::cli {

/// Flat, versioned key=value run configuration. Every key is registered with
/// a type, default and range; unknown keys and out-of-range values are hard
/// errors so a typo cannot silently skew a run.
class RunConfig {
public:
    RunConfig(); // defaults

    static RunConfig from_file(const std::string& path);
    void apply_file(const std::string& path);
    /// "key=value" override (CLI). Throws on unknown key or bad value.
    void set(const std::string& key, const std::string& value);

    /// Writes the fully resolved configuration, sorted, with the version
    /// header. Re-running from this file reproduces the run.
    void write(const std::string& path) const;

    std::int64_t geti(const std::string& key) const;
    double getd(const std::string& key) const;

    std::uint64_t seed() const { return static_cast<std::uint64_t>(geti("seed")); }

    // typed views
    sim::GridGeometry grid() const;
    data::AppearanceGeometry appearance_geometry() const;
    sim::SimNetConfig simnet_config() const;
    assoc::AssocNetConfig assocnet_config() const;
    track::TrackerConfig tracker_config() const;
    data::NoiseModel noise_model() const;
    data::ScenarioConfig scenario_config() const;
    sim::PairGenConfig pair_config() const;
    eval::MotConfig mot_config() const;
    core::LrSchedule simnet_schedule() const;
    core::LrSchedule assocnet_schedule() const;

private:
    struct Entry {
        bool is_int = false;
        double value = 0.0;
        double min = 0.0;
        double max = 0.0;
    };
    std::map<std::string, Entry> entries_;

    void define(const std::string& key, double def, double min, double max, bool is_int = false);
    const Entry& at(const std::string& key) const;
};

} // namespace mot::cli
