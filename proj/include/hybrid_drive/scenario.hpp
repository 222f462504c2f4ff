#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hybrid_drive/track.hpp"
#include "hybrid_drive/world.hpp"

namespace hybrid_drive {

/// Opponent placed relative to the ego start: `s_offset` along the track,
/// `e_offset` as an absolute lateral offset (positive right).
struct OpponentPlacement
{
    double s_offset = 0.0;
    double e_offset = 0.0;
    double speed = 0.0;
};

/// A reproducible driving situation.
///
/// File format, one `key = value` per line:
///   id = B
///   track = oval
///   ego = <s> <e> <speed> [<delta_psi>]
///   opponent = <s_offset> <e_offset> <speed>     (repeatable)
///   duration = <seconds>
struct Scenario
{
    std::string id;
    std::string track = "oval";
    double start_s = 0.0;
    double start_e = 0.0;
    double start_speed = 0.0;
    double start_delta_psi = 0.0;
    std::vector<OpponentPlacement> opponents;
    double duration = 5.0;
};

Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::filesystem::path& path);

/// Initial world for a scenario; throws std::invalid_argument when the ego
/// starts off the track.
WorldState scenario_world(const Scenario& sc, const TrackGeometry& geom);

} // namespace hybrid_drive
