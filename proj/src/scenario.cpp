#include "hybrid_drive/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hybrid_drive {

Scenario parse_scenario(std::istream& in)
{
    Scenario sc;
    std::string line;
    int line_no = 0;
    bool have_ego = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw std::invalid_argument("scenario line " + std::to_string(line_no)
                                        + ": expected key = value");
        }
        std::istringstream key_stream(line.substr(0, eq));
        std::istringstream values(line.substr(eq + 1));
        std::string key;
        key_stream >> key;
        const auto fail = [&](const std::string& what) {
            return std::invalid_argument("scenario line " + std::to_string(line_no) + ": " + what);
        };
        if (key == "id") {
            if (!(values >> sc.id)) throw fail("empty id");
        } else if (key == "track") {
            if (!(values >> sc.track)) throw fail("empty track");
        } else if (key == "ego") {
            if (!(values >> sc.start_s >> sc.start_e >> sc.start_speed))
                throw fail("expected ego = <s> <e> <speed> [<delta_psi>]");
            double dpsi = 0.0;
            if (values >> dpsi) sc.start_delta_psi = dpsi;
            have_ego = true;
        } else if (key == "opponent") {
            OpponentPlacement p;
            if (!(values >> p.s_offset >> p.e_offset >> p.speed))
                throw fail("expected opponent = <s_offset> <e_offset> <speed>");
            sc.opponents.push_back(p);
        } else if (key == "duration") {
            if (!(values >> sc.duration) || !(sc.duration > 0.0)) throw fail("duration must be positive");
        } else {
            throw fail("unknown key '" + key + "'");
        }
    }
    if (sc.id.empty()) throw std::invalid_argument("scenario is missing an id");
    if (!have_ego) throw std::invalid_argument("scenario " + sc.id + " is missing the ego line");
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
    return parse_scenario(in);
}

WorldState scenario_world(const Scenario& sc, const TrackGeometry& geom)
{
    if (std::abs(sc.start_e) > geom.half_width())
        throw std::invalid_argument("scenario " + sc.id + " starts off the track");
    const VehiclePose ego = pose_from_track(geom, sc.start_s, sc.start_e, sc.start_delta_psi,
                                            sc.start_speed);
    std::vector<Opponent> opponents;
    int id = 0;
    for (const auto& p : sc.opponents) {
        const OpponentScript script{id++, p.speed, p.e_offset};
        opponents.push_back(place_opponent(geom, sc.start_s + p.s_offset, script));
    }
    return make_world(geom, ego, std::move(opponents));
}

} // namespace hybrid_drive
