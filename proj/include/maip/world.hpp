#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "maip/geometry.hpp"

namespace maip {

// Approaches are named by travel direction; index = quarter turns CCW applied
// to the canonical south-side northbound approach.
enum class Approach { NB = 0, WB = 1, SB = 2, EB = 3 };

// Lane types of the intersection: L1 = {F}, L2 = {F,L}, L3 = {F,R}.
enum class LaneType { L1, L2, L3 };

enum class Intent { F = 0, L = 1, R = 2 };

enum class LightGroup { NS, EW };
enum class LightColor { Red, Green, Yellow };

char intent_char(Intent i);
Intent intent_from_char(char c);
char color_char(LightColor c);
LightColor color_from_char(char c);

struct WorldConfig {
    double extent = 100.0;
    double lane_width = 3.5;
    double crosswalk_width = 3.0;
    double crosswalk_gap = 0.2;   // between intersection box and strip
    double sidewalk_width = 2.0;
    double stopline_gap = 1.0;    // from crosswalk strip (or box) to stop line
    double green_s = 15.0;
    double yellow_s = 3.0;
    double left_turn_radius_margin = 0.0;  // reserved
};

struct Lane {
    int id = 0;
    Approach approach = Approach::NB;
    LaneType type = LaneType::L1;
    double stop_s = 0;    // stop line, arc length along any of the lane's paths
    double entry_s = 0;   // intersection-box entry
    std::vector<Intent> allowed;
};

struct Crosswalk {
    int id = 0;
    Rect strip;
    int axis = 0;          // 0: pedestrians move along x, 1: along y
    double road_lo = 0;    // crossing-axis span that lies on the roadway
    double road_hi = 0;
};

struct LightPost {
    Approach approach = Approach::NB;
    LightGroup group = LightGroup::NS;
    Vec2 position;
};

// Classification of a point of the static world, used by the rasterizer.
enum class RegionKind { LaneL1, LaneL2, LaneL3, Road, Crosswalk, Sidewalk, Infeasible };

// Where a lane path crosses a crosswalk strip, in path arc length.
struct PathCrossing {
    int crosswalk_id = 0;
    double s_begin = 0;
    double s_end = 0;
};

// Static world geometry: a four-way right-hand-traffic intersection with
// three typed inbound lanes per approach, two pedestrian crosswalks on the
// vertical road, and one signal head per approach in two opposing groups.
class WorldMap {
  public:
    WorldConfig cfg;
    double extent = 100.0;
    Rect box;                 // intersection interior
    Rect road_v, road_h;      // the two road rectangles
    std::vector<Lane> lanes;  // 12: 4 approaches x {L2 inner, L1 middle, L3 outer}
    std::vector<Crosswalk> crosswalks;
    std::vector<LightPost> lights;

    const Lane& lane(int id) const;
    const Path& path(int lane_id, Intent intent) const;
    const std::vector<PathCrossing>& crossings(int lane_id, Intent intent) const;

    // Arc-length bounds of the turn arc on a lane's L/R path; nullopt for F.
    std::optional<std::pair<double, double>> arc_span(int lane_id, Intent intent) const;
    // s beyond which a vehicle center has left the intersection box.
    double box_clear_s(int lane_id, Intent intent) const;
    // For L3 lanes: arc length along the feeder approach's straight path at
    // which it reaches this lane's right-turn merge point.
    double merge_s_on_feeder(int lane_id) const;

    RegionKind classify(Vec2 p) const;

    static LightGroup group_of(Approach a) {
        return (static_cast<int>(a) % 2 == 0) ? LightGroup::NS : LightGroup::EW;
    }
    static Approach opposite(Approach a) { return static_cast<Approach>((static_cast<int>(a) + 2) % 4); }
    // Approach whose straight traffic occupies the leg a right turn from `a` merges into.
    static Approach right_turn_feeder(Approach a) {
        return static_cast<Approach>((static_cast<int>(a) + 3) % 4);
    }

    // Local frame helper: coordinates rotated so that `a` becomes the
    // canonical northbound approach.
    Vec2 to_local(Vec2 p, Approach a) const;

  private:
    friend WorldMap build_world(const WorldConfig&);
    struct PathSlot {
        Path path;
        std::vector<PathCrossing> crossings;
        std::optional<std::pair<double, double>> arc;
        double clear_s = 0;
        bool valid = false;
    };
    std::array<PathSlot, 36> paths_;  // [lane_id * 3 + intent]
    std::array<double, 12> merge_s_{};
    std::vector<Rect> lane_corridors_;  // aligned with lanes

    PathSlot& slot(int lane_id, Intent intent);
    const PathSlot& slot(int lane_id, Intent intent) const;
};

// Validates the configuration and constructs the map. ConfigError on
// geometrically inconsistent input.
WorldMap build_world(const WorldConfig& cfg);

}  // namespace maip
