#include "maip/world.hpp"

#include <cmath>

#include "maip/errors.hpp"

namespace maip {

char intent_char(Intent i) {
    switch (i) {
        case Intent::F: return 'F';
        case Intent::L: return 'L';
        case Intent::R: return 'R';
    }
    return '?';
}

Intent intent_from_char(char c) {
    switch (c) {
        case 'F': return Intent::F;
        case 'L': return Intent::L;
        case 'R': return Intent::R;
    }
    throw ConfigError(std::string("unknown intent code '") + c + "'");
}

char color_char(LightColor c) {
    switch (c) {
        case LightColor::Red: return 'R';
        case LightColor::Green: return 'G';
        case LightColor::Yellow: return 'Y';
    }
    return '?';
}

LightColor color_from_char(char c) {
    switch (c) {
        case 'R': return LightColor::Red;
        case 'G': return LightColor::Green;
        case 'Y': return LightColor::Yellow;
    }
    throw ConfigError(std::string("unknown light code '") + c + "'");
}

const Lane& WorldMap::lane(int id) const {
    if (id < 0 || id >= static_cast<int>(lanes.size())) {
        throw LookupError("unknown lane id " + std::to_string(id));
    }
    return lanes[static_cast<size_t>(id)];
}

WorldMap::PathSlot& WorldMap::slot(int lane_id, Intent intent) {
    return paths_[static_cast<size_t>(lane_id * 3 + static_cast<int>(intent))];
}

const WorldMap::PathSlot& WorldMap::slot(int lane_id, Intent intent) const {
    const auto& s = paths_[static_cast<size_t>(lane_id * 3 + static_cast<int>(intent))];
    if (!s.valid) {
        throw LookupError("lane " + std::to_string(lane_id) + " does not allow intent " +
                          intent_char(intent));
    }
    return s;
}

const Path& WorldMap::path(int lane_id, Intent intent) const {
    lane(lane_id);
    return slot(lane_id, intent).path;
}

const std::vector<PathCrossing>& WorldMap::crossings(int lane_id, Intent intent) const {
    lane(lane_id);
    return slot(lane_id, intent).crossings;
}

std::optional<std::pair<double, double>> WorldMap::arc_span(int lane_id, Intent intent) const {
    lane(lane_id);
    return slot(lane_id, intent).arc;
}

double WorldMap::box_clear_s(int lane_id, Intent intent) const {
    lane(lane_id);
    return slot(lane_id, intent).clear_s;
}

double WorldMap::merge_s_on_feeder(int lane_id) const {
    const Lane& l = lane(lane_id);
    if (l.type != LaneType::L3) {
        throw LookupError("lane " + std::to_string(lane_id) + " has no right-turn merge point");
    }
    return merge_s_[static_cast<size_t>(lane_id)];
}

Vec2 WorldMap::to_local(Vec2 p, Approach a) const {
    const Vec2 c{extent / 2, extent / 2};
    return rotate_quarter(p, c, -static_cast<int>(a));
}

RegionKind WorldMap::classify(Vec2 p) const {
    for (const Crosswalk& cw : crosswalks) {
        if (cw.strip.contains(p)) return RegionKind::Crosswalk;
    }
    for (size_t i = 0; i < lanes.size(); ++i) {
        if (lane_corridors_[i].contains(p)) {
            switch (lanes[i].type) {
                case LaneType::L1: return RegionKind::LaneL1;
                case LaneType::L2: return RegionKind::LaneL2;
                case LaneType::L3: return RegionKind::LaneL3;
            }
        }
    }
    if (road_v.contains(p) || road_h.contains(p)) return RegionKind::Road;
    const Rect sw_v{road_v.xmin - cfg.sidewalk_width, road_v.ymin,
                    road_v.xmax + cfg.sidewalk_width, road_v.ymax};
    const Rect sw_h{road_h.xmin, road_h.ymin - cfg.sidewalk_width, road_h.xmax,
                    road_h.ymax + cfg.sidewalk_width};
    if (sw_v.contains(p) || sw_h.contains(p)) return RegionKind::Sidewalk;
    return RegionKind::Infeasible;
}

namespace {

// Record where a path runs through each crosswalk strip.
std::vector<PathCrossing> find_crossings(const Path& path, const std::vector<Crosswalk>& cws) {
    constexpr double kStep = 0.2;
    std::vector<PathCrossing> out;
    for (const Crosswalk& cw : cws) {
        bool inside = false;
        double begin = 0;
        for (double s = 0; s <= path.length() + kStep; s += kStep) {
            const bool in = cw.strip.contains(path.eval(std::min(s, path.length())).pos);
            if (in && !inside) {
                inside = true;
                begin = s;
            } else if (!in && inside) {
                inside = false;
                out.push_back({cw.id, begin, s});
            }
        }
        if (inside) out.push_back({cw.id, begin, path.length()});
    }
    return out;
}

double find_clear_s(const Path& path, const Rect& box) {
    constexpr double kStep = 0.2;
    double last_inside = 0;
    for (double s = 0; s <= path.length(); s += kStep) {
        if (box.contains(path.eval(s).pos)) last_inside = s;
    }
    return last_inside;
}

}  // namespace

WorldMap build_world(const WorldConfig& cfg) {
    if (cfg.lane_width <= 0) throw ConfigError("lane_width must be positive");
    if (cfg.crosswalk_width <= 0) throw ConfigError("crosswalk_width must be positive");
    if (cfg.sidewalk_width <= 0) throw ConfigError("sidewalk_width must be positive");
    if (cfg.green_s <= 0 || cfg.yellow_s <= 0) throw ConfigError("light phases must be positive");
    const double half_road = 3.0 * cfg.lane_width;
    if (2 * half_road >= cfg.extent * 0.8) {
        throw ConfigError("six lanes of width " + std::to_string(cfg.lane_width) +
                          " do not fit the extent");
    }
    const double c = cfg.extent / 2;
    const double box_lo = c - half_road, box_hi = c + half_road;
    if (box_lo - cfg.crosswalk_gap - cfg.crosswalk_width - cfg.stopline_gap <= cfg.extent * 0.1) {
        throw ConfigError("crosswalk and stop line do not fit between box and map edge");
    }

    WorldMap w;
    w.cfg = cfg;
    w.extent = cfg.extent;
    w.box = {box_lo, box_lo, box_hi, box_hi};
    w.road_v = {box_lo, 0, box_hi, cfg.extent};
    w.road_h = {0, box_lo, cfg.extent, box_hi};

    // Crosswalks on the south and north legs of the vertical road.
    const double cw_south_hi = box_lo - cfg.crosswalk_gap;
    const double cw_south_lo = cw_south_hi - cfg.crosswalk_width;
    const double cw_north_lo = box_hi + cfg.crosswalk_gap;
    const double cw_north_hi = cw_north_lo + cfg.crosswalk_width;
    w.crosswalks.push_back({0, {box_lo, cw_south_lo, box_hi, cw_south_hi}, 0, box_lo, box_hi});
    w.crosswalks.push_back({1, {box_lo, cw_north_lo, box_hi, cw_north_hi}, 0, box_lo, box_hi});

    const Vec2 center{c, c};
    const double hw = cfg.lane_width / 2;

    // Canonical NB geometry; lane order inner->outer is L2, L1, L3.
    struct LocalLane {
        LaneType type;
        double offset;  // lane center x minus road center
        std::vector<Intent> allowed;
    };
    const std::array<LocalLane, 3> locals = {{
        {LaneType::L2, 0.5 * cfg.lane_width, {Intent::F, Intent::L}},
        {LaneType::L1, 1.5 * cfg.lane_width, {Intent::F}},
        {LaneType::L3, 2.5 * cfg.lane_width, {Intent::F, Intent::R}},
    }};

    const double r_left = half_road + cfg.lane_width * 0.5;   // inner lane to inner lane
    const double r_right = cfg.lane_width * 0.5;              // curb lane to curb lane

    for (int q = 0; q < 4; ++q) {
        const auto approach = static_cast<Approach>(q);
        const bool has_cw = (q % 2 == 0);  // crosswalks sit on the vertical road
        const double stop_y =
            has_cw ? cw_south_lo - cfg.stopline_gap : box_lo - cfg.stopline_gap;
        for (const LocalLane& ll : locals) {
            Lane lane;
            lane.id = static_cast<int>(w.lanes.size());
            lane.approach = approach;
            lane.type = ll.type;
            lane.allowed = ll.allowed;
            lane.stop_s = stop_y;     // inbound runs from y=0, so s == y locally
            lane.entry_s = box_lo;
            const double lx = c + ll.offset;

            auto rot = [&](Vec2 p) { return rotate_quarter(p, center, q); };

            for (Intent intent : ll.allowed) {
                auto& ps = w.paths_[static_cast<size_t>(lane.id * 3 + static_cast<int>(intent))];
                Path& p = ps.path;
                if (intent == Intent::F) {
                    p.add_line(rot({lx, 0}), rot({lx, cfg.extent}));
                } else if (intent == Intent::L) {
                    // quarter arc from heading +y to heading -x, CCW
                    const Vec2 arc_c{box_lo, box_lo};
                    p.add_line(rot({lx, 0}), rot({lx, box_lo}));
                    const double phi0 = q * kPi / 2.0;
                    p.add_arc(rot(arc_c), r_left, phi0, phi0 + kPi / 2.0);
                    p.add_line(rot({box_lo, c + locals[0].offset}),
                               rot({0, c + locals[0].offset}));
                    ps.arc = {{box_lo, box_lo + r_left * kPi / 2.0}};
                } else {
                    // quarter arc from heading +y to heading +x, CW
                    const Vec2 arc_c{lx + r_right, box_lo};
                    p.add_line(rot({lx, 0}), rot({lx, box_lo}));
                    const double phi0 = kPi + q * kPi / 2.0;
                    p.add_arc(rot(arc_c), r_right, phi0, phi0 - kPi / 2.0);
                    p.add_line(rot({lx + r_right, box_lo + r_right}),
                               rot({cfg.extent, box_lo + r_right}));
                    ps.arc = {{box_lo, box_lo + r_right * kPi / 2.0}};
                }
                ps.valid = true;
            }
            w.lanes.push_back(lane);

            // inbound corridor rectangle for the static map
            const Rect corridor{lx - hw, 0, lx + hw, box_lo};
            w.lane_corridors_.push_back(corridor.rotated_quarter(center, q));
        }

        // signal head at the curb next to the stop line
        const Vec2 light_local{box_hi + 1.2, stop_y};
        w.lights.push_back({approach, WorldMap::group_of(approach),
                            rotate_quarter(light_local, center, q)});
    }

    // crossings, clear distances, merge points
    for (const Lane& lane : w.lanes) {
        for (Intent intent : lane.allowed) {
            auto& ps = w.paths_[static_cast<size_t>(lane.id * 3 + static_cast<int>(intent))];
            ps.crossings = find_crossings(ps.path, w.crosswalks);
            ps.clear_s = find_clear_s(ps.path, w.box);
        }
        if (lane.type == LaneType::L3) {
            // merge point = end of the right-turn arc, projected onto the
            // feeder approach's curb-lane straight path
            const auto& ps = w.paths_[static_cast<size_t>(lane.id * 3 + static_cast<int>(Intent::R))];
            const Vec2 merge_pos = ps.path.eval(ps.arc->second).pos;
            const Approach feeder = WorldMap::right_turn_feeder(lane.approach);
            for (const Lane& fl : w.lanes) {
                if (fl.approach == feeder && fl.type == LaneType::L3) {
                    const auto s = w.paths_[static_cast<size_t>(fl.id * 3)].path.project(
                        merge_pos, 0, cfg.extent * 2, 1.0);
                    w.merge_s_[static_cast<size_t>(lane.id)] = s.value_or(box_hi);
                }
            }
        }
    }

    return w;
}

}  // namespace maip
