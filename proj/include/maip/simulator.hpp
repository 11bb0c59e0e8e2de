#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maip/rng.hpp"
#include "maip/world.hpp"

namespace maip {

struct IdmParams {
    double v0 = 12.0;     // desired speed, m/s
    double T = 1.5;       // time headway, s
    double s0 = 2.0;      // standstill gap, m
    double a_max = 1.5;   // comfortable acceleration, m/s^2
    double b = 2.0;       // comfortable deceleration, m/s^2
    double delta = 4.0;   // velocity exponent
    double b_hard = 4.5;  // emergency deceleration bound, m/s^2
};

struct IdmResult {
    double accel = 0;
    bool collision = false;
};

// Intelligent Driver Model acceleration; gap <= 0 flags a collision and
// returns the emergency deceleration. Result is clamped to [-b_hard, a_max].
IdmResult idm_accel(double v, double v_lead, double gap, const IdmParams& p);

struct VehicleState {
    int id = 0;
    double x = 0, y = 0;
    double theta = 0;  // degrees in [-180, 180)
    double v = 0;      // m/s, >= 0
    double a = 0;      // m/s^2, in [-b_hard, a_max]
    int lane_id = 0;
    Intent intent = Intent::F;
    double s = 0;  // center arc length along path(lane_id, intent); not serialized
};

struct PedestrianState {
    int id = 0;
    double x = 0, y = 0;
    double speed = 1.2;     // m/s along the crosswalk axis
    int crosswalk_id = 0;
    int dir = 1;            // +-1 along the crosswalk axis
};

struct LightState {
    LightColor ns = LightColor::Green;
    LightColor ew = LightColor::Red;
    int phase_tick = 0;  // position within the signal cycle

    LightColor color(LightGroup g) const { return g == LightGroup::NS ? ns : ew; }
};

struct Frame {
    int t = 0;
    LightState lights;
    std::vector<VehicleState> vehicles;
    std::vector<PedestrianState> peds;
};

struct Episode {
    int ep_id = 0;
    uint64_t seed = 0;
    std::string scenario_case;  // "left" | "merge" | "ped"
    std::vector<Frame> frames;
};

struct SimConfig {
    WorldConfig world;
    IdmParams idm;
    double dt = 0.2;
    double vehicle_length = 4.5;
    double vehicle_width = 2.0;
    double turn_speed_left = 5.5;   // m/s cap inside a left-turn arc
    double turn_speed_right = 3.0;  // m/s cap inside a right-turn arc
    double left_window_s = 6.0;     // oncoming time-to-box window for left turns
    double merge_headway_s = 3.0;   // feeder gap acceptance for right turns
    double ped_conflict_halfwidth = 3.0;
    double ped_speed_min = 0.8, ped_speed_max = 1.8;
    double ped_spawn_prob = 0.04;   // per tick per crosswalk during walk phase
    int max_peds_per_crosswalk = 2;
    double spawn_speed_min = 5.0, spawn_speed_max = 9.0;
    double spawn_clearance = 18.0;
    double episode_s = 60.0;
    int min_vehicles = 4, max_vehicles = 6;
    int target_vehicles = 0;  // set per episode; 0 = do not respawn
};

// Signal cycle: NS green, NS yellow, EW green, EW yellow; the opposite group
// holds red throughout, so exactly one group is green or yellow at any tick.
LightState light_state_at(int phase_tick, const SimConfig& cfg);
int light_cycle_ticks(const SimConfig& cfg);

struct Controls {
    double accel = 0;
    double steer_theta = 0;  // commanded heading = path tangent at the new position
};

// Priority-rule policy on top of IDM car following. Total: always returns
// a control for any well-formed frame.
Controls behavior_policy(const WorldMap& world, const Frame& frame, const VehicleState& ego,
                         const SimConfig& cfg);

// Advances one tick: vehicle kinematics along intention paths, pedestrians,
// lights, despawn/respawn. Pure function of (world, frame, cfg, rng state).
Frame step(const WorldMap& world, const Frame& frame, const SimConfig& cfg, Rng& rng);

// Builds the t=0 frame for a scenario case ("left", "merge", "ped").
Frame make_initial_frame(const WorldMap& world, const SimConfig& cfg, Rng& rng,
                         const std::string& scenario_case);

Episode generate_episode(const WorldMap& world, const SimConfig& cfg, uint64_t seed, int ep_id,
                         const std::string& scenario_case);

struct ScenarioMix {
    double left = 1.0 / 3.0;
    double merge = 1.0 / 3.0;
    double ped = 1.0 / 3.0;
};

std::string scenario_case_for(int ep_index, const ScenarioMix& mix);

std::vector<Episode> generate_dataset(const WorldMap& world, const SimConfig& cfg, int n_episodes,
                                      uint64_t seed, const ScenarioMix& mix);

// --- shared rule geometry (also used by the acceptance checker) ---

// Soonest possible time for a vehicle at speed v to cover dist, accelerating
// at a_max toward v0.
double optimistic_arrival_time(double dist, double v, const IdmParams& p);

// IDM stopping envelope: the desired standstill gap at speed v. A vehicle
// closer than this to a mandatory stop point is already braking.
double braking_envelope(double v, const IdmParams& p);

// True if the pedestrian is on the roadway part of its crosswalk and within
// the lateral conflict window of the given path crossing.
bool pedestrian_conflicts(const WorldMap& world, const PedestrianState& ped,
                          const Crosswalk& cw, Vec2 crossing_point, double halfwidth);

}  // namespace maip
