#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lanecoop/matrix.hpp"

namespace lanecoop {

enum class VehicleClass : int { motorcycle = 1, car = 2, truck = 3 };

struct RawRecord {
  std::int64_t vehicle_id = 0;
  std::int64_t frame_id = 0;
  double local_x = 0.0;  // lateral, feet
  double local_y = 0.0;  // longitudinal, feet
  double v_vel = 0.0;    // ft/s
  double v_acc = 0.0;    // ft/s^2
  int lane_id = 0;
  int v_class = 0;
};

// SI kinematic time series at 10 Hz.
struct Trajectory {
  std::int64_t vehicle_id = 0;
  Vec t;        // seconds, strictly increasing, step 0.1
  Vec x_long;   // meters
  Vec y_lat;    // meters
  Vec v;        // m/s
  Vec a;        // m/s^2
  std::vector<int> lane_id;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
};

enum class LaneChangeDirection { left, right };

inline const char* direction_name(LaneChangeDirection d) {
  return d == LaneChangeDirection::left ? "left" : "right";
}

// One detected lane change with its neighborhood context. Ego carries at
// least 10 s of data on both sides of the maneuver.
struct Episode {
  Trajectory ego;
  Trajectory lead;    // front vehicle, current lane
  Trajectory t_rear;  // rear vehicle, target lane
  std::size_t lc_start_idx = 0;
  std::size_t lc_end_idx = 0;
  LaneChangeDirection direction = LaneChangeDirection::left;
  std::array<double, 6> t_rear_style_features{};  // summary stats of the rear vehicle
};

enum class Style : int { aggressive = 0, normal = 1, conservative = 2 };

inline const char* style_name(Style s) {
  switch (s) {
    case Style::aggressive: return "aggressive";
    case Style::normal: return "normal";
    case Style::conservative: return "conservative";
  }
  return "normal";
}

inline constexpr std::size_t kWindowFrames = 20;   // 2 s at 10 Hz
inline constexpr std::size_t kInnerFeatures = 4;   // v_E, a_E, lane offset, lateral speed
inline constexpr std::size_t kInterFeatures = 6;   // v_f, v_tr, d_Ef, d_Etr, v_f-v_E, v_tr-v_E
inline constexpr std::size_t kFeatureDim = kInnerFeatures + kInterFeatures;

// A 20-frame, 10-feature training window. Feature column order:
//   0 v_E  1 a_E  2 lateral offset from lane center  3 lateral speed
//   4 v_f  5 v_tr  6 d_Ef  7 d_Etr  8 v_f - v_E  9 v_tr - v_E
struct Sample {
  Matrix window;  // kWindowFrames x kFeatureDim
  std::array<double, 6> t_rear_style_features{};
  int style = -1;  // filled once a style model exists; -1 = unassigned
  int action = 0;  // 0 = LK, 1 = LC
  int split = 0;   // 0 = train, 1 = validation
};

struct SampleSet {
  std::vector<Sample> samples;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  std::size_t count_action(int action) const {
    std::size_t n = 0;
    for (const auto& s : samples) n += s.action == action ? 1 : 0;
    return n;
  }
};

}  // namespace lanecoop
