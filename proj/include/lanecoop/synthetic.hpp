#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "lanecoop/style.hpp"
#include "lanecoop/trajectory.hpp"

namespace lanecoop::synthetic {

// Logistic lateral profile with its 1%..99% transition spanning `duration`
// seconds around `t_mid`.
inline double sigmoid_lateral(double t, double t_mid, double duration, double amplitude,
                              double y0) {
  const double k = 2.0 * std::log(99.0) / duration;
  return y0 + amplitude / (1.0 + std::exp(-k * (t - t_mid)));
}

struct LaneChangeSpec {
  double t_mid = 12.0;
  double duration = 5.0;       // 1%..99% transition time, seconds
  double amplitude = kLaneWidthM;
  double y0 = 0.5 * kLaneWidthM;  // start at a lane center
  double total_time = 24.0;
  double speed = 12.0;         // longitudinal, m/s
  double noise_sigma = 0.0;    // lateral position noise, meters
};

inline Trajectory make_lane_change_trajectory(const LaneChangeSpec& spec, Rng& rng,
                                              std::int64_t vehicle_id = 1) {
  Trajectory tr;
  tr.vehicle_id = vehicle_id;
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.total_time / kDt)) + 1;
  tr.t.resize(n);
  tr.x_long.resize(n);
  tr.y_lat.resize(n);
  tr.v.assign(n, spec.speed);
  tr.a.assign(n, 0.0);
  tr.lane_id.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * kDt;
    tr.t[i] = t;
    tr.x_long[i] = 100.0 + spec.speed * t;
    double y = sigmoid_lateral(t, spec.t_mid, spec.duration, spec.amplitude, spec.y0);
    if (spec.noise_sigma > 0.0) y += gaussian(rng, 0.0, spec.noise_sigma);
    tr.y_lat[i] = y;
    tr.lane_id[i] = static_cast<int>(std::floor(tr.y_lat[i] / kLaneWidthM)) + 1;
  }
  return tr;
}

struct LaneKeepSpec {
  double y0 = 0.5 * kLaneWidthM;
  double weave_amplitude = 0.0;  // in-lane oscillation, meters
  double weave_period = 4.0;
  double total_time = 24.0;
  double speed = 12.0;
  double noise_sigma = 0.0;
};

inline Trajectory make_lane_keeping_trajectory(const LaneKeepSpec& spec, Rng& rng,
                                               std::int64_t vehicle_id = 1) {
  Trajectory tr;
  tr.vehicle_id = vehicle_id;
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.total_time / kDt)) + 1;
  tr.t.resize(n);
  tr.x_long.resize(n);
  tr.y_lat.resize(n);
  tr.v.assign(n, spec.speed);
  tr.a.assign(n, 0.0);
  tr.lane_id.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * kDt;
    tr.t[i] = t;
    tr.x_long[i] = 100.0 + spec.speed * t;
    // envelope keeps the weave local so the trajectory returns to its lane center
    const double envelope = std::exp(-std::pow((t - 0.5 * spec.total_time) / 4.0, 2.0));
    double y = spec.y0 +
               spec.weave_amplitude * envelope * std::sin(2.0 * M_PI * t / spec.weave_period);
    if (spec.noise_sigma > 0.0) y += gaussian(rng, 0.0, spec.noise_sigma);
    tr.y_lat[i] = y;
    tr.lane_id[i] = static_cast<int>(std::floor(tr.y_lat[i] / kLaneWidthM)) + 1;
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Rule-generated decision corpus. The label is a deterministic function of
// the target-lane gap, the closing speed, and the rear driver's style:
// cooperative (conservative) drivers accept smaller gaps. The style is only
// observable through the rear vehicle's statistics, so models without the
// style-conditioned score face an irreducible ambiguity in the
// style-dependent gap band.

struct DecisionCorpusSpec {
  std::size_t n_samples = 1600;
  double val_fraction = 0.2;
  double gap_threshold[3] = {28.0, 18.0, 10.0};  // aggressive, normal, conservative
  double dv_threshold = 1.0;                     // max closing speed of the rear vehicle
  double gap_margin = 2.0;
  double dv_margin = 0.3;
};

// Rear-driver statistics drawn from three separated populations.
inline std::array<double, 6> style_blob_features(int blob, Rng& rng) {
  const double v_centers[3] = {16.0, 11.0, 7.0};
  const double a_std_centers[3] = {1.6, 0.9, 0.35};
  std::array<double, 6> f{};
  f[0] = gaussian(rng, v_centers[blob], 0.25);               // v_mean
  f[1] = gaussian(rng, 0.0, 0.05);                           // a_mean
  f[2] = gaussian(rng, 1.0 + 0.3 * blob, 0.1);               // v_std
  f[3] = gaussian(rng, a_std_centers[blob], 0.05);           // a_std
  f[4] = f[0] + std::abs(gaussian(rng, 2.0, 0.3));           // v_max
  f[5] = f[3] * 2.5 + std::abs(gaussian(rng, 0.3, 0.1));     // a_max
  return f;
}

inline SampleSet make_decision_corpus(const DecisionCorpusSpec& spec, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  SampleSet set;
  set.seed = seed;
  set.samples.reserve(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    const int style = static_cast<int>(uniform_index(rng, 3));
    const double theta_gap = spec.gap_threshold[style];

    double d_etr = 0.0;
    do {  // about a third of the draws land in the style-discriminative band
      const double u = uniform(rng, 0.0, 1.0);
      if (u < 0.35)
        d_etr = uniform(rng, 8.0, 30.0);
      else if (u < 0.675)
        d_etr = uniform(rng, 2.0, 8.0);
      else
        d_etr = uniform(rng, 30.0, 40.0);
    } while (std::abs(d_etr - theta_gap) < spec.gap_margin);
    double dv_tr = 0.0;
    do {
      dv_tr = uniform(rng, -3.0, 3.0);
    } while (std::abs(dv_tr - spec.dv_threshold) < spec.dv_margin);

    const double v_e = uniform(rng, 8.0, 15.0);
    const double v_tr = v_e + dv_tr;
    const double v_f = v_e + uniform(rng, -2.0, 2.0);
    const double d_ef = uniform(rng, 8.0, 60.0);
    const int action = d_etr >= theta_gap && dv_tr <= spec.dv_threshold ? 1 : 0;

    Sample s;
    s.action = action;
    s.style = -1;  // assigned later by the recognizer
    s.t_rear_style_features = style_blob_features(style, rng);
    s.window = Matrix(kWindowFrames, kFeatureDim);
    double a_e = gaussian(rng, 0.0, 0.25);
    for (std::size_t f = 0; f < kWindowFrames; ++f) {
      const double t = static_cast<double>(f) * kDt;
      a_e += gaussian(rng, 0.0, 0.03);
      s.window(f, 0) = v_e + a_e * t + gaussian(rng, 0.0, 0.05);
      s.window(f, 1) = a_e + gaussian(rng, 0.0, 0.05);
      s.window(f, 2) = gaussian(rng, 0.0, 0.12);            // lane-center offset
      s.window(f, 3) = gaussian(rng, 0.0, 0.04);            // lateral speed
      s.window(f, 4) = v_f + gaussian(rng, 0.0, 0.08);
      s.window(f, 5) = v_tr + gaussian(rng, 0.0, 0.08);
      s.window(f, 6) = std::max(0.0, d_ef + (v_f - v_e) * t + gaussian(rng, 0.0, 0.1));
      s.window(f, 7) = std::max(0.0, d_etr + (v_e - v_tr) * t + gaussian(rng, 0.0, 0.1));
      s.window(f, 8) = s.window(f, 4) - s.window(f, 0);
      s.window(f, 9) = s.window(f, 5) - s.window(f, 0);
    }
    set.samples.push_back(std::move(s));
  }

  // stratified split
  for (int action : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < set.samples.size(); ++i)
      if (set.samples[i].action == action) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_val = static_cast<std::size_t>(
        std::llround(spec.val_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < idx.size(); ++k)
      set.samples[idx[k]].split = k < n_val ? 1 : 0;
  }
  return set;
}

// Style model fitted on the corpus's rear-driver statistics; used to turn
// stored statistics into one-hot labels for training.
inline StyleModel fit_corpus_style_model(const SampleSet& set, std::uint64_t seed) {
  std::vector<StyleFeatures> features;
  for (const auto& s : set.samples)
    features.push_back(StyleFeatures::from_array(s.t_rear_style_features));
  StyleModel model = fit_style_clusters(features, seed);
  std::vector<Style> labels;
  for (const auto& f : features) labels.push_back(cluster_style(model, f));
  train_recognizer(model, features, labels, seed);
  return model;
}

// ---------------------------------------------------------------------------
// NGSIM-format CSV scene generator: lane-change triples (ego, lead, rear)
// plus lane keepers and a few vehicles that every filter rule should drop.

struct NgsimSceneSpec {
  std::size_t n_changers = 5;
  std::size_t n_keepers = 4;
  bool include_distractors = true;
  double total_time = 44.0;
  double lateral_noise = 0.03;  // meters, on the reported positions only
};

namespace detail {

struct CsvVehicle {
  std::int64_t id;
  int v_class;
  Vec y_lat;      // meters
  Vec x_long;     // meters
  Vec v;          // m/s
  Vec a;          // m/s^2
  std::vector<int> lane_id;
  std::size_t first_frame = 0;
};

inline CsvVehicle straight_vehicle(std::int64_t id, int v_class, double x0, double speed,
                                   int lane, std::size_t n_frames) {
  CsvVehicle veh;
  veh.id = id;
  veh.v_class = v_class;
  veh.y_lat.resize(n_frames);
  veh.x_long.resize(n_frames);
  veh.v.assign(n_frames, speed);
  veh.a.assign(n_frames, 0.0);
  veh.lane_id.assign(n_frames, lane);
  const double y = (static_cast<double>(lane) - 0.5) * kLaneWidthM;
  for (std::size_t i = 0; i < n_frames; ++i) {
    veh.y_lat[i] = y;
    veh.x_long[i] = x0 + speed * static_cast<double>(i) * kDt;
  }
  return veh;
}

}  // namespace detail

inline std::string make_ngsim_csv(const NgsimSceneSpec& spec, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  const auto n_frames = static_cast<std::size_t>(std::llround(spec.total_time / kDt)) + 1;
  std::vector<detail::CsvVehicle> vehicles;
  std::int64_t next_id = 101;

  for (std::size_t c = 0; c < spec.n_changers; ++c) {
    const int lane0 = 1 + static_cast<int>(uniform_index(rng, 3));  // 1..3, change to lane0+1
    const double speed = uniform(rng, 10.0, 13.0);
    const double t_mid = uniform(rng, 18.0, 22.0);
    const double duration = uniform(rng, 4.0, 7.0);
    const double x0 = uniform(rng, 95.0, 110.0);
    const double y0 = (static_cast<double>(lane0) - 0.5) * kLaneWidthM;

    detail::CsvVehicle ego;
    ego.id = next_id++;
    ego.v_class = static_cast<int>(VehicleClass::car);
    ego.y_lat.resize(n_frames);
    ego.x_long.resize(n_frames);
    ego.v.assign(n_frames, speed);
    ego.a.assign(n_frames, 0.0);
    ego.lane_id.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
      const double t = static_cast<double>(i) * kDt;
      const double y_clean = sigmoid_lateral(t, t_mid, duration, kLaneWidthM, y0);
      ego.x_long[i] = x0 + speed * t;
      ego.y_lat[i] = y_clean + (spec.lateral_noise > 0.0
                                    ? gaussian(rng, 0.0, spec.lateral_noise)
                                    : 0.0);
      // lane ids follow the noise-free path so the transition is clean
      ego.lane_id[i] = static_cast<int>(std::floor(y_clean / kLaneWidthM)) + 1;
    }
    vehicles.push_back(std::move(ego));

    const double lead_gap = uniform(rng, 22.0, 45.0);
    const double lead_speed = speed + uniform(rng, -0.8, 0.8);
    vehicles.push_back(detail::straight_vehicle(next_id++, 2, x0 + lead_gap, lead_speed, lane0,
                                                n_frames));
    const double rear_gap = uniform(rng, 10.0, 30.0);
    const double rear_speed = speed + uniform(rng, -1.2, 1.2);
    vehicles.push_back(detail::straight_vehicle(next_id++, 2, x0 - rear_gap, rear_speed,
                                                lane0 + 1, n_frames));
  }

  for (std::size_t k = 0; k < spec.n_keepers; ++k) {
    const int lane = 1 + static_cast<int>(uniform_index(rng, 4));
    vehicles.push_back(detail::straight_vehicle(next_id++, 2, uniform(rng, 60.0, 200.0),
                                                uniform(rng, 9.0, 14.0), lane, n_frames));
  }

  if (spec.include_distractors) {
    // truck with a lane change (class rule)
    detail::CsvVehicle truck;
    truck.id = next_id++;
    truck.v_class = static_cast<int>(VehicleClass::truck);
    truck.y_lat.resize(n_frames);
    truck.x_long.resize(n_frames);
    truck.v.assign(n_frames, 11.0);
    truck.a.assign(n_frames, 0.0);
    truck.lane_id.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
      const double t = static_cast<double>(i) * kDt;
      const double y = sigmoid_lateral(t, 20.0, 5.0, kLaneWidthM, 0.5 * kLaneWidthM);
      truck.x_long[i] = 100.0 + 11.0 * t;
      truck.y_lat[i] = y;
      truck.lane_id[i] = static_cast<int>(std::floor(y / kLaneWidthM)) + 1;
    }
    vehicles.push_back(std::move(truck));

    // car with two lane changes (single-event rule)
    detail::CsvVehicle doubler;
    doubler.id = next_id++;
    doubler.v_class = 2;
    doubler.y_lat.resize(n_frames);
    doubler.x_long.resize(n_frames);
    doubler.v.assign(n_frames, 12.0);
    doubler.a.assign(n_frames, 0.0);
    doubler.lane_id.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
      const double t = static_cast<double>(i) * kDt;
      const double y = sigmoid_lateral(t, 15.0, 5.0, kLaneWidthM, 0.5 * kLaneWidthM) +
                       sigmoid_lateral(t, 30.0, 5.0, kLaneWidthM, 0.0);
      doubler.x_long[i] = 95.0 + 12.0 * t;
      doubler.y_lat[i] = y;
      doubler.lane_id[i] = static_cast<int>(std::floor(y / kLaneWidthM)) + 1;
    }
    vehicles.push_back(std::move(doubler));

    // short fragment (margin rule)
    detail::CsvVehicle stub = detail::straight_vehicle(next_id++, 2, 150.0, 12.0, 2, 60);
    vehicles.push_back(std::move(stub));
  }

  std::ostringstream csv;
  csv << "Vehicle_ID,Frame_ID,Global_Time,Local_X,Local_Y,v_Vel,v_Acc,Lane_ID,v_Class\n";
  char buf[256];
  for (const auto& veh : vehicles) {
    for (std::size_t i = 0; i < veh.y_lat.size(); ++i) {
      const std::size_t frame = veh.first_frame + i;
      std::snprintf(buf, sizeof(buf), "%lld,%zu,%zu,%.4f,%.4f,%.4f,%.4f,%d,%d\n",
                    static_cast<long long>(veh.id), frame, frame * 100,
                    veh.y_lat[i] / kFtToM, veh.x_long[i] / kFtToM, veh.v[i] / kFtToM,
                    veh.a[i] / kFtToM, veh.lane_id[i], veh.v_class);
      csv << buf;
    }
  }
  return csv.str();
}

}  // namespace lanecoop::synthetic
