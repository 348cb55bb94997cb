#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lanecoop/filters.hpp"
#include "lanecoop/lc_detect.hpp"
#include "lanecoop/style.hpp"
#include "lanecoop/trajectory.hpp"

namespace lanecoop {

struct IngestConfig {
  std::size_t window_frames = kWindowFrames;  // 2 s
  std::size_t window_stride = 10;             // 1 s
  std::size_t lc_label_horizon = 20;          // frames before lc_start labeled LC
  double neighbor_range_m = 150.0;
  std::size_t margin_frames = 100;            // 10 s kept on both sides of the event
  double x_min_m = 300.0 * kFtToM;            // monitored segment, 91.44 m
  double x_max_m = 1900.0 * kFtToM;           // 579.12 m
  std::size_t median_window = 51;             // 5 s + center
  std::size_t savgol_window = 11;
  std::size_t savgol_order = 3;
  double max_dv_per_frame = 10.0;             // plausibility gate on smoothed speed, m/s
  double val_fraction = 0.2;
  DetectConfig detect;
};

// ---------------------------------------------------------------------------
// CSV parsing

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), ::tolower);
  return s;
}

inline double parse_number(const std::string& cell, std::size_t line_no,
                           const std::string& column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    while (pos < cell.size() && (cell[pos] == ' ' || cell[pos] == '\t')) ++pos;
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line_no) + ": non-numeric value '" + cell +
                      "' in column " + column);
  }
}

}  // namespace detail

// Parses NGSIM-format CSV. Records come back grouped by vehicle id and
// ordered by frame id; extra columns are ignored.
inline std::map<std::int64_t, std::vector<RawRecord>> parse_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("empty CSV input");
  const auto cols = detail::split_csv_line(header);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cols.size(); ++i) index[detail::lower(cols[i])] = i;

  const std::vector<std::string> required = {"vehicle_id", "frame_id", "local_x", "local_y",
                                             "v_vel",      "v_acc",    "lane_id", "v_class"};
  for (const auto& name : required)
    if (!index.count(name)) throw FormatError("missing required CSV column: " + name);

  std::map<std::int64_t, std::vector<RawRecord>> by_vehicle;
  std::string line;
  std::size_t line_no = 1;
  std::size_t needed = 0;
  for (const auto& name : required) needed = std::max(needed, index[name] + 1);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() < needed)
      throw FormatError("line " + std::to_string(line_no) + ": truncated row (" +
                        std::to_string(cells.size()) + " cells)");
    RawRecord r;
    r.vehicle_id =
        static_cast<std::int64_t>(detail::parse_number(cells[index["vehicle_id"]], line_no, "Vehicle_ID"));
    r.frame_id =
        static_cast<std::int64_t>(detail::parse_number(cells[index["frame_id"]], line_no, "Frame_ID"));
    r.local_x = detail::parse_number(cells[index["local_x"]], line_no, "Local_X");
    r.local_y = detail::parse_number(cells[index["local_y"]], line_no, "Local_Y");
    r.v_vel = detail::parse_number(cells[index["v_vel"]], line_no, "v_Vel");
    r.v_acc = detail::parse_number(cells[index["v_acc"]], line_no, "v_Acc");
    r.lane_id = static_cast<int>(detail::parse_number(cells[index["lane_id"]], line_no, "Lane_ID"));
    r.v_class = static_cast<int>(detail::parse_number(cells[index["v_class"]], line_no, "v_Class"));
    by_vehicle[r.vehicle_id].push_back(r);
  }
  for (auto& [id, records] : by_vehicle)
    std::stable_sort(records.begin(), records.end(),
                     [](const RawRecord& a, const RawRecord& b) { return a.frame_id < b.frame_id; });
  return by_vehicle;
}

inline std::map<std::int64_t, std::vector<RawRecord>> parse_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open CSV file: " + path);
  return parse_csv(f);
}

// Feet to SI. NGSIM's Local_Y runs along the road, Local_X across it.
inline Trajectory to_si(const std::vector<RawRecord>& records) {
  Trajectory tr;
  if (records.empty()) return tr;
  tr.vehicle_id = records.front().vehicle_id;
  tr.t.reserve(records.size());
  for (const auto& r : records) {
    tr.t.push_back(static_cast<double>(r.frame_id) * kDt);
    tr.x_long.push_back(r.local_y * kFtToM);
    tr.y_lat.push_back(r.local_x * kFtToM);
    tr.v.push_back(r.v_vel * kFtToM);
    tr.a.push_back(r.v_acc * kFtToM);
    tr.lane_id.push_back(r.lane_id);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Filtering

struct FilterOutcome {
  std::vector<Trajectory> kept;                 // candidate lane changers
  std::map<std::string, std::size_t> dropped;   // reason -> count
};

namespace detail {

inline bool frames_contiguous(const Trajectory& tr) {
  for (std::size_t i = 1; i < tr.size(); ++i)
    if (std::abs(tr.t[i] - tr.t[i - 1] - kDt) > 1e-6) return false;
  return true;
}

inline std::vector<std::size_t> lane_transitions(const Trajectory& tr) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i < tr.size(); ++i)
    if (tr.lane_id[i] != tr.lane_id[i - 1]) idx.push_back(i);
  return idx;
}

}  // namespace detail

// The retention rules: passenger car, lanes 1-4 throughout, exactly one
// lane-change event, the maneuver inside the monitored segment, and at
// least `margin_frames` on both sides of the event.
inline FilterOutcome filter_vehicles(const std::vector<Trajectory>& trajectories,
                                     const std::vector<int>& vehicle_classes,
                                     const IngestConfig& cfg = {}) {
  if (trajectories.size() != vehicle_classes.size())
    throw ShapeError("filter_vehicles: classes do not match trajectories");
  FilterOutcome out;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& tr = trajectories[i];
    if (vehicle_classes[i] != static_cast<int>(VehicleClass::car)) {
      ++out.dropped["not_car"];
      continue;
    }
    if (tr.size() < 2 * cfg.margin_frames + 2) {
      ++out.dropped["too_short"];
      continue;
    }
    if (!detail::frames_contiguous(tr)) {
      ++out.dropped["frame_gap"];
      continue;
    }
    if (std::any_of(tr.lane_id.begin(), tr.lane_id.end(),
                    [](int l) { return l < 1 || l > 4; })) {
      ++out.dropped["lane_out_of_range"];
      continue;
    }
    const auto transitions = detail::lane_transitions(tr);
    if (transitions.size() != 1) {
      ++out.dropped[transitions.empty() ? "no_lane_change" : "multiple_lane_changes"];
      continue;
    }
    const std::size_t ev = transitions.front();
    if (ev < cfg.margin_frames || ev + cfg.margin_frames >= tr.size()) {
      ++out.dropped["insufficient_margin"];
      continue;
    }
    const std::size_t lo = ev - cfg.margin_frames;
    const std::size_t hi = ev + cfg.margin_frames;
    double x_min = tr.x_long[lo], x_max = tr.x_long[lo];
    for (std::size_t k = lo; k <= hi; ++k) {
      x_min = std::min(x_min, tr.x_long[k]);
      x_max = std::max(x_max, tr.x_long[k]);
    }
    if (x_min < cfg.x_min_m || x_max > cfg.x_max_m) {
      ++out.dropped["outside_segment"];
      continue;
    }
    out.kept.push_back(tr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smoothing

struct SmoothResult {
  Trajectory trajectory;
  bool pass_through = false;  // too short for the configured windows
};

// Rolling median then Savitzky-Golay on both position channels; speed and
// acceleration are recomputed from the smoothed longitudinal positions.
inline SmoothResult smooth(const Trajectory& tr, const IngestConfig& cfg = {}) {
  SmoothResult out;
  out.trajectory = tr;
  if (tr.size() < cfg.median_window || tr.size() < cfg.savgol_window) {
    out.pass_through = true;
    return out;
  }
  Trajectory& s = out.trajectory;
  s.x_long = savgol_filter(rolling_median(tr.x_long, cfg.median_window), cfg.savgol_window,
                           cfg.savgol_order);
  s.y_lat = savgol_filter(rolling_median(tr.y_lat, cfg.median_window), cfg.savgol_window,
                          cfg.savgol_order);
  const std::size_t n = s.size();
  s.v.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0)
      s.v[i] = (s.x_long[1] - s.x_long[0]) / kDt;
    else if (i + 1 == n)
      s.v[i] = (s.x_long[n - 1] - s.x_long[n - 2]) / kDt;
    else
      s.v[i] = (s.x_long[i + 1] - s.x_long[i - 1]) / (2.0 * kDt);
  }
  s.a.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0)
      s.a[i] = (s.v[1] - s.v[0]) / kDt;
    else if (i + 1 == n)
      s.a[i] = (s.v[n - 1] - s.v[n - 2]) / kDt;
    else
      s.a[i] = (s.v[i + 1] - s.v[i - 1]) / (2.0 * kDt);
  }
  return out;
}

inline bool speed_plausible(const Trajectory& tr, double max_dv) {
  for (std::size_t i = 1; i < tr.size(); ++i)
    if (std::abs(tr.v[i] - tr.v[i - 1]) > max_dv) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Episode assembly

namespace detail {

inline std::optional<std::size_t> frame_index_at(const Trajectory& tr, double t) {
  if (tr.empty()) return std::nullopt;
  const double first = tr.t.front();
  const double idx = (t - first) / kDt;
  const auto i = static_cast<long long>(std::llround(idx));
  if (i < 0 || i >= static_cast<long long>(tr.size())) return std::nullopt;
  return static_cast<std::size_t>(i);
}

// Neighbor state resampled onto the episode time grid; positions are
// extrapolated at constant speed beyond the recorded span.
inline Trajectory align_to_grid(const Trajectory& src, const Vec& grid) {
  Trajectory out;
  out.vehicle_id = src.vehicle_id;
  out.t = grid;
  const std::size_t n = grid.size();
  out.x_long.resize(n);
  out.y_lat.resize(n);
  out.v.resize(n);
  out.a.resize(n);
  out.lane_id.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    if (auto idx = frame_index_at(src, t)) {
      out.x_long[i] = src.x_long[*idx];
      out.y_lat[i] = src.y_lat[*idx];
      out.v[i] = src.v[*idx];
      out.a[i] = src.a[*idx];
      out.lane_id[i] = src.lane_id[*idx];
    } else if (t < src.t.front()) {
      const double dt = t - src.t.front();
      out.x_long[i] = src.x_long.front() + src.v.front() * dt;
      out.y_lat[i] = src.y_lat.front();
      out.v[i] = src.v.front();
      out.a[i] = 0.0;
      out.lane_id[i] = src.lane_id.front();
    } else {
      const double dt = t - src.t.back();
      out.x_long[i] = src.x_long.back() + src.v.back() * dt;
      out.y_lat[i] = src.y_lat.back();
      out.v[i] = src.v.back();
      out.a[i] = 0.0;
      out.lane_id[i] = src.lane_id.back();
    }
  }
  return out;
}

}  // namespace detail

struct NeighborOutcome {
  std::optional<Episode> episode;
  std::string drop_reason;
};

// Lead = nearest vehicle ahead in the ego's pre-change lane, t_rear =
// nearest vehicle behind in the target lane; both resolved at the
// lane-change start frame and their identities are frozen there.
inline NeighborOutcome attach_neighbors(const Trajectory& ego, const LcEvent& event,
                                        const std::vector<Trajectory>& all,
                                        const IngestConfig& cfg = {}) {
  NeighborOutcome out;
  const std::size_t margin = cfg.margin_frames;
  if (event.start_idx < margin || event.end_idx + margin >= ego.size()) {
    out.drop_reason = "insufficient_margin";
    return out;
  }

  const std::size_t lo = event.start_idx - margin;
  const std::size_t hi = event.end_idx + margin;
  Episode ep;
  ep.ego.vehicle_id = ego.vehicle_id;
  auto slice = [&](const Vec& v) { return Vec(v.begin() + lo, v.begin() + hi + 1); };
  ep.ego.t = slice(ego.t);
  ep.ego.x_long = slice(ego.x_long);
  ep.ego.y_lat = slice(ego.y_lat);
  ep.ego.v = slice(ego.v);
  ep.ego.a = slice(ego.a);
  ep.ego.lane_id.assign(ego.lane_id.begin() + lo, ego.lane_id.begin() + hi + 1);
  ep.lc_start_idx = event.start_idx - lo;
  ep.lc_end_idx = event.end_idx - lo;
  ep.direction = ego.y_lat[event.end_idx] > ego.y_lat[event.start_idx]
                     ? LaneChangeDirection::right
                     : LaneChangeDirection::left;

  const double t_start = ego.t[event.start_idx];
  const double x_ego = ego.x_long[event.start_idx];
  const int current_lane = ego.lane_id[event.start_idx];
  const int target_lane = ego.lane_id[event.end_idx];

  const Trajectory* lead = nullptr;
  const Trajectory* rear = nullptr;
  double best_lead = cfg.neighbor_range_m;
  double best_rear = cfg.neighbor_range_m;
  for (const auto& other : all) {
    if (other.vehicle_id == ego.vehicle_id) continue;
    const auto idx = detail::frame_index_at(other, t_start);
    if (!idx) continue;
    const double dx = other.x_long[*idx] - x_ego;
    if (other.lane_id[*idx] == current_lane && dx > 0.0 && dx < best_lead) {
      best_lead = dx;
      lead = &other;
    }
    if (other.lane_id[*idx] == target_lane && dx < 0.0 && -dx < best_rear) {
      best_rear = -dx;
      rear = &other;
    }
  }
  if (rear == nullptr) {
    out.drop_reason = "no_t_rear_in_range";
    return out;
  }
  if (lead == nullptr) {
    out.drop_reason = "no_lead_in_range";
    return out;
  }
  ep.lead = detail::align_to_grid(*lead, ep.ego.t);
  ep.t_rear = detail::align_to_grid(*rear, ep.ego.t);

  if (auto feats = extract_features(ep.t_rear)) {
    ep.t_rear_style_features = feats->as_array();
  } else {
    out.drop_reason = "t_rear_too_short";
    return out;
  }
  out.episode = std::move(ep);
  return out;
}

// ---------------------------------------------------------------------------
// Sample windows

namespace detail {

inline double lane_center_offset(double y) {
  const double lane = std::floor(y / kLaneWidthM);
  const double center = (lane + 0.5) * kLaneWidthM;
  return y - center;
}

}  // namespace detail

// Slides 2-s windows over each episode. A window is labeled LC when its
// final frame falls within `lc_label_horizon` frames before the detected
// lane-change start, LK otherwise. The split is stratified by label.
inline SampleSet make_samples(const std::vector<Episode>& episodes, const IngestConfig& cfg,
                              std::uint64_t seed) {
  SampleSet set;
  set.seed = seed;
  for (const auto& ep : episodes) {
    const std::size_t n = ep.ego.size();
    if (n < cfg.window_frames) continue;
    Vec lat_speed(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
      lat_speed[i] = (ep.ego.y_lat[i + 1] - ep.ego.y_lat[i]) / kDt;
    if (n >= 2) lat_speed[n - 1] = lat_speed[n - 2];

    for (std::size_t start = 0; start + cfg.window_frames <= n; start += cfg.window_stride) {
      const std::size_t last = start + cfg.window_frames - 1;
      Sample sample;
      sample.window = Matrix(cfg.window_frames, kFeatureDim);
      for (std::size_t f = 0; f < cfg.window_frames; ++f) {
        const std::size_t i = start + f;
        const double v_e = ep.ego.v[i];
        const double d_ef = std::max(0.0, ep.lead.x_long[i] - ep.ego.x_long[i]);
        const double d_etr = std::max(0.0, ep.ego.x_long[i] - ep.t_rear.x_long[i]);
        sample.window(f, 0) = v_e;
        sample.window(f, 1) = ep.ego.a[i];
        sample.window(f, 2) = detail::lane_center_offset(ep.ego.y_lat[i]);
        sample.window(f, 3) = lat_speed[i];
        sample.window(f, 4) = ep.lead.v[i];
        sample.window(f, 5) = ep.t_rear.v[i];
        sample.window(f, 6) = d_ef;
        sample.window(f, 7) = d_etr;
        sample.window(f, 8) = ep.lead.v[i] - v_e;
        sample.window(f, 9) = ep.t_rear.v[i] - v_e;
      }
      sample.t_rear_style_features = ep.t_rear_style_features;
      const bool is_lc = last + cfg.lc_label_horizon >= ep.lc_start_idx && last <= ep.lc_start_idx;
      sample.action = is_lc ? 1 : 0;
      for (double x : sample.window.data)
        if (!std::isfinite(x)) throw NumericError("make_samples: non-finite feature");
      set.samples.push_back(std::move(sample));
    }
  }

  // stratified split with a fixed seed
  Rng rng = make_rng(seed);
  for (int action : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < set.samples.size(); ++i)
      if (set.samples[i].action == action) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_val = static_cast<std::size_t>(
        std::llround(cfg.val_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < idx.size(); ++k)
      set.samples[idx[k]].split = k < n_val ? 1 : 0;
  }
  return set;
}

inline std::uint64_t sample_set_hash(const SampleSet& set) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& s : set.samples) {
    for (double x : s.window.data) {
      const auto f = static_cast<float>(x);
      h = fnv1a64(&f, sizeof(f), h);
    }
    for (double x : s.t_rear_style_features) {
      const auto f = static_cast<float>(x);
      h = fnv1a64(&f, sizeof(f), h);
    }
    const unsigned char meta[3] = {static_cast<unsigned char>(s.action),
                                   static_cast<unsigned char>(s.split),
                                   static_cast<unsigned char>(s.style & 0xff)};
    h = fnv1a64(meta, sizeof(meta), h);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Full pipeline

struct IngestResult {
  std::vector<Episode> episodes;
  SampleSet samples;
  std::map<std::string, std::size_t> dropped;
  std::size_t vehicles_parsed = 0;
};

inline IngestResult run_ingest(std::map<std::int64_t, std::vector<RawRecord>> raw,
                               const IngestConfig& cfg, std::uint64_t seed) {
  IngestResult result;
  result.vehicles_parsed = raw.size();

  std::vector<Trajectory> all_si;
  std::vector<int> classes;
  for (const auto& [id, records] : raw) {
    all_si.push_back(to_si(records));
    classes.push_back(records.front().v_class);
  }

  // neighbors come from the full smoothed pool, candidates from the filter
  std::vector<Trajectory> pool;
  pool.reserve(all_si.size());
  for (const auto& tr : all_si) {
    auto sm = smooth(tr, cfg);
    pool.push_back(std::move(sm.trajectory));
  }

  FilterOutcome filtered = filter_vehicles(all_si, classes, cfg);
  result.dropped = filtered.dropped;

  for (const auto& candidate : filtered.kept) {
    const Trajectory* smoothed = nullptr;
    for (const auto& p : pool)
      if (p.vehicle_id == candidate.vehicle_id) {
        smoothed = &p;
        break;
      }
    if (smoothed == nullptr || smoothed->size() != candidate.size()) {
      ++result.dropped["smoothing_failed"];
      continue;
    }
    if (!speed_plausible(*smoothed, cfg.max_dv_per_frame)) {
      ++result.dropped["implausible_speed"];
      continue;
    }
    auto event = detect_events(smoothed->y_lat, cfg.detect);
    if (!event) {
      ++result.dropped["no_event_detected"];
      continue;
    }
    auto outcome = attach_neighbors(*smoothed, *event, pool, cfg);
    if (!outcome.episode) {
      ++result.dropped[outcome.drop_reason];
      continue;
    }
    result.episodes.push_back(std::move(*outcome.episode));
  }

  result.samples = make_samples(result.episodes, cfg, seed);
  return result;
}

}  // namespace lanecoop
