#include "evcharge/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evcharge/error.hpp"
#include "evcharge/random.hpp"

namespace evcharge {

namespace {

struct Segment {
  double lo;
  double hi;
  double cumulative;  // mass up to and including this segment
};

std::vector<Segment> intensity_segments(const DemandProfile& profile) {
  std::vector<Segment> segs;
  double acc = 0.0;
  // Hour slots repeat daily so horizons running past midnight keep a defined intensity.
  const int first_hour = static_cast<int>(std::floor(profile.horizon_start / 60.0));
  const int last_hour = static_cast<int>(std::ceil(profile.horizon_end / 60.0));
  for (int h = first_hour; h < last_hour; ++h) {
    const double lo = std::max(profile.horizon_start, h * 60.0);
    const double hi = std::min(profile.horizon_end, (h + 1) * 60.0);
    const double w = profile.hourly_weights[((h % 24) + 24) % 24];
    if (hi <= lo || w <= 0.0) continue;
    acc += w * (hi - lo);
    segs.push_back({lo, hi, acc});
  }
  return segs;
}

// Distance from `from` to the region boundary along unit direction (dx, dy).
double reach(const Region& r, const Point& from, double dx, double dy) {
  double t = std::numeric_limits<double>::infinity();
  if (dx > 0) t = std::min(t, (r.max_x - from.x) / dx);
  if (dx < 0) t = std::min(t, (r.min_x - from.x) / dx);
  if (dy > 0) t = std::min(t, (r.max_y - from.y) / dy);
  if (dy < 0) t = std::min(t, (r.min_y - from.y) / dy);
  return std::max(0.0, t);
}

}  // namespace

std::vector<Request> generate_demand(const DemandProfile& profile, std::size_t n,
                                     std::uint64_t seed) {
  if (auto problems = profile.problems(); !problems.empty()) throw ValidationError(problems);
  std::vector<Request> out;
  if (n == 0) return out;

  const auto segs = intensity_segments(profile);
  const double total_mass = segs.back().cumulative;

  const double mean = profile.trip_len_mean;
  const double sigma2 = std::log1p(profile.trip_len_var / (mean * mean));
  const double mu = std::log(mean) - 0.5 * sigma2;
  const double sigma = std::sqrt(sigma2);

  Rng rng(seed);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Request req;
    const double target = rng.uniform() * total_mass;
    auto seg = std::lower_bound(segs.begin(), segs.end(), target,
                                [](const Segment& s, double v) { return s.cumulative < v; });
    if (seg == segs.end()) seg = std::prev(segs.end());
    const double seg_start_mass = seg == segs.begin() ? 0.0 : std::prev(seg)->cumulative;
    const double frac = (target - seg_start_mass) / (seg->cumulative - seg_start_mass);
    req.arrival = std::clamp(seg->lo + frac * (seg->hi - seg->lo), seg->lo,
                             std::nextafter(seg->hi, seg->lo));

    const Region& r = profile.region;
    req.origin = {rng.uniform(r.min_x, r.max_x), rng.uniform(r.min_y, r.max_y)};
    double length = std::exp(mu + sigma * rng.normal());

    double best_reach = -1.0;
    double best_dx = 1.0;
    double best_dy = 0.0;
    bool placed = false;
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double bearing = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double dx = std::cos(bearing);
      const double dy = std::sin(bearing);
      const double room = reach(r, req.origin, dx, dy);
      if (room >= length) {
        req.destination = {req.origin.x + length * dx, req.origin.y + length * dy};
        placed = true;
        break;
      }
      if (room > best_reach) {
        best_reach = room;
        best_dx = dx;
        best_dy = dy;
      }
    }
    if (!placed) {
      length = best_reach;
      req.destination = {req.origin.x + length * best_dx, req.origin.y + length * best_dy};
    }
    req.destination.x = std::clamp(req.destination.x, r.min_x, r.max_x);
    req.destination.y = std::clamp(req.destination.y, r.min_y, r.max_y);
    if (req.destination == req.origin) {
      // Only reachable from an exact corner; nudge inward.
      req.destination.x = req.origin.x < r.max_x ? std::min(r.max_x, req.origin.x + 0.1)
                                                 : req.origin.x - 0.1;
    }
    req.passengers = profile.passengers;
    out.push_back(req);
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const Request& a, const Request& b) { return a.arrival < b.arrival; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

}  // namespace evcharge
