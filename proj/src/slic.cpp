#include "segrefine/slic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <tuple>

#include "segrefine/components.hpp"

namespace segrefine::slic {

void SlicParams::validate(std::size_t pixel_count) const {
  if (target_segments < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  if (!(compactness > 0.0)) throw Error(ErrorCode::InvalidArgument, "compactness must be > 0");
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  if (static_cast<std::size_t>(target_segments) > pixel_count) {
    throw Error(ErrorCode::InvalidArgument,
                "K = " + std::to_string(target_segments) + " exceeds pixel count " +
                    std::to_string(pixel_count));
  }
}

std::vector<std::size_t> SegmentMap::sizes() const {
  std::vector<std::size_t> s(static_cast<std::size_t>(n_segments), 0);
  for (std::int32_t id : ids.data()) ++s[static_cast<std::size_t>(id)];
  return s;
}

std::vector<std::vector<std::size_t>> SegmentMap::pixel_lists() const {
  std::vector<std::vector<std::size_t>> lists(static_cast<std::size_t>(n_segments));
  const auto d = ids.data();
  for (std::size_t i = 0; i < d.size(); ++i) lists[static_cast<std::size_t>(d[i])].push_back(i);
  return lists;
}

SegmentMap make_segment_map(Raster<std::int32_t> ids) {
  std::map<std::int32_t, std::int32_t> remap;
  for (std::int32_t& id : ids.data()) {
    if (id < 0) throw Error(ErrorCode::InvalidArgument, "negative segment id");
    auto [it, inserted] = remap.try_emplace(id, static_cast<std::int32_t>(remap.size()));
    id = it->second;
  }
  SegmentMap seg;
  seg.n_segments = static_cast<std::int32_t>(remap.size());
  seg.ids = std::move(ids);
  return seg;
}

double slic_distance(const ClusterCenter& c, const std::array<double, 3>& lab, double x, double y,
                     double s, double m) noexcept {
  const double dl = lab[0] - c.l, da = lab[1] - c.a, db = lab[2] - c.b;
  const double dx = x - c.x, dy = y - c.y;
  const double dc2 = dl * dl + da * da + db * db;
  const double ds2 = dx * dx + dy * dy;
  return std::sqrt(dc2 + ds2 / (s * s) * m * m);
}

double grid_interval(std::size_t pixel_count, int target_segments) {
  return std::sqrt(static_cast<double>(pixel_count) / static_cast<double>(target_segments));
}

namespace {

std::array<double, 3> lab_at(const LabImage& lab, std::size_t i) {
  const auto p = lab.pixel(i);
  return {p[0], p[1], p[2]};
}

// Squared CIELAB gradient used to pick seed positions away from edges.
double seed_gradient(const LabImage& lab, std::size_t y, std::size_t x) {
  const std::size_t h = lab.height(), w = lab.width();
  const std::size_t xl = x > 0 ? x - 1 : x, xr = x + 1 < w ? x + 1 : x;
  const std::size_t yu = y > 0 ? y - 1 : y, yd = y + 1 < h ? y + 1 : y;
  double g = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    const double gx = lab.at(y, xr, c) - lab.at(y, xl, c);
    const double gy = lab.at(yd, x, c) - lab.at(yu, x, c);
    g += gx * gx + gy * gy;
  }
  return g;
}

}  // namespace

std::vector<ClusterCenter> init_clusters(const LabImage& lab, int k, bool perturb) {
  const std::size_t h = lab.height(), w = lab.width();
  if (lab.empty()) throw Error(ErrorCode::EmptyImage, "init_clusters on empty image");
  if (k < 1 || static_cast<std::size_t>(k) > h * w) {
    throw Error(ErrorCode::InvalidArgument, "K must lie in [1, pixel count]");
  }
  const double s = grid_interval(h * w, k);
  const auto nx = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(w / s)));
  const auto ny = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(h / s)));
  const double step_x = static_cast<double>(w) / static_cast<double>(nx);
  const double step_y = static_cast<double>(h) / static_cast<double>(ny);

  std::vector<ClusterCenter> centers;
  centers.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      ClusterCenter c;
      c.x = (static_cast<double>(i) + 0.5) * step_x - 0.5;
      c.y = (static_cast<double>(j) + 0.5) * step_y - 0.5;
      auto px = static_cast<std::size_t>(std::clamp<long>(std::lround(c.x), 0, long(w) - 1));
      auto py = static_cast<std::size_t>(std::clamp<long>(std::lround(c.y), 0, long(h) - 1));

      if (perturb) {
        double best = seed_gradient(lab, py, px);
        std::size_t bx = px, by = py;
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            const long yy = long(py) + dy, xx = long(px) + dx;
            if (yy < 0 || xx < 0 || yy >= long(h) || xx >= long(w)) continue;
            const double g = seed_gradient(lab, std::size_t(yy), std::size_t(xx));
            if (g < best) {
              best = g;
              bx = std::size_t(xx);
              by = std::size_t(yy);
            }
          }
        }
        if (bx != px || by != py) {
          c.x = double(bx);
          c.y = double(by);
          px = bx;
          py = by;
        }
      }
      const auto v = lab_at(lab, py * w + px);
      c.l = v[0];
      c.a = v[1];
      c.b = v[2];
      centers.push_back(c);
    }
  }
  return centers;
}

SegmentMap slic_segment(const LabImage& lab, const SlicParams& params, SlicTrace* trace) {
  if (lab.empty()) throw Error(ErrorCode::EmptyImage, "slic_segment on empty image");
  if (lab.channels() != 3) throw Error(ErrorCode::WrongChannelCount, "slic expects CIELAB input");
  const std::size_t h = lab.height(), w = lab.width(), n = h * w;
  params.validate(n);

  const double s = grid_interval(n, params.target_segments);
  const double m = params.compactness;
  std::vector<ClusterCenter> centers = init_clusters(lab, params.target_segments);
  const std::size_t k = centers.size();

  std::vector<std::int32_t> labels(n, -1);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  const auto pix = lab.data();

  auto distance_to = [&](std::size_t c, std::size_t p) {
    return slic_distance(centers[c], {pix[3 * p], pix[3 * p + 1], pix[3 * p + 2]},
                         double(p % w), double(p / w), s, m);
  };

  struct Accum {
    double l = 0, a = 0, b = 0, x = 0, y = 0;
    std::size_t count = 0;
  };
  std::vector<Accum> acc(k);
  std::vector<ClusterCenter> assigned_with;

  for (int iter = 0; iter < params.iterations; ++iter) {
    // Previous assignment stays a candidate, so this step never raises the objective.
    double before = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (labels[p] >= 0) {
        dist[p] = distance_to(std::size_t(labels[p]), p);
        before += dist[p];
      }
    }

    for (std::size_t c = 0; c < k; ++c) {
      const long x0 = std::max<long>(0, long(std::floor(centers[c].x - s)));
      const long x1 = std::min<long>(long(w) - 1, long(std::ceil(centers[c].x + s)));
      const long y0 = std::max<long>(0, long(std::floor(centers[c].y - s)));
      const long y1 = std::min<long>(long(h) - 1, long(std::ceil(centers[c].y + s)));
      for (long y = y0; y <= y1; ++y) {
        for (long x = x0; x <= x1; ++x) {
          const std::size_t p = std::size_t(y) * w + std::size_t(x);
          const double d = distance_to(c, p);
          if (d < dist[p] || (d == dist[p] && std::int32_t(c) < labels[p])) {
            dist[p] = d;
            labels[p] = std::int32_t(c);
          }
        }
      }
    }

    // Sweep for pixels outside every window.
    for (std::size_t p = 0; p < n; ++p) {
      if (labels[p] >= 0) continue;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = distance_to(c, p);
        if (d < dist[p]) {
          dist[p] = d;
          labels[p] = std::int32_t(c);
        }
      }
    }

    if (trace) {
      double after = 0.0, squared = 0.0;
      for (double d : dist) {
        after += d;
        squared += d * d;
      }
      trace->objective_before.push_back(iter == 0 ? std::numeric_limits<double>::infinity()
                                                  : before);
      trace->objective_after.push_back(after);
      trace->squared_objective.push_back(squared);
      trace->iterations_run = iter + 1;
    }
    assigned_with = centers;

    std::fill(acc.begin(), acc.end(), Accum{});
    for (std::size_t p = 0; p < n; ++p) {
      Accum& a = acc[std::size_t(labels[p])];
      a.l += pix[3 * p];
      a.a += pix[3 * p + 1];
      a.b += pix[3 * p + 2];
      a.x += double(p % w);
      a.y += double(p / w);
      ++a.count;
    }
    double max_shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (acc[c].count == 0) continue;
      const double inv = 1.0 / double(acc[c].count);
      ClusterCenter next{acc[c].l * inv, acc[c].a * inv, acc[c].b * inv, acc[c].x * inv,
                         acc[c].y * inv};
      max_shift = std::max(max_shift, std::hypot(next.x - centers[c].x, next.y - centers[c].y));
      centers[c] = next;
    }
    if (params.early_exit && max_shift < params.early_exit_shift) break;
  }

  SegmentMap raw = make_segment_map(Raster<std::int32_t>(h, w, 1, std::move(labels)));
  if (trace) {
    trace->centers = assigned_with;
    trace->unenforced = raw;
  }
  if (!params.enforce_connectivity) return raw;
  const auto min_size =
      static_cast<std::size_t>(double(n) / (4.0 * double(params.target_segments)));
  return enforce_connectivity(raw, min_size);
}

SegmentMap enforce_connectivity(const SegmentMap& seg, std::size_t min_size) {
  const std::size_t h = seg.height(), w = seg.width();
  const Components comps = label_components(seg.ids);
  const std::size_t nc = comps.count();
  const auto cid = comps.ids.data();
  const auto sid = seg.ids.data();

  // The largest piece of each segment (first in scan order on ties) is never an orphan.
  std::vector<std::int32_t> main_piece(static_cast<std::size_t>(seg.n_segments), -1);
  std::vector<std::int32_t> segment_of(nc, -1);
  for (std::size_t p = 0; p < h * w; ++p) segment_of[std::size_t(cid[p])] = sid[p];
  for (std::size_t c = 0; c < nc; ++c) {
    auto& best = main_piece[std::size_t(segment_of[c])];
    if (best < 0 || comps.sizes[c] > comps.sizes[std::size_t(best)]) best = std::int32_t(c);
  }

  std::vector<char> orphan(nc, 0);
  bool any_orphan = false;
  for (std::size_t c = 0; c < nc; ++c) {
    if (main_piece[std::size_t(segment_of[c])] != std::int32_t(c) && comps.sizes[c] < min_size) {
      orphan[c] = 1;
      any_orphan = true;
    }
  }

  std::vector<std::int32_t> root(nc);
  for (std::size_t c = 0; c < nc; ++c) root[c] = std::int32_t(c);

  if (any_orphan) {
    // Shared boundary length (4-neighbor pixel pairs) between components.
    std::vector<std::map<std::int32_t, std::size_t>> border(nc);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t p = y * w + x;
        auto link = [&](std::size_t q) {
          const std::int32_t a = cid[p], b = cid[q];
          if (a == b) return;
          ++border[std::size_t(a)][b];
          ++border[std::size_t(b)][a];
        };
        if (x + 1 < w) link(p + 1);
        if (y + 1 < h) link(p + w);
      }
    }

    std::vector<std::size_t> size = comps.sizes;
    std::vector<std::int32_t> parent(nc);
    for (std::size_t c = 0; c < nc; ++c) parent[c] = std::int32_t(c);
    using Entry = std::tuple<std::size_t, std::int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (std::size_t c = 0; c < nc; ++c) {
      if (orphan[c]) queue.emplace(size[c], std::int32_t(c));
    }

    while (!queue.empty()) {
      const auto [sz, o] = queue.top();
      queue.pop();
      const auto ou = std::size_t(o);
      if (parent[ou] != o || !orphan[ou] || size[ou] != sz || size[ou] >= min_size) continue;
      if (border[ou].empty()) continue;

      std::int32_t target = -1;
      std::size_t longest = 0;
      for (const auto& [nb, len] : border[ou]) {
        if (len > longest) {  // std::map iterates ascending, so ties keep the lowest index
          longest = len;
          target = nb;
        }
      }
      const auto tu = std::size_t(target);
      parent[ou] = target;
      size[tu] += size[ou];
      for (const auto& [nb, len] : border[ou]) {
        if (nb == target) continue;
        border[tu][nb] += len;
        auto& back = border[std::size_t(nb)];
        back.erase(o);
        back[target] += len;
      }
      border[tu].erase(o);
      border[ou].clear();
      if (orphan[tu] && size[tu] < min_size) queue.emplace(size[tu], target);
    }

    for (std::size_t c = 0; c < nc; ++c) {
      std::int32_t r = std::int32_t(c);
      while (parent[std::size_t(r)] != r) r = parent[std::size_t(r)];
      root[c] = r;
    }
  }

  Raster<std::int32_t> out(h, w, 1);
  auto od = out.data();
  for (std::size_t p = 0; p < h * w; ++p) od[p] = root[std::size_t(cid[p])];
  return make_segment_map(std::move(out));
}

SegmentMap enforce_connectivity(const SegmentMap& seg) {
  const std::size_t n = seg.pixel_count();
  const auto k = std::max<std::int32_t>(1, seg.n_segments);
  return enforce_connectivity(seg, static_cast<std::size_t>(double(n) / (4.0 * double(k))));
}

}  // namespace segrefine::slic
