#include "flowsim/preprocess.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <vector>

#include "flowsim/error.hpp"

namespace flowsim {

namespace {

// Neighbour offsets in Zhang-Suen order P2..P9 (N, NE, E, SE, S, SW, W, NW).
constexpr std::array<int, 8> kRingDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kRingDy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<bool, 8> ring(const BinaryImage& img, int x, int y) {
  std::array<bool, 8> n{};
  for (std::size_t i = 0; i < 8; ++i) n[i] = img.get(x + kRingDx[i], y + kRingDy[i]);
  return n;
}

bool zhang_suen_deletable(const std::array<bool, 8>& p, bool first_pass) {
  int count = 0;
  int transitions = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    count += p[i] ? 1 : 0;
    if (!p[i] && p[(i + 1) % 8]) ++transitions;
  }
  if (count < 2 || count > 6 || transitions != 1) return false;
  const bool n = p[0], e = p[2], s = p[4], w = p[6];
  if (first_pass) return !(n && e && s) && !(e && s && w);
  return !(n && e && w) && !(n && s && w);
}

std::vector<Point> foreground_pixels(const BinaryImage& img) {
  std::vector<Point> out;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

// Drops from `doomed` the first pixel of every component that would
// otherwise vanish in one sub-iteration (a 2x2 square, for instance).
void keep_vanishing_components(const BinaryImage& img, std::vector<Point>& doomed) {
  BinaryImage marked(img.width(), img.height());
  for (const auto& p : doomed) marked.set(p, true);
  BinaryImage seen(img.width(), img.height());
  std::vector<Point> spared;
  std::vector<Point> stack;
  for (const auto& start : doomed) {
    if (seen.at(start)) continue;
    bool touches_survivor = false;
    stack = {start};
    seen.set(start, true);
    while (!stack.empty()) {
      const Point p = stack.back();
      stack.pop_back();
      for (std::size_t i = 0; i < 8; ++i) {
        const Point q{p.x + kRingDx[i], p.y + kRingDy[i]};
        if (!img.get(q)) continue;
        if (!marked.at(q)) {
          touches_survivor = true;
        } else if (!seen.at(q)) {
          seen.set(q, true);
          stack.push_back(q);
        }
      }
    }
    if (!touches_survivor) spared.push_back(start);
  }
  if (spared.empty()) return;
  std::sort(spared.begin(), spared.end());
  std::erase_if(doomed, [&](const Point& p) { return std::binary_search(spared.begin(), spared.end(), p); });
}

// Returns true if any pixel was deleted.
bool zhang_suen_to_convergence(BinaryImage& img) {
  std::vector<Point> live = foreground_pixels(img);
  bool changed_any = false;
  bool changed = true;
  std::vector<Point> doomed;
  while (changed) {
    changed = false;
    for (const bool first_pass : {true, false}) {
      doomed.clear();
      for (const auto& p : live) {
        if (zhang_suen_deletable(ring(img, p.x, p.y), first_pass)) doomed.push_back(p);
      }
      keep_vanishing_components(img, doomed);
      for (const auto& p : doomed) img.set(p, false);
      if (!doomed.empty()) {
        changed = true;
        changed_any = true;
        std::erase_if(live, [&](const Point& p) { return !img.at(p); });
      }
    }
  }
  return changed_any;
}

// A pixel is simple when deleting it changes neither the number of
// 8-connected foreground components nor 4-connected background components
// in its 3x3 neighbourhood.
bool is_simple(const BinaryImage& img, int x, int y) {
  const auto p = ring(img, x, y);

  // Foreground components among the ring, 8-adjacency inside the ring:
  // consecutive ring cells are adjacent, and an edge cell (even index) is
  // also adjacent to the corners two steps away.
  std::array<int, 8> comp{};
  comp.fill(-1);
  int fg_components = 0;
  for (std::size_t start = 0; start < 8; ++start) {
    if (!p[start] || comp[start] >= 0) continue;
    std::vector<std::size_t> stack = {start};
    comp[start] = fg_components;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      std::array<std::size_t, 4> adj = {(i + 1) % 8, (i + 7) % 8, (i + 2) % 8, (i + 6) % 8};
      const std::size_t degree = (i % 2 == 0) ? 4 : 2;
      for (std::size_t k = 0; k < degree; ++k) {
        const std::size_t j = adj[k];
        if (p[j] && comp[j] < 0) {
          comp[j] = fg_components;
          stack.push_back(j);
        }
      }
    }
    ++fg_components;
  }
  if (fg_components != 1) return false;

  // Background components (4-adjacency) that touch an edge neighbour of p.
  // With 4-adjacency only consecutive ring cells connect, and a corner is
  // connected only through its two edge neighbours.
  int bg_components = 0;
  std::array<bool, 8> seen{};
  for (std::size_t start = 0; start < 8; start += 2) {
    if (p[start] || seen[start]) continue;
    ++bg_components;
    std::vector<std::size_t> stack = {start};
    seen[start] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (const std::size_t j : {(i + 1) % 8, (i + 7) % 8}) {
        if (!p[j] && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
  }
  return bg_components == 1;
}

bool break_square_blocks(BinaryImage& img) {
  bool changed = false;
  for (int y = 0; y + 1 < img.height(); ++y) {
    for (int x = 0; x + 1 < img.width(); ++x) {
      if (!(img.at(x, y) && img.at(x + 1, y) && img.at(x, y + 1) && img.at(x + 1, y + 1))) {
        continue;
      }
      for (const Point q : {Point{x, y}, Point{x + 1, y}, Point{x, y + 1}, Point{x + 1, y + 1}}) {
        if (is_simple(img, q.x, q.y)) {
          img.set(q, false);
          changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

// Deletes endpoint pixels layer by layer (all endpoints of one layer go at
// once), then isolated pixels.
void erode_endpoints(BinaryImage& img, std::size_t max_passes) {
  std::vector<Point> frontier;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y) && img.neighbor_count(x, y) == 1) frontier.push_back({x, y});
    }
  }
  std::vector<Point> next;
  std::size_t passes = 0;
  while (!frontier.empty() && passes < max_passes) {
    ++passes;
    for (const auto& p : frontier) img.set(p, false);
    next.clear();
    for (const auto& p : frontier) {
      for (std::size_t i = 0; i < 8; ++i) {
        const Point q{p.x + kRingDx[i], p.y + kRingDy[i]};
        if (img.get(q) && img.neighbor_count(q.x, q.y) == 1) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier.swap(next);
  }
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y) && img.neighbor_count(x, y) == 0) img.set(x, y, false);
    }
  }
}

}  // namespace

bool has_square_block(const BinaryImage& img) {
  for (int y = 0; y + 1 < img.height(); ++y) {
    for (int x = 0; x + 1 < img.width(); ++x) {
      if (img.at(x, y) && img.at(x + 1, y) && img.at(x, y + 1) && img.at(x + 1, y + 1)) {
        return true;
      }
    }
  }
  return false;
}

BinaryImage thin(const BinaryImage& img) {
  BinaryImage out = img;
  do {
    zhang_suen_to_convergence(out);
  } while (break_square_blocks(out));
  return out;
}

BinaryImage enclosed_background(const BinaryImage& img) {
  const int w = img.width();
  const int h = img.height();
  BinaryImage outside(w, h);
  std::deque<Point> queue;
  auto seed = [&](int x, int y) {
    if (!img.at(x, y) && !outside.at(x, y)) {
      outside.set(x, y, true);
      queue.push_back({x, y});
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!queue.empty()) {
    const Point p = queue.front();
    queue.pop_front();
    for (const auto& [dx, dy] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
      const int nx = p.x + dx;
      const int ny = p.y + dy;
      if (img.in_bounds(nx, ny)) seed(nx, ny);
    }
  }

  BinaryImage holes(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.at(x, y) && !outside.at(x, y)) holes.set(x, y, true);
    }
  }
  return holes;
}

BinaryImage remove_open_strokes(const BinaryImage& img, const PreprocessConfig& cfg) {
  if (has_square_block(img)) {
    throw Error(ErrorKind::NotThinned, "input contains a 2x2 foreground block; run thin first");
  }
  BinaryImage out = img;
  erode_endpoints(out, cfg.prune_iterations_max);
  if (!cfg.keep_loops_only) return out;

  // Strokes joining two loops have no endpoints; they are recognised by not
  // bordering any enclosed region.
  const BinaryImage holes = enclosed_background(out);
  BinaryImage loops(out.width(), out.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (out.at(x, y) && holes.neighbor_count(x, y) > 0) loops.set(x, y, true);
    }
  }
  erode_endpoints(loops, cfg.prune_iterations_max);
  return loops;
}

PreprocessResult remove_text(const BinaryImage& img, const PreprocessConfig& cfg) {
  if (cfg.text_area_max < 1) {
    throw Error(ErrorKind::InvalidArgument, "text_area_max must be at least 1");
  }
  PreprocessResult result{img, {}};
  for (const auto& c : label_components(img)) {
    if (c.area() >= cfg.text_area_max) continue;
    for (const auto& p : c.pixels) result.image.set(p, false);
    ++result.report.removed_text_components;
  }
  return result;
}

PreprocessResult preprocess(const BinaryImage& img, const PreprocessConfig& cfg) {
  const BinaryImage skeleton = thin(img);
  const BinaryImage loops = remove_open_strokes(skeleton, cfg);
  PreprocessResult result = remove_text(loops, cfg);
  result.report.skeleton_pixels = skeleton.foreground_count();
  result.report.removed_stroke_pixels = skeleton.foreground_count() - loops.foreground_count();
  return result;
}

}  // namespace flowsim
