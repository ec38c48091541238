#include "calfront/morph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace calfront {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 8-neighbourhood in Zhang-Suen order: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<std::array<int, 2>, 8> kRing{{
    {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

constexpr std::array<std::array<int, 2>, 4> kFour{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
constexpr std::array<std::array<int, 2>, 8> kEight{{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

// Sliding-window "any set" along one axis, half-width h.
BinaryGrid box_any_rows(const BinaryGrid& g, int h) {
  BinaryGrid out = empty_grid(g.rows(), g.cols());
  std::vector<Index> prefix(static_cast<std::size_t>(g.cols()) + 1);
  for (Index r = 0; r < g.rows(); ++r) {
    prefix[0] = 0;
    for (Index c = 0; c < g.cols(); ++c) prefix[c + 1] = prefix[c] + (g(r, c) ? 1 : 0);
    for (Index c = 0; c < g.cols(); ++c) {
      const Index lo = std::max<Index>(0, c - h);
      const Index hi = std::min<Index>(g.cols() - 1, c + h);
      out(r, c) = prefix[hi + 1] - prefix[lo] > 0;
    }
  }
  return out;
}

BinaryGrid box_any(const BinaryGrid& g, int h) {
  const BinaryGrid rows_done = box_any_rows(g, h);
  const BinaryGrid t = rows_done.transpose();
  return box_any_rows(t, h).transpose();
}

Index border_distance(Index rows, Index cols, Index r, Index c) {
  return std::min({r + 1, c + 1, rows - r, cols - c});
}

}  // namespace

StructuringElement StructuringElement::square(int side) {
  if (side < 1 || side % 2 == 0) {
    throw std::invalid_argument("square structuring element needs an odd side >= 1, got " +
                                std::to_string(side));
  }
  const int h = side / 2;
  std::vector<Pixel> offs;
  for (int dr = -h; dr <= h; ++dr)
    for (int dc = -h; dc <= h; ++dc) offs.push_back({dr, dc});
  return StructuringElement(std::move(offs), h, true);
}

StructuringElement StructuringElement::disk(int radius) {
  if (radius < 0) throw std::invalid_argument("disk radius must be >= 0");
  std::vector<Pixel> offs;
  for (int dr = -radius; dr <= radius; ++dr)
    for (int dc = -radius; dc <= radius; ++dc)
      if (dr * dr + dc * dc <= radius * radius) offs.push_back({dr, dc});
  return StructuringElement(std::move(offs), radius, false);
}

BinaryGrid dilate(const BinaryGrid& g, const StructuringElement& se) {
  if (g.size() == 0 || se.radius() == 0) return g;
  if (se.is_square()) return box_any(g, se.radius());
  const double r2 = static_cast<double>(se.radius()) * se.radius();
  return squared_distance_transform(g) <= r2;
}

BinaryGrid erode(const BinaryGrid& g, const StructuringElement& se, Border border) {
  if (g.size() == 0) return g;
  const int h = se.radius();
  BinaryGrid out = se.is_square()
                       ? BinaryGrid(!box_any(!g, h))
                       : BinaryGrid(squared_distance_transform(!g) > static_cast<double>(h) * h);
  if (border == Border::Background && h > 0) {
    for (Index r = 0; r < g.rows(); ++r) {
      for (Index c = 0; c < g.cols(); ++c) {
        if (!out(r, c)) continue;
        const Index d = border_distance(g.rows(), g.cols(), r, c);
        // Square reaches outside when d <= h (Chebyshev); the disk reaches the
        // nearest outside pixel, which lies on an axis, under the same test.
        if (d <= h) out(r, c) = false;
      }
    }
  }
  return out;
}

BinaryGrid fill_holes(const BinaryGrid& g) {
  const Index rows = g.rows(), cols = g.cols();
  BinaryGrid reached = empty_grid(rows, cols);
  std::deque<Pixel> queue;
  auto seed = [&](Index r, Index c) {
    if (!g(r, c) && !reached(r, c)) {
      reached(r, c) = true;
      queue.push_back({r, c});
    }
  };
  for (Index c = 0; c < cols; ++c) {
    seed(0, c);
    seed(rows - 1, c);
  }
  for (Index r = 0; r < rows; ++r) {
    seed(r, 0);
    seed(r, cols - 1);
  }
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop_front();
    for (const auto& d : kFour) {
      const Index r = p.row + d[0], c = p.col + d[1];
      if (in_bounds(rows, cols, r, c)) seed(r, c);
    }
  }
  return g || !reached;
}

std::vector<Index> Components::sizes() const {
  std::vector<Index> out(static_cast<std::size_t>(count) + 1, 0);
  for (Index i = 0; i < labels.size(); ++i) ++out[static_cast<std::size_t>(labels.data()[i])];
  out[0] = 0;
  return out;
}

Components connected_components(const BinaryGrid& g, Connectivity conn) {
  const Index rows = g.rows(), cols = g.cols();
  Components result{LabelGrid::Zero(rows, cols), 0};
  std::deque<Pixel> queue;
  const bool eight = conn == Connectivity::Eight;
  for (Index r0 = 0; r0 < rows; ++r0) {
    for (Index c0 = 0; c0 < cols; ++c0) {
      if (!g(r0, c0) || result.labels(r0, c0) != 0) continue;
      const int label = ++result.count;
      result.labels(r0, c0) = label;
      queue.push_back({r0, c0});
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        auto visit = [&](int dr, int dc) {
          const Index r = p.row + dr, c = p.col + dc;
          if (in_bounds(rows, cols, r, c) && g(r, c) && result.labels(r, c) == 0) {
            result.labels(r, c) = label;
            queue.push_back({r, c});
          }
        };
        if (eight) {
          for (const auto& d : kEight) visit(d[0], d[1]);
        } else {
          for (const auto& d : kFour) visit(d[0], d[1]);
        }
      }
    }
  }
  return result;
}

BinaryGrid largest_component(const BinaryGrid& g, Connectivity conn) {
  const Components cc = connected_components(g, conn);
  if (cc.count == 0) return empty_grid(g.rows(), g.cols());
  const auto sizes = cc.sizes();
  int best = 1;
  for (int l = 2; l <= cc.count; ++l) {
    if (sizes[static_cast<std::size_t>(l)] > sizes[static_cast<std::size_t>(best)]) best = l;
  }
  return cc.mask(best);
}

BinaryGrid skeletonize(const BinaryGrid& g) {
  BinaryGrid s = g;
  const Index rows = s.rows(), cols = s.cols();
  auto at = [&](Index r, Index c) -> int { return in_bounds(rows, cols, r, c) && s(r, c) ? 1 : 0; };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
          if (!s(r, c)) continue;
          std::array<int, 8> n{};
          for (std::size_t k = 0; k < 8; ++k) n[k] = at(r + kRing[k][0], c + kRing[k][1]);
          const int b = n[0] + n[1] + n[2] + n[3] + n[4] + n[5] + n[6] + n[7];
          if (b < 2 || b > 6) continue;
          int a = 0;
          for (std::size_t k = 0; k < 8; ++k) a += (n[k] == 0 && n[(k + 1) % 8] == 1) ? 1 : 0;
          if (a != 1) continue;
          // n[0]=N n[2]=E n[4]=S n[6]=W
          const bool ok = pass == 0 ? (n[0] * n[2] * n[4] == 0 && n[2] * n[4] * n[6] == 0)
                                    : (n[0] * n[2] * n[6] == 0 && n[0] * n[4] * n[6] == 0);
          if (!ok) continue;
          s(r, c) = false;
          changed = true;
        }
      }
    }
  }
  // Dense one-pixel holes can pin a 3x3-full residue that no hole-preserving
  // deletion removes. Its eight neighbours form a connected ring, so dropping
  // the centre keeps component connectivity and guarantees thinness.
  for (Index r = 1; r + 1 < rows; ++r) {
    for (Index c = 1; c + 1 < cols; ++c) {
      if (s(r, c) && s.block(r - 1, c - 1, 3, 3).count() == 9) s(r, c) = false;
    }
  }
  return s;
}

namespace {

// BFS over the 8-connected set pixels of `g` from `start`. Returns the first
// pixel with maximal distance in visiting order and fills `parent`.
Index bfs_farthest(const BinaryGrid& g, Index start, std::vector<Index>& parent) {
  const Index rows = g.rows(), cols = g.cols();
  std::vector<Index> dist(static_cast<std::size_t>(g.size()), -1);
  parent.assign(static_cast<std::size_t>(g.size()), -1);
  std::deque<Index> queue{start};
  dist[static_cast<std::size_t>(start)] = 0;
  Index far = start;
  while (!queue.empty()) {
    const Index cur = queue.front();
    queue.pop_front();
    if (dist[static_cast<std::size_t>(cur)] > dist[static_cast<std::size_t>(far)]) far = cur;
    const Index r0 = cur / cols, c0 = cur % cols;
    for (const auto& d : kEight) {
      const Index r = r0 + d[0], c = c0 + d[1];
      if (!in_bounds(rows, cols, r, c) || !g(r, c)) continue;
      const Index idx = r * cols + c;
      if (dist[static_cast<std::size_t>(idx)] >= 0) continue;
      dist[static_cast<std::size_t>(idx)] = dist[static_cast<std::size_t>(cur)] + 1;
      parent[static_cast<std::size_t>(idx)] = cur;
      queue.push_back(idx);
    }
  }
  return far;
}

}  // namespace

PixelChain longest_path(const BinaryGrid& component) {
  const Index cols = component.cols();
  Index start = -1;
  for (Index i = 0; i < component.size(); ++i) {
    if (component.data()[i]) {
      start = i;
      break;
    }
  }
  if (start < 0) throw std::invalid_argument("empty component");

  std::vector<Index> parent;
  const Index a = bfs_farthest(component, start, parent);
  const Index b = bfs_farthest(component, a, parent);

  PixelChain chain;
  for (Index cur = b; cur >= 0; cur = parent[static_cast<std::size_t>(cur)]) {
    chain.push_back({cur / cols, cur % cols});
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

RealGrid squared_distance_transform(const BinaryGrid& g) {
  const Index rows = g.rows(), cols = g.cols();
  RealGrid out(rows, cols);
  if (g.size() == 0) return out;

  // Vertical pass: squared distance to the nearest set pixel in the same column.
  RealGrid col_d2(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    double last = -kInf;
    for (Index r = 0; r < rows; ++r) {
      if (g(r, c)) last = static_cast<double>(r);
      col_d2(r, c) = std::isinf(last) ? kInf : (r - last) * (r - last);
    }
    last = kInf;
    for (Index r = rows - 1; r >= 0; --r) {
      if (g(r, c)) last = static_cast<double>(r);
      if (!std::isinf(last)) col_d2(r, c) = std::min(col_d2(r, c), (last - r) * (last - r));
    }
  }

  // Horizontal pass: lower envelope of parabolas (Felzenszwalb-Huttenlocher),
  // restricted to columns with a finite vertical distance.
  std::vector<Index> site(static_cast<std::size_t>(cols));
  std::vector<double> bound(static_cast<std::size_t>(cols) + 1);
  for (Index r = 0; r < rows; ++r) {
    const auto f = [&](Index q) { return col_d2(r, q); };
    Index k = -1;
    for (Index q = 0; q < cols; ++q) {
      if (std::isinf(f(q))) continue;
      if (k < 0) {
        k = 0;
        site[0] = q;
        bound[0] = -kInf;
        bound[1] = kInf;
        continue;
      }
      double s;
      while (true) {
        const Index v = site[static_cast<std::size_t>(k)];
        s = ((f(q) + static_cast<double>(q * q)) - (f(v) + static_cast<double>(v * v))) /
            (2.0 * static_cast<double>(q - v));
        if (s <= bound[static_cast<std::size_t>(k)] && k > 0) {
          --k;
          continue;
        }
        break;
      }
      ++k;
      site[static_cast<std::size_t>(k)] = q;
      bound[static_cast<std::size_t>(k)] = s;
      bound[static_cast<std::size_t>(k) + 1] = kInf;
    }
    if (k < 0) {
      out.row(r).setConstant(kInf);
      continue;
    }
    Index j = 0;
    for (Index q = 0; q < cols; ++q) {
      while (bound[static_cast<std::size_t>(j) + 1] < static_cast<double>(q)) ++j;
      const Index v = site[static_cast<std::size_t>(j)];
      out(r, q) = static_cast<double>((q - v) * (q - v)) + f(v);
    }
  }
  return out;
}

RealGrid distance_transform(const BinaryGrid& g) { return squared_distance_transform(g).sqrt(); }

}  // namespace calfront
