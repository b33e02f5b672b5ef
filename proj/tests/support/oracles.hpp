#pragma once

// Independent reference implementations used to check library results.
// Nothing here calls into the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "balloonscope/imaging/frame.hpp"

namespace oracle {

using balloonscope::imaging::Frame;
using balloonscope::imaging::Rgb;

struct Roi {
  int x0 = 40, y0 = 40, x1 = 360, y1 = 360;
};

/// Per-pixel keep decision: brightened, not blood-red, not near-black, in ROI.
inline bool keep_pixel(Rgb raw, int x, int y, const Roi& roi = {}) {
  if (x < roi.x0 || x >= roi.x1 || y < roi.y0 || y >= roi.y1) return false;
  auto up = [](int v) { return std::min(255, (v * 7 + 1) / 2); };  // round-half-up of 3.5 v
  const int r = up(raw.r), g = up(raw.g), b = up(raw.b);
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const int d = mx - mn;
  // hue in half-degrees and saturation on 0..255, compared exactly in integers
  bool red = false;
  if (mx > 0 && d > 0 && 255 * d > 15 * mx) {
    // hue <= 10 (i.e. 20 deg) or >= 160 (320 deg); only possible with red as max
    if (mx == r) {
      const long long num = 60LL * (g - b);  // hue_deg * d
      red = (num >= 0 && num <= 20LL * d) || (num < 0 && num + 360LL * d >= 320LL * d);
    } else if (mx == b) {
      const long long hd = 240LL * d + 60LL * (r - g);  // hue_deg * d
      red = hd >= 320LL * d;
    }
  }
  const int gray = (299 * r + 587 * g + 114 * b + 500) / 1000;
  if (red || gray < 5) return false;
  return r + g + b > 0;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// P_A by union-find labelling of kept pixels (8-neighbourhood), then a
/// complement scan: background pixels not 4-connected to the border count
/// as inside.
inline std::size_t inside_pixels(const Frame& f, const Roi& roi = {}) {
  const int w = f.width(), h = f.height();
  std::vector<char> keep(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) keep[y * w + x] = keep_pixel(f.at(x, y), x, y, roi);
  UnionFind uf(w * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!keep[y * w + x]) continue;
      for (auto [dx, dy] : {std::pair{-1, -1}, {0, -1}, {1, -1}, {-1, 0}}) {
        const int nx = x + dx, ny = y + dy;
        if (nx >= 0 && nx < w && ny >= 0 && keep[ny * w + nx]) uf.unite(y * w + x, ny * w + nx);
      }
    }
  std::vector<int> size(w * h, 0);
  int best = -1;
  for (int i = 0; i < w * h; ++i)
    if (keep[i]) {
      const int root = uf.find(i);
      if (best < 0 || ++size[root] > size[best] || (size[root] == size[best] && root < best)) best = root;
    }
  if (best < 0) return 0;
  std::vector<char> comp(w * h, 0);
  for (int i = 0; i < w * h; ++i) comp[i] = keep[i] && uf.find(i) == best;
  // Background reachability from the border, iterated to a fixed point.
  std::vector<char> outside(w * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if ((x == 0 || y == 0 || x == w - 1 || y == h - 1) && !comp[y * w + x]) outside[y * w + x] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < w * h; ++k) {
        const int i = pass == 0 ? k : w * h - 1 - k;
        if (outside[i] || comp[i]) continue;
        const int x = i % w, y = i / w;
        if ((x > 0 && outside[i - 1]) || (x < w - 1 && outside[i + 1]) || (y > 0 && outside[i - w]) ||
            (y < h - 1 && outside[i + w])) {
          outside[i] = 1;
          changed = true;
        }
      }
  }
  return static_cast<std::size_t>(std::count(outside.begin(), outside.end(), 0));
}

/// Least-squares polynomial by normal equations in long double with
/// Gauss-Jordan elimination. Coefficients low order first.
inline std::vector<long double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  const int n = degree + 1;
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1, 0.0L));
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::vector<long double> p(2 * n, 1.0L);
    for (int j = 1; j < 2 * n; ++j) p[j] = p[j - 1] * x[k];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a[i][j] += p[i + j];
      a[i][n] += p[i] * y[k];
    }
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (int j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<long double> coef(n);
  for (int i = 0; i < n; ++i) coef[i] = a[i][n] / a[i][i];
  return coef;
}

inline long double polyval(const std::vector<long double>& c, long double x) {
  long double v = 0.0L;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

}  // namespace oracle
