// SPDX-License-Identifier: Apache-2.0

#include "rfaug/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

namespace rfaug {
namespace {

enum class Flag : std::uint8_t { known, band, inside };

constexpr double kFar = 1.0e6;

class FastMarcher {
public:
  FastMarcher(const RasterImage& image, const BinaryMask& hole, int radius)
      : w_(image.width()), h_(image.height()), radius_(radius), out_(image) {
    const std::size_t n = static_cast<std::size_t>(w_) * h_;
    flag_.assign(n, Flag::known);
    t_.assign(n, 0.0);
    auto bits = hole.bits();
    for (std::size_t p = 0; p < n; ++p) {
      if (bits[p]) {
        flag_[p] = Flag::inside;
        t_[p] = kFar;
      }
    }
    // Initial narrow band: known pixels 4-adjacent to the hole.
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        const int p = index(x, y);
        if (flag_[p] != Flag::known) continue;
        bool touches = false;
        for_each_neighbour(x, y, [&](int, int, int q) {
          touches = touches || flag_[q] == Flag::inside;
        });
        if (touches) {
          flag_[p] = Flag::band;
          heap_.emplace(0.0, p);
        }
      }
    }
  }

  RasterImage run() {
    while (!heap_.empty()) {
      const auto [t, p] = heap_.top();
      heap_.pop();
      if (flag_[p] == Flag::known || t != t_[p]) continue;  // stale entry
      flag_[p] = Flag::known;
      const int px = p % w_;
      const int py = p / w_;
      for_each_neighbour(px, py, [&](int x, int y, int q) {
        if (flag_[q] == Flag::known) return;
        const double tq = arrival_time(x, y);
        if (flag_[q] == Flag::inside) {
          t_[q] = tq;
          fill(x, y);
          flag_[q] = Flag::band;
          heap_.emplace(tq, q);
        } else if (tq < t_[q]) {
          t_[q] = tq;
          heap_.emplace(tq, q);
        }
      });
    }
    return std::move(out_);
  }

private:
  int index(int x, int y) const noexcept { return y * w_ + x; }

  template <typename Fn>
  void for_each_neighbour(int x, int y, Fn&& fn) const {
    // Fixed visiting order: up, left, right, down.
    if (y > 0) fn(x, y - 1, index(x, y - 1));
    if (x > 0) fn(x - 1, y, index(x - 1, y));
    if (x + 1 < w_) fn(x + 1, y, index(x + 1, y));
    if (y + 1 < h_) fn(x, y + 1, index(x, y + 1));
  }

  bool frozen(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < w_ && y < h_ && flag_[index(x, y)] == Flag::known;
  }

  // First-order upwind solution of |grad T| = 1 from one horizontal and one
  // vertical neighbour.
  double solve(int x1, int y1, int x2, int y2) const {
    const bool k1 = frozen(x1, y1);
    const bool k2 = frozen(x2, y2);
    if (k1 && k2) {
      const double t1 = t_[index(x1, y1)];
      const double t2 = t_[index(x2, y2)];
      const double d = t1 - t2;
      const double disc = 2.0 - d * d;
      if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        double s = (t1 + t2 - r) / 2.0;
        if (s >= t1 && s >= t2) return s;
        s += r;
        if (s >= t1 && s >= t2) return s;
      }
      return 1.0 + std::min(t1, t2);
    }
    if (k1) return 1.0 + t_[index(x1, y1)];
    if (k2) return 1.0 + t_[index(x2, y2)];
    return kFar;
  }

  double arrival_time(int x, int y) const {
    return std::min({solve(x - 1, y, x, y - 1), solve(x + 1, y, x, y - 1),
                     solve(x - 1, y, x, y + 1), solve(x + 1, y, x, y + 1)});
  }

  bool has_value(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < w_ && y < h_ && flag_[index(x, y)] != Flag::inside;
  }

  double gradient_component(int x, int y, int dx, int dy) const {
    const bool fwd = has_value(x + dx, y + dy);
    const bool back = has_value(x - dx, y - dy);
    const double tc = t_[index(x, y)];
    if (fwd && back) {
      return (t_[index(x + dx, y + dy)] - t_[index(x - dx, y - dy)]) * 0.5;
    }
    if (fwd) return t_[index(x + dx, y + dy)] - tc;
    if (back) return tc - t_[index(x - dx, y - dy)];
    return 0.0;
  }

  // Weighted average of every valued pixel within the radius disk.
  void fill(int x, int y) {
    const double gx = gradient_component(x, y, 1, 0);
    const double gy = gradient_component(x, y, 0, 1);
    const double gnorm = std::hypot(gx, gy);
    const double tc = t_[index(x, y)];

    double sr = 0.0;
    double sg = 0.0;
    double sb = 0.0;
    double sw = 0.0;
    const int r2 = radius_ * radius_;
    for (int ky = std::max(0, y - radius_); ky <= std::min(h_ - 1, y + radius_); ++ky) {
      for (int kx = std::max(0, x - radius_); kx <= std::min(w_ - 1, x + radius_); ++kx) {
        const int rx = x - kx;
        const int ry = y - ky;
        const int len2 = rx * rx + ry * ry;
        if (len2 == 0 || len2 > r2) continue;
        const int k = index(kx, ky);
        if (flag_[k] == Flag::inside) continue;
        const double len = std::sqrt(static_cast<double>(len2));
        double dir = 1.0;
        if (gnorm > 0.0) dir = std::abs(rx * gx + ry * gy) / (len * gnorm);
        dir = std::max(dir, 1.0e-6);
        const double dst = 1.0 / len2;
        const double lev = 1.0 / (1.0 + std::abs(t_[k] - tc));
        const double wgt = dir * dst * lev;
        const Rgb& c = out_.pixels()[k];
        sr += wgt * c.r;
        sg += wgt * c.g;
        sb += wgt * c.b;
        sw += wgt;
      }
    }
    // The neighbour that triggered this fill always lies within the disk.
    auto q = [&](double v) {
      return static_cast<std::uint8_t>(std::clamp(std::floor(v / sw + 0.5), 0.0, 255.0));
    };
    out_.at(x, y) = {q(sr), q(sg), q(sb)};
  }

  int w_;
  int h_;
  int radius_;
  RasterImage out_;
  std::vector<Flag> flag_;
  std::vector<double> t_;
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>>
      heap_;
};

}  // namespace

RasterImage inpaint_fmm(const InpaintRequest& req) {
  if (req.image.size() != req.hole.size()) {
    throw Error(ErrorCode::DimensionMismatch, "inpaint: hole and image sizes differ");
  }
  if (req.radius < 1) {
    throw Error(ErrorCode::InvalidArgument, "inpaint: radius must be >= 1");
  }
  const auto bits = req.hole.bits();
  const auto holes = std::count(bits.begin(), bits.end(), std::uint8_t{1});
  if (holes == 0) return req.image;
  if (static_cast<std::size_t>(holes) == bits.size()) {
    throw Error(ErrorCode::FullMask, "inpaint: hole covers the whole image");
  }
  return FastMarcher(req.image, req.hole, req.radius).run();
}

}  // namespace rfaug
