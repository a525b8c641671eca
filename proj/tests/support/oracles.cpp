#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace oracle {

double epsilon(double z) { return std::min(1.0 / (48.0 * z), 0.25); }

double target_shift(int n, double z, double delta) { return delta * epsilon(z) * std::sqrt(std::log(double(n))); }

double tau(double s, int n, double z, double delta) {
  const double ln = std::log(double(n));
  const double top = delta * epsilon(z) * std::sqrt(ln);
  if (s >= n) return 0.0;
  if (s <= std::cbrt(double(n) * n)) return top;
  return 3.0 * delta * epsilon(z) / std::sqrt(ln) * (ln - std::log(s));
}

std::vector<double> bfs_reach(const Configuration& cfg, double eps) {
  const auto& p = cfg.interior;
  const std::size_t m = p.size();
  std::vector<double> reach(m, -1.0);
  std::vector<int> comp(m, -1);
  int next = 0;
  for (std::size_t s = 0; s < m; ++s) {
    if (comp[s] >= 0) continue;
    std::deque<std::size_t> queue{s};
    std::vector<std::size_t> members;
    comp[s] = next;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      members.push_back(i);
      for (std::size_t j = 0; j < m; ++j) {
        if (comp[j] >= 0) continue;
        const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
        if (std::sqrt(dx * dx + dy * dy) <= 1.0 + eps) {
          comp[j] = next;
          queue.push_back(j);
        }
      }
    }
    double r = 0.0;
    for (const std::size_t i : members) r = std::max({r, std::fabs(p[i].x), std::fabs(p[i].y)});
    for (const std::size_t i : members) reach[i] = r;
    ++next;
  }
  return reach;
}

std::size_t overlapping_pairs(const Configuration& cfg) {
  std::vector<Point> all = cfg.interior;
  all.insert(all.end(), cfg.boundary.begin(), cfg.boundary.end());
  std::size_t bad = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const double dx = all[i].x - all[j].x, dy = all[i].y - all[j].y;
      if (dx * dx + dy * dy <= 1.0) ++bad;
    }
  }
  return bad;
}

namespace {

bool fits(const Point& q, const std::vector<Point>& a, const std::vector<Point>& b) {
  for (const auto* v : {&a, &b}) {
    for (const Point& p : *v) {
      const double dx = p.x - q.x, dy = p.y - q.y;
      if (dx * dx + dy * dy <= 1.0) return false;
    }
  }
  return true;
}

}  // namespace

Configuration random_hard_core(int n, std::size_t count, std::vector<Point> boundary, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-n, n);
  Configuration cfg;
  cfg.n = n;
  cfg.boundary = std::move(boundary);
  for (std::size_t i = 0; i < count; ++i) {
    const Point q{u(rng), u(rng)};
    if (fits(q, cfg.interior, cfg.boundary)) cfg.interior.push_back(q);
  }
  return cfg;
}

Configuration ring_cluster(int n, std::size_t count, std::vector<Point> boundary, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double inner = std::cbrt(double(n) * n) + 1.0;
  Configuration cfg;
  cfg.n = n;
  cfg.boundary = std::move(boundary);
  for (int attempt = 0; attempt < 10000 && cfg.interior.size() < count; ++attempt) {
    Point q;
    if (cfg.interior.empty()) {
      const double r = inner + (n - inner) * u(rng);
      const double side = u(rng) * 8.0;
      const double a = (u(rng) * 2.0 - 1.0) * r;
      const int k = static_cast<int>(side);
      q = k % 4 == 0 ? Point{r, a} : k % 4 == 1 ? Point{-r, a} : k % 4 == 2 ? Point{a, r} : Point{a, -r};
    } else {
      const Point& c = cfg.interior[static_cast<std::size_t>(u(rng) * cfg.interior.size())];
      const double d = 1.0 + 0.4 * u(rng);
      const double phi = 2.0 * M_PI * u(rng);
      q = {c.x + d * std::cos(phi), c.y + d * std::sin(phi)};
    }
    if (std::max(std::fabs(q.x), std::fabs(q.y)) > n) continue;
    if (fits(q, cfg.interior, cfg.boundary)) cfg.interior.push_back(q);
  }
  return cfg;
}

std::map<std::size_t, double> rejection_count_distribution(int n, double z, const std::vector<Point>& boundary,
                                                           std::size_t accepted, std::mt19937_64& rng,
                                                           double* mean_count) {
  std::poisson_distribution<int> count(z * 4.0 * n * n);
  std::uniform_real_distribution<double> u(-n, n);
  // Only boundary particles within distance 1 of the box can overlap a disk.
  std::vector<Point> near;
  for (const Point& p : boundary) {
    if (std::max(std::fabs(p.x), std::fabs(p.y)) <= n + 1.0) near.push_back(p);
  }
  const std::vector<Point> none;
  std::map<std::size_t, double> hist;
  double total = 0.0;
  std::vector<Point> pts;
  for (std::size_t got = 0; got < accepted;) {
    const int k = count(rng);
    pts.clear();
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      const Point q{u(rng), u(rng)};
      const bool edge = std::max(std::fabs(q.x), std::fabs(q.y)) >= n - 1.0;
      ok = fits(q, pts, edge ? near : none);
      pts.push_back(q);
    }
    if (!ok) continue;
    hist[pts.size()] += 1.0;
    total += double(pts.size());
    ++got;
  }
  for (auto& [k, v] : hist) v /= double(accepted);
  if (mean_count) *mean_count = total / double(accepted);
  return hist;
}

double total_variation(const std::map<std::size_t, double>& a, const std::map<std::size_t, double>& b) {
  double tv = 0.0;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    tv += std::fabs(v - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : b) {
    if (!a.count(k)) tv += v;
  }
  return tv / 2.0;
}

std::vector<Point> outward_chain(Point start, std::size_t count, double spacing) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({start.x + spacing * double(i), start.y});
  return out;
}

}  // namespace oracle
