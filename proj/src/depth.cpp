#include "zeno/depth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace zeno {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

// One product factor covering `count` groups of `size` atoms each.
struct GroupClass {
  int size = 0;
  int count = 0;
  friend bool operator==(const GroupClass&, const GroupClass&) = default;
};
using Partition = std::vector<GroupClass>;

// Writing each group state as a|0..0⟩ + w|W_group⟩ and substituting
// a_g = e^{−β_g} turns the constraint Π a_g² = ρ00 into a linear budget
// Σ β_g = −½·ln(ρ00), and the W-overlap amplitude into
//   √ρ00 · Σ_g √(size_g/N) · t(β_g),   t(β) = √(e^{2β} − 1).
// t is concave up to β* = ½·ln 2 (where t = 1) and convex beyond, so the
// optimum splits into at most one "carrier" group holding a large budget
// plus an equal-marginal (water-filled) allocation capped at t = 1 for the
// rest.
constexpr double kBetaCap = 0.34657359027997264;  // ½·ln 2

double t_of_beta(double beta) {
  return beta > 0.0 ? std::sqrt(std::expm1(2.0 * beta)) : 0.0;
}

// Root t ≤ 1 of √size·(t + 1/t) = μ, in the cancellation-safe form.
double t_of_mu(double mu, int size) {
  const double rk = std::sqrt(double(size));
  if (mu <= 2.0 * rk) return 1.0;
  const double disc = std::sqrt(mu * mu - 4.0 * double(size));
  return 2.0 * rk / (mu + disc);
}

double beta_of_t(double t) { return 0.5 * std::log1p(t * t); }

// Total budget the capped water-filling absorbs at marginal price μ.
double wf_budget(double mu, const Partition& groups) {
  double total = 0.0;
  for (const GroupClass& g : groups)
    total += g.count * beta_of_t(t_of_mu(mu, g.size));
  return total;
}

// Optimal Σ count·√(size/N)·t over the concave region for a given budget.
double wf_value(double budget, const Partition& groups, int atom_count) {
  if (groups.empty() || budget <= 1e-15) return 0.0;
  int n_groups = 0;
  int size_max = 1;
  for (const GroupClass& g : groups) {
    n_groups += g.count;
    size_max = std::max(size_max, g.size);
  }
  const double cap_total = n_groups * kBetaCap;
  const auto value_at = [&](double mu) {
    double v = 0.0;
    for (const GroupClass& g : groups)
      v += g.count * std::sqrt(double(g.size) / atom_count) *
           t_of_mu(mu, g.size);
    return v;
  };
  if (budget >= cap_total - 1e-12) return value_at(0.0);  // everyone capped
  double lo = 2.0 * std::sqrt(double(size_max));  // S(lo) = cap_total
  double hi = 2.0 * lo;
  while (wf_budget(hi, groups) > budget) hi *= 2.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (wf_budget(mid, groups) > budget ? lo : hi) = mid;
  }
  return value_at(0.5 * (lo + hi));
}

Partition remove_one(const Partition& groups, std::size_t index) {
  Partition out = groups;
  if (--out[index].count == 0) out.erase(out.begin() + index);
  return out;
}

double cap_total(const Partition& groups) {
  int n = 0;
  for (const GroupClass& g : groups) n += g.count;
  return n * kBetaCap;
}

// Largest amplitude Σ count·√(size/N)·t(β) under Σ β = budget for one
// partition: compare the pure water-filling against every choice of carrier
// class, scanning the carrier budget by grid plus golden-section refinement.
double partition_amplitude(const Partition& groups, int atom_count,
                           double budget) {
  double best = 0.0;
  if (budget <= cap_total(groups) + 1e-12)
    best = wf_value(budget, groups, atom_count);
  constexpr double kGolden = 0.6180339887498949;
  for (std::size_t ci = 0; ci < groups.size(); ++ci) {
    const Partition rest = remove_one(groups, ci);
    const double weight = std::sqrt(double(groups[ci].size) / atom_count);
    const auto value = [&](double beta_c) {
      return weight * t_of_beta(beta_c) +
             wf_value(budget - beta_c, rest, atom_count);
    };
    const double lo = std::max(0.0, budget - cap_total(rest));
    const double hi = budget;
    if (hi - lo < 1e-15) {
      best = std::max(best, value(hi));
      continue;
    }
    // Coarse grid to localize the maximum (the objective has water-filling
    // kinks), then golden-section inside the bracketing cell.
    constexpr int kGridPoints = 48;
    int best_idx = 0;
    double best_grid = -1.0;
    for (int i = 0; i <= kGridPoints; ++i) {
      const double b = lo + (hi - lo) * i / kGridPoints;
      const double v = value(b);
      if (v > best_grid) {
        best_grid = v;
        best_idx = i;
      }
    }
    double a = lo + (hi - lo) * std::max(0, best_idx - 1) / kGridPoints;
    double b = lo + (hi - lo) * std::min(kGridPoints, best_idx + 1) /
                        kGridPoints;
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = value(x1), f2 = value(x2);
    for (int i = 0; i < 70; ++i) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = value(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = value(x1);
      }
    }
    best = std::max({best, f1, f2, best_grid});
  }
  return best;
}

std::vector<Partition> candidate_partitions(int atom_count, int max_group) {
  std::vector<Partition> out;
  const int q = atom_count / max_group;
  const int r = atom_count % max_group;
  Partition a{{max_group, q}};
  if (r > 0) a.push_back({r, 1});
  out.push_back(a);
  // Balanced alternative over the same number of groups.
  const int n_groups = q + (r > 0 ? 1 : 0);
  const int base = atom_count / n_groups;
  const int extra = atom_count % n_groups;
  Partition b;
  if (extra > 0) b.push_back({base + 1, extra});
  if (n_groups - extra > 0) b.push_back({base, n_groups - extra});
  if (b != a) out.push_back(b);
  return out;
}

void check_boundary_args(int atom_count, int max_group) {
  if (atom_count < 1) fail("boundary: atom_count >= 1");
  if (max_group < 1 || max_group > atom_count)
    fail("boundary: 1 <= max_group <= atom_count");
}

// Upper concave hull of a curve given on an increasing grid.
void concave_hull(const std::vector<double>& x, const std::vector<double>& y,
                  std::vector<double>& hx, std::vector<double>& hy) {
  hx.clear();
  hy.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (hx.size() >= 2) {
      const std::size_t m = hx.size();
      const double cross = (hx[m - 1] - hx[m - 2]) * (y[i] - hy[m - 2]) -
                           (hy[m - 1] - hy[m - 2]) * (x[i] - hx[m - 2]);
      if (cross >= 0.0)  // middle point at or below the chord: drop it
        hx.pop_back(), hy.pop_back();
      else
        break;
    }
    hx.push_back(x[i]);
    hy.push_back(y[i]);
  }
}

double hull_interpolate(const std::vector<double>& hx,
                        const std::vector<double>& hy, double x) {
  if (x <= hx.front()) return hy.front();
  if (x >= hx.back()) return hy.back();
  const auto it = std::upper_bound(hx.begin(), hx.end(), x);
  const std::size_t i = std::size_t(it - hx.begin());
  const double f = (x - hx[i - 1]) / (hx[i] - hx[i - 1]);
  return hy[i - 1] + f * (hy[i] - hy[i - 1]);
}

}  // namespace

std::vector<double> default_boundary_grid() {
  std::vector<double> grid(201);
  for (int i = 0; i < 201; ++i) grid[i] = i / 200.0;
  return grid;
}

double pure_boundary_value(int atom_count, int max_group, double rho00) {
  check_boundary_args(atom_count, max_group);
  if (rho00 < 0.0 || rho00 > 1.0) fail("boundary: rho00 in [0, 1]");
  if (rho00 >= 1.0) return 0.0;
  if (rho00 == 0.0) {
    // One group fully excited, the rest pinned to |0..0⟩.
    double best = 0.0;
    for (const Partition& p : candidate_partitions(atom_count, max_group))
      for (const GroupClass& g : p)
        best = std::max(best, double(g.size) / atom_count);
    return best;
  }
  const double budget = -0.5 * std::log(rho00);
  double amp = 0.0;
  for (const Partition& p : candidate_partitions(atom_count, max_group))
    amp = std::max(amp, partition_amplitude(p, atom_count, budget));
  return std::min(rho00 * amp * amp, 1.0 - rho00);
}

BoundaryCurve boundary_curve(int atom_count, int max_group,
                             const std::vector<double>& grid) {
  check_boundary_args(atom_count, max_group);
  if (grid.size() < 2) fail("boundary: grid needs at least 2 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > 1.0) fail("boundary: grid in [0, 1]");
    if (i > 0 && grid[i] <= grid[i - 1])
      fail("boundary: grid strictly increasing");
  }
  BoundaryCurve curve;
  curve.atom_count = atom_count;
  curve.max_group = max_group;
  curve.rho00 = grid;
  curve.rho11.assign(grid.size(), 0.0);
  // Cumulative over k: a k-producible state is also (k+1)-producible, so
  // the boundary can only move up with k.
  for (int k = 1; k <= max_group; ++k)
    for (std::size_t i = 0; i < grid.size(); ++i)
      curve.rho11[i] =
          std::max(curve.rho11[i], pure_boundary_value(atom_count, k, grid[i]));
  return curve;
}

std::string boundary_to_text(const BoundaryCurve& curve) {
  std::ostringstream os;
  os.precision(17);
  os << "boundary-curve format " << BoundaryCache::kFormatVersion << "\n"
     << "atoms " << curve.atom_count << "\n"
     << "max_group " << curve.max_group << "\n"
     << "points " << curve.rho00.size() << "\n";
  for (std::size_t i = 0; i < curve.rho00.size(); ++i)
    os << curve.rho00[i] << ' ' << curve.rho11[i] << '\n';
  return os.str();
}

BoundaryCurve boundary_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string word1, word2;
  int version = 0;
  if (!(is >> word1 >> word2 >> version) || word1 != "boundary-curve" ||
      word2 != "format")
    fail("boundary file: bad header");
  if (version != BoundaryCache::kFormatVersion)
    fail("boundary file: unsupported format version " +
         std::to_string(version));
  BoundaryCurve curve;
  std::size_t n_points = 0;
  if (!(is >> word1 >> curve.atom_count) || word1 != "atoms")
    fail("boundary file: missing atoms line");
  if (!(is >> word1 >> curve.max_group) || word1 != "max_group")
    fail("boundary file: missing max_group line");
  if (!(is >> word1 >> n_points) || word1 != "points" || n_points < 2)
    fail("boundary file: missing points line");
  check_boundary_args(curve.atom_count, curve.max_group);
  curve.rho00.resize(n_points);
  curve.rho11.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    if (!(is >> curve.rho00[i] >> curve.rho11[i]))
      fail("boundary file: truncated data");
    if (i > 0 && curve.rho00[i] <= curve.rho00[i - 1])
      fail("boundary file: grid not increasing");
  }
  return curve;
}

BoundaryCache::BoundaryCache(std::string directory)
    : directory_(std::move(directory)) {}

std::string BoundaryCache::file_name(int atom_count, int max_group) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "boundary_N%d_k%d.txt", atom_count,
                max_group);
  return buf;
}

const BoundaryCache::Entry& BoundaryCache::entry_locked(int atom_count,
                                                        int max_group) {
  const std::pair<int, int> key{atom_count, max_group};
  const auto it = entries_.find(key);
  if (it != entries_.end()) return *it->second;

  auto entry = std::make_unique<Entry>();
  bool loaded = false;
  const std::string path =
      directory_.empty()
          ? std::string()
          : directory_ + "/" + file_name(atom_count, max_group);
  if (!path.empty()) {
    std::ifstream in(path);
    if (in) {
      std::ostringstream buf;
      buf << in.rdbuf();
      try {
        BoundaryCurve curve = boundary_from_text(buf.str());
        if (curve.atom_count == atom_count && curve.max_group == max_group) {
          entry->curve = std::move(curve);
          loaded = true;
        }
      } catch (const std::invalid_argument&) {
        // Unreadable cache: fall through and regenerate.
      }
    }
  }
  if (!loaded) {
    if (max_group > 1) {
      // Reuse the cumulative (k−1) curve; only the new k needs optimizing.
      const Entry& prev = entry_locked(atom_count, max_group - 1);
      entry->curve = prev.curve;
      entry->curve.max_group = max_group;
      for (std::size_t i = 0; i < entry->curve.rho00.size(); ++i)
        entry->curve.rho11[i] = std::max(
            entry->curve.rho11[i],
            pure_boundary_value(atom_count, max_group, entry->curve.rho00[i]));
    } else {
      entry->curve = boundary_curve(atom_count, 1, default_boundary_grid());
    }
    if (!path.empty()) {
      std::ofstream out(path);
      if (out) out << boundary_to_text(entry->curve);
      // A failed write only loses the cache, not the result.
    }
  }
  concave_hull(entry->curve.rho00, entry->curve.rho11, entry->hull_x,
               entry->hull_y);
  auto [pos, inserted] = entries_.emplace(key, std::move(entry));
  (void)inserted;
  return *pos->second;
}

const BoundaryCurve& BoundaryCache::curve(int atom_count, int max_group) {
  check_boundary_args(atom_count, max_group);
  std::lock_guard<std::mutex> lock(mutex_);
  return entry_locked(atom_count, max_group).curve;
}

double BoundaryCache::envelope_value(int atom_count, int max_group,
                                     double rho00) {
  check_boundary_args(atom_count, max_group);
  if (rho00 < 0.0 || rho00 > 1.0) fail("boundary: rho00 in [0, 1]");
  std::lock_guard<std::mutex> lock(mutex_);
  const Entry& e = entry_locked(atom_count, max_group);
  return hull_interpolate(e.hull_x, e.hull_y, rho00);
}

BoundaryCache& shared_boundary_cache() {
  static BoundaryCache cache;
  return cache;
}

int entanglement_depth(double rho00, double rho11, int atom_count,
                       BoundaryCache& cache) {
  if (atom_count < 1) fail("entanglement_depth: atom_count >= 1");
  if (rho00 < 0.0 || rho11 < 0.0 || rho00 > 1.0 || rho11 > 1.0)
    fail("entanglement_depth: populations in [0, 1]");
  if (rho00 + rho11 > 1.0 + 1e-9)
    fail(
        "entanglement_depth: inconsistent input — (rho00, rho11) lies above "
        "the k=N physical boundary");
  for (int k = 1; k <= atom_count; ++k)
    if (rho11 <= cache.envelope_value(atom_count, k, rho00) + 1e-12)
      return k;
  // The k=N envelope is the line 1−ρ00, so the loop always returns for
  // inputs that passed the feasibility check.
  return atom_count;
}

int entanglement_depth(double rho00, double rho11, int atom_count) {
  return entanglement_depth(rho00, rho11, atom_count,
                            shared_boundary_cache());
}

}  // namespace zeno
