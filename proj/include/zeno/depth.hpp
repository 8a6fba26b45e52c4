#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

// Entanglement-depth certification from the pair (ρ00, ρ11): a measured
// point proves depth ≥ k when ρ11 exceeds the maximum ρ11 any
// (k−1)-producible state can reach at the same ρ00.  The boundary b_k(ρ00)
// is recomputed from first principles by maximizing the W-state overlap over
// products of pure symmetric group states (group sizes ≤ k), each group
// restricted to the span of its all-zero state and its W state.
namespace zeno {

// Pure-product boundary for one value of the largest allowed group size,
// cumulative over k (k-producible includes (k−1)-producible by definition).
struct BoundaryCurve {
  int atom_count = 0;           // N
  int max_group = 0;            // k
  std::vector<double> rho00;    // strictly increasing grid over [0, 1]
  std::vector<double> rho11;    // b_k at each grid point
};

// 201 uniform points over [0, 1].
std::vector<double> default_boundary_grid();

// Maximum ρ11 over products of group states for partitions with largest
// part exactly ≤ max_group (the ⌊N/k⌋+remainder and balanced candidates),
// at a single ρ00.  Building block for boundary_curve; not cumulative in k.
double pure_boundary_value(int atom_count, int max_group, double rho00);

// Full cumulative boundary on a grid.  Throws on invalid N, k, or grid.
BoundaryCurve boundary_curve(int atom_count, int max_group,
                             const std::vector<double>& grid);

// Plain-text serialization with a format-version header; round-trips exactly
// (17 significant digits).
std::string boundary_to_text(const BoundaryCurve& curve);
BoundaryCurve boundary_from_text(const std::string& text);

// In-memory store of boundary curves, optionally persisted: with a directory
// set, curves load from `boundary_N<N>_k<k>.txt` when present and are
// regenerated (and rewritten) when absent or unreadable.  Thread-safe.
class BoundaryCache {
 public:
  static constexpr int kFormatVersion = 1;

  BoundaryCache() = default;
  explicit BoundaryCache(std::string directory);

  static std::string file_name(int atom_count, int max_group);

  // The cumulative boundary curve for (N, k), computed on the default grid
  // if not cached.  The reference stays valid for the cache's lifetime.
  const BoundaryCurve& curve(int atom_count, int max_group);

  // Mixed-state boundary: the upper concave envelope of the pure curve,
  // linearly interpolated at ρ00 (mixtures reach every convex combination
  // of pure-product points).
  double envelope_value(int atom_count, int max_group, double rho00);

 private:
  struct Entry {
    BoundaryCurve curve;
    std::vector<double> hull_x, hull_y;  // upper concave envelope vertices
  };

  const Entry& entry_locked(int atom_count, int max_group);

  std::string directory_;
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::unique_ptr<Entry>> entries_;
};

// Process-wide in-memory cache (no persistence) for callers without their
// own, e.g. bootstrap statistics.
BoundaryCache& shared_boundary_cache();

// Smallest k such that (ρ00, ρ11) is reachable by a k-producible state;
// the state then certifies depth ≥ k.  Requires ρ00, ρ11 ≥ 0 and
// ρ00 + ρ11 ≤ 1; points above the k=N boundary are rejected as inconsistent.
int entanglement_depth(double rho00, double rho11, int atom_count,
                       BoundaryCache& cache);
int entanglement_depth(double rho00, double rho11, int atom_count);

}  // namespace zeno
