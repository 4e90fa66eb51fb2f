#pragma once

#include <optional>
#include <vector>

#include "ainav/world.hpp"

namespace ainav {

// Rasterized 2.5-D height field. Cell height is the top of the tallest
// object whose robot-radius-inflated footprint covers the cell center, so a
// cell both carries support height and encodes body clearance: entering a
// tall object's inflation band requires the same climb step as the object.
class HeightGrid {
  public:
    HeightGrid() = default;

    struct ObjectView {
        Footprint fp;
        double top = 0.0;
    };

    static HeightGrid build(const Bounds& bounds,
                            const std::vector<ObjectView>& objects,
                            double cell = 0.1, double inflate = 0.3);

    // Convenience raster of all objects in a world / believed scene.
    static HeightGrid of_world(const WorldState& w, double cell = 0.1,
                               double inflate = 0.3);
    static HeightGrid of_belief(const BeliefState& b, const Bounds& bounds,
                                double cell = 0.1, double inflate = 0.3);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double cell() const { return cell_; }
    const Bounds& bounds() const { return bounds_; }

    bool in_grid(int ix, int iy) const {
        return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_;
    }
    double height_at(int ix, int iy) const { return h_[iy * nx_ + ix]; }
    double height_at_point(double x, double y) const;

    // Cell containing a point; nullopt outside bounds.
    std::optional<std::pair<int, int>> cell_of(double x, double y) const;
    void cell_center(int ix, int iy, double& x, double& y) const;

  private:
    Bounds bounds_;
    double cell_ = 0.1;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> h_;
};

// Symmetric reachability: 8-connected, edge traversable iff
// |h(a) - h(b)| <= max_climb. Used by the free-path oracle.
bool grid_free_path(const HeightGrid& g, const Pose3& from, const Pose3& to,
                    double max_climb);

// Ascent-gated shortest path: edge a->b traversable iff
// h(b) - h(a) <= max_climb (descent free). Octile costs in meters.
// Returns cell-center waypoints from the start cell to the goal cell,
// or an empty vector when unreachable.
std::vector<std::pair<double, double>> grid_astar(const HeightGrid& g,
                                                  const Pose3& from,
                                                  const Pose3& to,
                                                  double max_climb);

// Path length in meters of the ascent-gated shortest path; nullopt when
// unreachable.
std::optional<double> grid_distance(const HeightGrid& g, const Pose3& from,
                                    const Pose3& to, double max_climb);

// Reachable cell (ascent-gated, from `from`) whose center is closest to
// `target` in Euclidean terms; ties broken by smallest cell index.
std::optional<Pose3> grid_frontier_toward(const HeightGrid& g,
                                          const Pose3& from,
                                          const Pose3& target,
                                          double max_climb);

// Value used in place of an unreachable grid distance when a finite
// magnitude is needed (reward progress normalization).
double grid_unreachable_distance(const HeightGrid& g);

// Free-path oracle over the ground-truth scenario or a belief.
bool free_path_exists(const Scenario& s, const Pose3& from, const Pose3& to,
                      double robot_radius = 0.3, double cell = 0.1);
bool free_path_exists(const WorldState& w, const Pose3& from, const Pose3& to,
                      double robot_radius = 0.3, double cell = 0.1);
bool free_path_exists(const BeliefState& b, const Bounds& bounds,
                      const ConstraintSet& constraints, const Pose3& from,
                      const Pose3& to, double robot_radius = 0.3,
                      double cell = 0.1);

}  // namespace ainav
