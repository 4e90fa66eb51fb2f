#include "ainav/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace ainav {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

const int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
const int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

}  // namespace

HeightGrid HeightGrid::build(const Bounds& bounds,
                             const std::vector<ObjectView>& objects,
                             double cell, double inflate) {
    HeightGrid g;
    g.bounds_ = bounds;
    g.cell_ = cell;
    g.nx_ = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell)));
    g.ny_ = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell)));
    g.h_.assign(static_cast<size_t>(g.nx_) * g.ny_, 0.0);
    for (const auto& obj : objects) {
        // Only rasterize the object's local neighborhood.
        const double reach =
            std::hypot(obj.fp.half_l, obj.fp.half_w) + inflate + cell;
        const int ix0 = std::max(
            0, static_cast<int>((obj.fp.cx - reach - bounds.min_x) / cell));
        const int ix1 = std::min(
            g.nx_ - 1,
            static_cast<int>((obj.fp.cx + reach - bounds.min_x) / cell));
        const int iy0 = std::max(
            0, static_cast<int>((obj.fp.cy - reach - bounds.min_y) / cell));
        const int iy1 = std::min(
            g.ny_ - 1,
            static_cast<int>((obj.fp.cy + reach - bounds.min_y) / cell));
        for (int iy = iy0; iy <= iy1; ++iy) {
            for (int ix = ix0; ix <= ix1; ++ix) {
                double x, y;
                g.cell_center(ix, iy, x, y);
                if (obj.fp.contains(x, y, inflate)) {
                    double& v = g.h_[iy * g.nx_ + ix];
                    v = std::max(v, obj.top);
                }
            }
        }
    }
    return g;
}

HeightGrid HeightGrid::of_world(const WorldState& w, double cell,
                                double inflate) {
    std::vector<ObjectView> views;
    views.reserve(w.scenario.objects.size());
    for (const auto& o : w.scenario.objects)
        views.push_back({o.footprint(), o.top()});
    return build(w.scenario.bounds, views, cell, inflate);
}

HeightGrid HeightGrid::of_belief(const BeliefState& b, const Bounds& bounds,
                                 double cell, double inflate) {
    std::vector<ObjectView> views;
    views.reserve(b.known.size());
    for (const auto& [id, e] : b.known)
        views.push_back({e.object.footprint(), e.object.top()});
    return build(bounds, views, cell, inflate);
}

double HeightGrid::height_at_point(double x, double y) const {
    auto c = cell_of(x, y);
    if (!c) return 0.0;
    return height_at(c->first, c->second);
}

std::optional<std::pair<int, int>> HeightGrid::cell_of(double x,
                                                       double y) const {
    if (!bounds_.contains(x, y)) return std::nullopt;
    int ix = static_cast<int>((x - bounds_.min_x) / cell_);
    int iy = static_cast<int>((y - bounds_.min_y) / cell_);
    ix = std::min(ix, nx_ - 1);
    iy = std::min(iy, ny_ - 1);
    return std::make_pair(ix, iy);
}

void HeightGrid::cell_center(int ix, int iy, double& x, double& y) const {
    x = bounds_.min_x + (ix + 0.5) * cell_;
    y = bounds_.min_y + (iy + 0.5) * cell_;
}

namespace {

// step_ok(a, b): edge gate between adjacent cells.
template <typename StepOk>
bool diagonal_allowed(const HeightGrid& g, int ix, int iy, int dx, int dy,
                      StepOk&& step_ok) {
    // No corner cutting: both orthogonal detours must be open.
    return g.in_grid(ix + dx, iy) && g.in_grid(ix, iy + dy) &&
           step_ok(ix, iy, ix + dx, iy) && step_ok(ix, iy, ix, iy + dy);
}

}  // namespace

bool grid_free_path(const HeightGrid& g, const Pose3& from, const Pose3& to,
                    double max_climb) {
    auto s = g.cell_of(from.x, from.y);
    auto t = g.cell_of(to.x, to.y);
    if (!s || !t) return false;
    auto step_ok = [&](int ax, int ay, int bx, int by) {
        return std::abs(g.height_at(ax, ay) - g.height_at(bx, by)) <=
               max_climb + 1e-9;
    };
    std::vector<char> seen(static_cast<size_t>(g.nx()) * g.ny(), 0);
    std::queue<std::pair<int, int>> q;
    q.push(*s);
    seen[s->second * g.nx() + s->first] = 1;
    while (!q.empty()) {
        auto [ix, iy] = q.front();
        q.pop();
        if (ix == t->first && iy == t->second) return true;
        for (int k = 0; k < 8; ++k) {
            const int nx = ix + kDx[k];
            const int ny = iy + kDy[k];
            if (!g.in_grid(nx, ny)) continue;
            if (seen[ny * g.nx() + nx]) continue;
            if (!step_ok(ix, iy, nx, ny)) continue;
            if (k >= 4 &&
                !diagonal_allowed(g, ix, iy, kDx[k], kDy[k], step_ok))
                continue;
            seen[ny * g.nx() + nx] = 1;
            q.push({nx, ny});
        }
    }
    return false;
}

namespace {

struct AStarOut {
    std::vector<int> parent;
    std::vector<double> dist;
    bool reached = false;
    int goal_idx = -1;
};

// Ascent-gated search; when `target` is null runs Dijkstra over everything.
AStarOut ascent_search(const HeightGrid& g, std::pair<int, int> start,
                       const std::pair<int, int>* target, double max_climb) {
    const int n = g.nx() * g.ny();
    AStarOut out;
    out.parent.assign(n, -1);
    out.dist.assign(n, std::numeric_limits<double>::infinity());

    auto step_ok = [&](int ax, int ay, int bx, int by) {
        return g.height_at(bx, by) - g.height_at(ax, ay) <= max_climb + 1e-9;
    };
    auto heuristic = [&](int ix, int iy) {
        if (!target) return 0.0;
        const double dx = std::abs(ix - target->first);
        const double dy = std::abs(iy - target->second);
        return (std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy)) *
               g.cell();
    };

    using Entry = std::tuple<double, double, int>;  // f, g, idx
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    const int sidx = start.second * g.nx() + start.first;
    out.dist[sidx] = 0.0;
    open.push({heuristic(start.first, start.second), 0.0, sidx});
    while (!open.empty()) {
        auto [f, gc, idx] = open.top();
        open.pop();
        if (gc > out.dist[idx] + 1e-12) continue;
        const int ix = idx % g.nx();
        const int iy = idx / g.nx();
        if (target && ix == target->first && iy == target->second) {
            out.reached = true;
            out.goal_idx = idx;
            return out;
        }
        for (int k = 0; k < 8; ++k) {
            const int nxp = ix + kDx[k];
            const int nyp = iy + kDy[k];
            if (!g.in_grid(nxp, nyp)) continue;
            if (!step_ok(ix, iy, nxp, nyp)) continue;
            if (k >= 4 &&
                !diagonal_allowed(g, ix, iy, kDx[k], kDy[k], step_ok))
                continue;
            const double cost = (k >= 4 ? kSqrt2 : 1.0) * g.cell();
            const int nidx = nyp * g.nx() + nxp;
            const double ng = gc + cost;
            if (ng < out.dist[nidx] - 1e-12) {
                out.dist[nidx] = ng;
                out.parent[nidx] = idx;
                open.push({ng + heuristic(nxp, nyp), ng, nidx});
            }
        }
    }
    return out;
}

}  // namespace

std::vector<std::pair<double, double>> grid_astar(const HeightGrid& g,
                                                  const Pose3& from,
                                                  const Pose3& to,
                                                  double max_climb) {
    auto s = g.cell_of(from.x, from.y);
    auto t = g.cell_of(to.x, to.y);
    if (!s || !t) return {};
    auto res = ascent_search(g, *s, &*t, max_climb);
    if (!res.reached) return {};
    std::vector<int> chain;
    for (int idx = res.goal_idx; idx != -1; idx = res.parent[idx])
        chain.push_back(idx);
    std::reverse(chain.begin(), chain.end());
    std::vector<std::pair<double, double>> pts;
    pts.reserve(chain.size());
    for (int idx : chain) {
        double x, y;
        g.cell_center(idx % g.nx(), idx / g.nx(), x, y);
        pts.emplace_back(x, y);
    }
    return pts;
}

std::optional<double> grid_distance(const HeightGrid& g, const Pose3& from,
                                    const Pose3& to, double max_climb) {
    auto s = g.cell_of(from.x, from.y);
    auto t = g.cell_of(to.x, to.y);
    if (!s || !t) return std::nullopt;
    if (*s == *t) return 0.0;
    auto res = ascent_search(g, *s, &*t, max_climb);
    if (!res.reached) return std::nullopt;
    return res.dist[res.goal_idx];
}

std::optional<Pose3> grid_frontier_toward(const HeightGrid& g,
                                          const Pose3& from,
                                          const Pose3& target,
                                          double max_climb) {
    auto s = g.cell_of(from.x, from.y);
    if (!s) return std::nullopt;
    auto res = ascent_search(g, *s, nullptr, max_climb);
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (int idx = 0; idx < g.nx() * g.ny(); ++idx) {
        if (!std::isfinite(res.dist[idx])) continue;
        double x, y;
        g.cell_center(idx % g.nx(), idx / g.nx(), x, y);
        const double d = distance_xy(x, y, target.x, target.y);
        if (d < best - 1e-12) {
            best = d;
            best_idx = idx;
        }
    }
    if (best_idx < 0) return std::nullopt;
    double x, y;
    g.cell_center(best_idx % g.nx(), best_idx / g.nx(), x, y);
    Pose3 p;
    p.x = x;
    p.y = y;
    p.z = g.height_at(best_idx % g.nx(), best_idx / g.nx());
    p.yaw = std::atan2(target.y - y, target.x - x);
    return p;
}

double grid_unreachable_distance(const HeightGrid& g) {
    return 2.0 * std::hypot(g.bounds().width(), g.bounds().height());
}

bool free_path_exists(const Scenario& s, const Pose3& from, const Pose3& to,
                      double robot_radius, double cell) {
    WorldState w(s);
    return free_path_exists(w, from, to, robot_radius, cell);
}

bool free_path_exists(const WorldState& w, const Pose3& from, const Pose3& to,
                      double robot_radius, double cell) {
    HeightGrid g = HeightGrid::of_world(w, cell, robot_radius);
    return grid_free_path(g, from, to, w.scenario.constraints.max_climb_height);
}

bool free_path_exists(const BeliefState& b, const Bounds& bounds,
                      const ConstraintSet& constraints, const Pose3& from,
                      const Pose3& to, double robot_radius, double cell) {
    HeightGrid g = HeightGrid::of_belief(b, bounds, cell, robot_radius);
    return grid_free_path(g, from, to, constraints.max_climb_height);
}

}  // namespace ainav
