#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "nobcr/core/packet.hpp"
#include "nobcr/sim/rng.hpp"

namespace nobcr {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/**
 * Random waypoint trajectory of one node: move in a straight line to a
 * uniformly drawn waypoint at a speed drawn from [speed_min, speed_max],
 * pause, repeat. Time is mobility time, which starts `warmup` seconds before
 * the simulation clock. Queries must be non-decreasing in time.
 */
class RandomWaypoint {
public:
    struct Params {
        double side = 1000.0;
        double speed_min = 0.0;
        double speed_max = 0.0;
        double pause = 0.0;
    };

    RandomWaypoint(Params p, std::mt19937_64 rng) : p_(p), rng_(std::move(rng)) {
        from_ = random_point();
        to_ = from_;
        if (p_.speed_max > 0.0) next_leg(0.0);
    }

    /// Fixed position, never moves.
    static RandomWaypoint fixed(Vec2 at) {
        RandomWaypoint w(Params{}, std::mt19937_64{});
        w.from_ = w.to_ = at;
        return w;
    }

    [[nodiscard]] Vec2 position(double t) {
        if (!moving()) return from_;
        advance(t);
        if (t >= t_arrive_) return to_;
        const double f = (t - t_start_) / (t_arrive_ - t_start_);
        return {from_.x + f * (to_.x - from_.x), from_.y + f * (to_.y - from_.y)};
    }

    /// Instantaneous speed (0 while pausing).
    [[nodiscard]] double speed(double t) {
        if (!moving()) return 0.0;
        advance(t);
        return t < t_arrive_ ? speed_ : 0.0;
    }

private:
    [[nodiscard]] bool moving() const { return p_.speed_max > 0.0; }

    Vec2 random_point() { return {uniform(rng_, 0.0, p_.side), uniform(rng_, 0.0, p_.side)}; }

    void next_leg(double start) {
        from_ = to_;
        to_ = random_point();
        speed_ = uniform(rng_, p_.speed_min, p_.speed_max);
        t_start_ = start;
        t_arrive_ = start + distance(from_, to_) / speed_;
        t_end_ = t_arrive_ + p_.pause;
    }

    void advance(double t) {
        while (t >= t_end_) next_leg(t_end_);
    }

    Params p_;
    std::mt19937_64 rng_;
    Vec2 from_, to_;
    double speed_ = 0.0;
    double t_start_ = 0.0;
    double t_arrive_ = 0.0;
    double t_end_ = 0.0;
};

}  // namespace nobcr
