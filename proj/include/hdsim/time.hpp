#ifndef HDSIM_TIME_HPP
#define HDSIM_TIME_HPP

#include <compare>
#include <cstdint>

namespace hdsim {

/// Simulation time as an integer count of microsecond ticks.
struct Time {
    std::int64_t ticks = 0;

    constexpr auto operator<=>(const Time&) const = default;

    constexpr Time& operator+=(Time o) { ticks += o.ticks; return *this; }
    constexpr Time& operator-=(Time o) { ticks -= o.ticks; return *this; }

    constexpr double as_seconds() const { return static_cast<double>(ticks) * 1e-6; }
};

constexpr Time operator+(Time a, Time b) { return Time{a.ticks + b.ticks}; }
constexpr Time operator-(Time a, Time b) { return Time{a.ticks - b.ticks}; }
constexpr Time operator*(Time a, std::int64_t k) { return Time{a.ticks * k}; }

constexpr Time usec(std::int64_t n) { return Time{n}; }
constexpr Time msec(std::int64_t n) { return Time{n * 1000}; }
constexpr Time sec(std::int64_t n) { return Time{n * 1000000}; }

/// Closed interval [min, max] used for randomized delays.
struct TimeRange {
    Time min;
    Time max;

    constexpr auto operator<=>(const TimeRange&) const = default;
};

}  // namespace hdsim

#endif
