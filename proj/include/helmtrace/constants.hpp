#pragma once

namespace helmtrace {
namespace detail {

inline constexpr double euler_gamma = 0.57721566490153286060651209;
inline constexpr double pi() { return 3.14159265358979323846; }
inline constexpr double pi_over_2() { return pi() * 0.5; }

} // namespace detail
} // namespace helmtrace
