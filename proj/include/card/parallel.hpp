#pragma once

#include <cstddef>

namespace card {

/// Selects between the OpenMP kernel and its serial reference. Both produce
/// identical results; the serial path exists for testing and benchmarking.
enum class Exec { serial, parallel };

/// Runs fn(i) for i in [0, n). Iterations must touch disjoint state.
template <typename Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::parallel) {
        const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8)
        for (long long i = 0; i < count; ++i)
            fn(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
    }
}

} // namespace card
