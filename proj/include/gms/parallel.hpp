#pragma once

#include <cstddef>

namespace gms {

/// Thread count for internal loops; values < 1 restore the runtime default.
void set_num_threads(int n);
int num_threads();

namespace detail {

// Static schedule over [0, n). Loop bodies must not throw.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

} // namespace detail
} // namespace gms
