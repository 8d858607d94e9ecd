#pragma once

#include <cstddef>
#include <span>

namespace levymix::detail {

// Pairwise summation.  The bracketing depends only on the element order,
// so totals are bit-identical however the inputs were produced.
template <class T>
T pairwise_sum(std::span<const T> v) {
    if (v.size() <= 16) {
        T s{};
        for (const T& x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace levymix::detail
