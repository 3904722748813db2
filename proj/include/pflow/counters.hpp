#pragma once

#include <cstdint>

namespace pflow {

/// Instrumentation attached to kernel and baseline paths.
///
/// element_visits counts loop trips over stored matrix elements;
/// pattern_allocs counts freshly allocated column-index/row-pointer arrays.
/// Both back the iteration-count contracts checked by the test suite.
struct OpCounters {
    std::uint64_t element_visits = 0;
    std::uint64_t pattern_allocs = 0;

    OpCounters& operator+=(const OpCounters& o) {
        element_visits += o.element_visits;
        pattern_allocs += o.pattern_allocs;
        return *this;
    }
};

inline void count_visits(OpCounters* c, std::uint64_t n) {
    if (c) c->element_visits += n;
}

inline void count_pattern_alloc(OpCounters* c) {
    if (c) ++c->pattern_allocs;
}

}  // namespace pflow
