#pragma once

#include "ldedq/environment.hpp"
#include "ldedq/thermal.hpp"

namespace ldedq::testing {

/// Default 10 x 10 grid with every depth computed once per test binary.
inline DepthCache& default_cache() {
    static DepthCache cache(StateGrid{}, MaterialEnv{});
    static const bool warmed = (cache.warm_up(0), true);
    (void)warmed;
    return cache;
}

}  // namespace ldedq::testing
