#pragma once

// Small hand-checkable universes shared across test files.

#include "drfrontier/universe.hpp"

namespace testsupport {

/// Three assets, V = (1/9) [[11,8,8],[8,23,-4],[8,-4,23]]. Distance matrix
/// [[0,1,1],[1,0,3],[1,3,0]]; equal-weight MVP; MDRP (-1,1,1).
inline drfrontier::MatrixXd three_asset_v() {
    drfrontier::MatrixXd V(3, 3);
    V << 11, 8, 8, 8, 23, -4, 8, -4, 23;
    return V / 9.0;
}

inline drfrontier::AssetUniverse three_asset() { return drfrontier::validate_universe(three_asset_v()); }

/// One riskless-like asset next to two independent unit-variance assets.
inline drfrontier::MatrixXd cash_plus_two_v() {
    drfrontier::MatrixXd V = drfrontier::MatrixXd::Zero(3, 3);
    V(1, 1) = 1.0;
    V(2, 2) = 1.0;
    return V;
}

}  // namespace testsupport
