#pragma once

#include <string>
#include <vector>

namespace wavegrad {

struct SelfTestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Small-grid invariant checks (filters, transforms, diagonal identities,
/// gradients, metric symmetry, fixed point). Runs in well under a second.
std::vector<SelfTestCheck> run_selftest();

}  // namespace wavegrad
