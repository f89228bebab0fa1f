#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsim/gradcheck.hpp"

namespace gsim {

struct GradCheckCase {
  std::string name;
  GradCheckReport report;
};

/// Central-difference checks of every autodiff operator, the encoder and
/// fusion building blocks, and a full DiffAtt + GCA model (2 layers,
/// hidden 8, two pairs of random 4-6 node graphs). Operand values are kept
/// at least 0.2 away from zero so abs/relu kinks are never straddled.
std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed, double h = 1e-5);

}  // namespace gsim
