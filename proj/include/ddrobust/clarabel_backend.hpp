#pragma once

#include "ddrobust/lmi.hpp"

namespace ddrobust {

/// Adapter for the Clarabel interior-point conic solver. Default backend.
class ClarabelBackend final : public SdpBackend {
 public:
  std::string name() const override { return "clarabel"; }
  SdpSolution solve(const LmiProblem& problem, const SdpSettings& settings) const override;
};

}  // namespace ddrobust
