#pragma once

#include "ddrobust/lmi.hpp"

namespace ddrobust {

/// Adapter for the SCS splitting conic solver (direct linear-system variant).
class ScsBackend final : public SdpBackend {
 public:
  std::string name() const override { return "scs"; }
  SdpSolution solve(const LmiProblem& problem, const SdpSettings& settings) const override;
};

}  // namespace ddrobust
