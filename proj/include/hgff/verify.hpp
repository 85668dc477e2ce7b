#pragma once

#include <string>
#include <vector>

namespace hgff {

enum class VerifyLevel { Quick, Full };

// Deliberate corruption hooks for exercising the suite's own teeth. The
// sign flip replaces K_1(1) by -K_1(1) wherever that value is nonzero,
// which must knock over the orthogonality group.
struct FaultInjection {
  bool flip_kraw_sign = false;
};

struct GroupResult {
  std::string name;
  bool pass = false;
  int checks = 0;
  double max_err = 0.0;
  std::string note;
};

struct VerifyReport {
  std::vector<GroupResult> groups;
  bool all_pass() const;
};

// The group list is fixed: graph, characters, krawtchouk, spectrum,
// lumping, green, massless, partition, sampler, montecarlo. Quick level
// trims grids and sample counts; full level runs the contract grids.
VerifyReport run_verification_suite(VerifyLevel level,
                                    const FaultInjection& fault = {});

}  // namespace hgff
