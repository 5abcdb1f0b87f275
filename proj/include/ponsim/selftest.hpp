#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ponsim {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Analytic and oracle checks that need no simulation run. `inject_fault`
/// names a mutation to apply first ("dba2" or "dba3").
std::vector<SelftestCheck> run_selftest(const std::optional<std::string>& inject_fault = {});

/// Prints one line per check; returns 0 if all passed, 1 otherwise.
int report_selftest(std::ostream& os, const std::vector<SelftestCheck>& checks);

}  // namespace ponsim
