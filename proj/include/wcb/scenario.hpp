#pragma once

// Scenario files: sections [run], [plant], [control], [trigger], [network]
// and [noise] of key = value lines. Unknown keys are rejected.

#include "wcb/cosim.hpp"

#include <string>
#include <vector>

namespace wcb::scenario {

/// Parses scenario text. Relative trigger/profile paths resolve against
/// `base_dir`. Throws ScenarioError.
cosim::Scenario parse(const std::string& text, const std::string& base_dir = ".");

/// Full text form; parse(serialize(s)) reproduces s.
std::string serialize(const cosim::Scenario& s);

/// Applies "section.key=value" overrides in order. Throws ScenarioError.
void apply_overrides(cosim::Scenario& s, const std::vector<std::string>& overrides,
                     const std::string& base_dir = ".");

/// Presets named <hall|dept>_<etc|periodic>_<noiseless|noisy>.
/// Every preset uses the testbed delivery statistics; noisy ones add
/// level noise (1 mm) and flow noise (1 m^3/min).
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
cosim::Scenario preset(const std::string& name);

/// A preset name or a scenario file path.
cosim::Scenario load(const std::string& name_or_path);

}  // namespace wcb::scenario
