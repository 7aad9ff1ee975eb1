#pragma once

// Testbed profiles: slot parameters, delivery statistics and the
// calibrated radio-on and preamble values for the two deployments.

#include "wcb/ini.hpp"
#include "wcb/protocol.hpp"

#include <string>
#include <vector>

namespace wcb::profile {

struct Profile {
  std::string name;
  protocol::SlotConfig slots;
  protocol::EpochConfig epoch;
};

Profile hall();
Profile dept();

/// "hall" or "dept"; throws ConfigError otherwise.
Profile by_name(const std::string& name);

/// Applies one [network] entry to the profile. Returns false if the key is
/// not a network key. Slot keys take "N W pdr t_on".
bool apply(Profile& p, const ini::Entry& e);

/// [network] section text carrying every field of the profile.
std::string format(const Profile& p);

/// Profile file: a [network] section; `profile = <name>` first selects a base.
Profile parse(const std::string& text);
Profile load(const std::string& path);

}  // namespace wcb::profile
