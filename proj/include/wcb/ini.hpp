#pragma once

// Minimal sectioned key = value reader shared by profiles and scenarios.

#include <string>
#include <vector>

namespace wcb::ini {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

/// '#' and ';' start comments; keys before any [section] go to section "".
/// Throws ConfigError on lines that are neither headers nor assignments.
std::vector<Entry> parse(const std::string& text);

std::string read_file(const std::string& path);

double to_double(const Entry& e);
int to_int(const Entry& e);
bool to_bool(const Entry& e);
std::vector<double> to_doubles(const Entry& e);

/// Shortest text that parses back to the same double.
std::string fmt(double v);
std::string fmt(const std::vector<double>& v);

}  // namespace wcb::ini
