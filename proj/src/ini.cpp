#include "wcb/ini.hpp"

#include "wcb/errors.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

namespace wcb::ini {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const Entry& e, const std::string& what) {
  throw ConfigError("line " + std::to_string(e.line) + ": " + (e.section.empty() ? "" : e.section + ".") +
                    e.key + ": " + what + " (got '" + e.value + "')");
}

}  // namespace

std::vector<Entry> parse(const std::string& text) {
  std::vector<Entry> out;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto c = raw.find_first_of("#;");
    std::string s = trim(c == std::string::npos ? raw : raw.substr(0, c));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    Entry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double to_double(const Entry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size() || !std::isfinite(v)) fail(e, "expected a finite number");
    return v;
  } catch (const std::logic_error&) {
    fail(e, "expected a number");
  }
}

int to_int(const Entry& e) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(e.value, &used);
    if (used != e.value.size()) fail(e, "expected an integer");
    return v;
  } catch (const std::logic_error&) {
    fail(e, "expected an integer");
  }
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  fail(e, "expected true or false");
}

std::vector<double> to_doubles(const Entry& e) {
  std::vector<double> v;
  std::istringstream in(e.value);
  std::string tok;
  while (in >> tok) {
    Entry one = e;
    one.value = tok;
    v.push_back(to_double(one));
  }
  return v;
}

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + fmt(v[k]);
  return s;
}

}  // namespace wcb::ini
