#include "wcb/profile.hpp"

#include "wcb/errors.hpp"

#include <sstream>

namespace wcb::profile {

using protocol::SlotParams;

Profile hall() {
  Profile p;
  p.name = "hall";
  auto& s = p.slots;
  s.S = {3, 7.0, 0.99996, 7.80};
  s.EV = {2, 4.0, 0.9993, 3.005};
  s.T = {2, 6.0, 0.9994, 3.6929};
  s.A = {3, 8.0, 1.0, 4.9238};
  s.Ctrl = {2, 8.0, 0.99987, 4.9238};
  s.sdr.senders = {1, 2, 3, 5, 7, 10};
  s.sdr.e1 = {1.0, 0.9986, 0.997, 0.991, 0.988, 0.989};
  s.sdr.e2 = {1.0, 0.99999, 0.99994, 0.9995, 0.999, 0.999};
  p.epoch.preamble_ms = 19.023;
  return p;
}

Profile dept() {
  Profile p;
  p.name = "dept";
  auto& s = p.slots;
  s.S = {3, 10.0, 0.99993, 11.87};
  s.EV = {2, 6.0, 0.9988, 3.475};
  s.T = {2, 9.0, 0.99914, 4.2520};
  s.A = {3, 11.0, 0.99994, 5.1969};
  s.Ctrl = {2, 11.0, 0.9998, 5.1969};
  s.sdr.senders = {1, 2, 3, 5, 7, 10};
  s.sdr.e1 = {1.0, 0.9994, 0.9988, 0.9984, 0.997, 0.989};
  s.sdr.e2 = {1.0, 0.999997, 0.999993, 0.99998, 0.9998, 0.998};
  p.epoch.preamble_ms = 19.017;
  return p;
}

Profile by_name(const std::string& name) {
  if (name == "hall") return hall();
  if (name == "dept") return dept();
  throw ConfigError("unknown testbed profile '" + name + "'");
}

namespace {

SlotParams* slot_for(Profile& p, const std::string& key) {
  if (key == "S") return &p.slots.S;
  if (key == "EV") return &p.slots.EV;
  if (key == "T") return &p.slots.T;
  if (key == "A") return &p.slots.A;
  if (key == "CTRL") return &p.slots.Ctrl;
  return nullptr;
}

std::vector<double> as_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

bool apply(Profile& p, const ini::Entry& e) {
  if (SlotParams* s = slot_for(p, e.key)) {
    const auto v = ini::to_doubles(e);
    if (v.size() != 4) throw ConfigError("line " + std::to_string(e.line) + ": " + e.key + " needs N W pdr t_on");
    *s = {static_cast<int>(v[0]), v[1], v[2], v[3]};
    return true;
  }
  auto& c = p.epoch;
  if (e.key == "profile") {
    const auto base = by_name(e.value);
    p = base;
  } else if (e.key == "name") {
    p.name = e.value;
  } else if (e.key == "E") {
    c.E = ini::to_int(e);
  } else if (e.key == "K") {
    c.K = ini::to_int(e);
  } else if (e.key == "R") {
    c.R = ini::to_int(e);
  } else if (e.key == "C") {
    c.C = ini::to_int(e);
  } else if (e.key == "gap_ms") {
    c.gap_ms = ini::to_double(e);
  } else if (e.key == "preamble_ms") {
    c.preamble_ms = ini::to_double(e);
  } else if (e.key == "fp_rate") {
    c.fp_rate = ini::to_double(e);
  } else if (e.key == "sdr_u") {
    p.slots.sdr.senders.clear();
    for (double u : ini::to_doubles(e)) p.slots.sdr.senders.push_back(static_cast<int>(u));
  } else if (e.key == "sdr_e1") {
    p.slots.sdr.e1 = ini::to_doubles(e);
  } else if (e.key == "sdr_e2") {
    p.slots.sdr.e2 = ini::to_doubles(e);
  } else if (e.key == "sink_pdr_T") {
    if (e.value == "none") p.slots.sink_pdr_T.reset();
    else p.slots.sink_pdr_T = ini::to_double(e);
  } else if (e.key == "contention") {
    p.slots.contention_success = ini::to_doubles(e);
  } else {
    return false;
  }
  return true;
}

std::string format(const Profile& p) {
  std::ostringstream out;
  const auto& c = p.epoch;
  const auto& s = p.slots;
  out << "[network]\n";
  out << "name = " << p.name << '\n';
  auto slot = [&](const char* key, const SlotParams& x) {
    out << key << " = " << x.retransmissions << ' ' << ini::fmt(x.duration_ms) << ' ' << ini::fmt(x.pdr) << ' '
        << ini::fmt(x.t_on_ms) << '\n';
  };
  slot("S", s.S);
  slot("EV", s.EV);
  slot("T", s.T);
  slot("A", s.A);
  slot("CTRL", s.Ctrl);
  out << "sdr_u = " << ini::fmt(as_doubles(s.sdr.senders)) << '\n';
  out << "sdr_e1 = " << ini::fmt(s.sdr.e1) << '\n';
  out << "sdr_e2 = " << ini::fmt(s.sdr.e2) << '\n';
  out << "sink_pdr_T = " << (s.sink_pdr_T ? ini::fmt(*s.sink_pdr_T) : std::string("none")) << '\n';
  out << "contention = " << ini::fmt(s.contention_success) << '\n';
  out << "E = " << c.E << "\nK = " << c.K << "\nR = " << c.R << "\nC = " << c.C << '\n';
  out << "gap_ms = " << ini::fmt(c.gap_ms) << '\n';
  out << "preamble_ms = " << ini::fmt(c.preamble_ms) << '\n';
  out << "fp_rate = " << ini::fmt(c.fp_rate) << '\n';
  return out.str();
}

Profile parse(const std::string& text) {
  Profile p = hall();
  for (const auto& e : ini::parse(text)) {
    if (e.section != "network" || !apply(p, e)) {
      throw ConfigError("line " + std::to_string(e.line) + ": unknown profile key '" + e.key + "'");
    }
  }
  protocol::validate(p.epoch, p.slots);
  return p;
}

Profile load(const std::string& path) { return parse(ini::read_file(path)); }

}  // namespace wcb::profile
