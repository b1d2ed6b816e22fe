#include "pepsim/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace pepsim {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error(where + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s, const std::string& where) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error(where + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string location(const std::filesystem::path& path, int lineno) {
  return path.string() + ":" + std::to_string(lineno);
}

}  // namespace

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error(tmp.string() + ": cannot open for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw std::runtime_error(tmp.string() + ": write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw std::runtime_error("rename " + tmp.string() + " -> " +
                             path.string() + ": " + ec.message());
  }
}

const char* origin_name(Origin o) {
  return o == Origin::kSignal ? "signal" : "background";
}

Origin origin_from_name(const std::string& name) {
  if (name == "signal") return Origin::kSignal;
  if (name == "background") return Origin::kBackground;
  throw std::runtime_error("unknown origin '" + name + "'");
}

void write_events_csv(const std::filesystem::path& path,
                      std::span<const EventRecord> events) {
  std::string out;
  out.reserve(64 + events.size() * 48);
  out += "time_s,energy_keV,cell_id,origin,vetoed\n";
  for (const auto& e : events) {
    out += format_double(e.time_s);
    out += ',';
    out += format_double(e.energy_kev);
    out += ',';
    out += std::to_string(e.cell_id);
    out += ',';
    out += origin_name(e.origin);
    out += ',';
    out += e.vetoed ? '1' : '0';
    out += '\n';
  }
  atomic_write_text(path, out);
}

std::vector<EventRecord> read_events_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path.string() + ": empty file");
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_s,energy_keV,cell_id,origin,vetoed") {
    throw std::runtime_error(location(path, lineno) +
                             ": unexpected events header '" + line + "'");
  }
  std::vector<EventRecord> events;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != 5) {
      throw std::runtime_error(location(path, lineno) +
                               ": expected 5 columns, got " +
                               std::to_string(cols.size()));
    }
    EventRecord e;
    e.time_s = parse_double(cols[0], location(path, lineno));
    e.energy_kev = parse_double(cols[1], location(path, lineno));
    e.cell_id = static_cast<int>(parse_int(cols[2], location(path, lineno)));
    e.origin = origin_from_name(std::string(cols[3]));
    const auto flag = parse_int(cols[4], location(path, lineno));
    if (flag != 0 && flag != 1) {
      throw std::runtime_error(location(path, lineno) +
                               ": vetoed must be 0 or 1");
    }
    e.vetoed = flag == 1;
    e.coincident_hit = e.vetoed;
    events.push_back(e);
  }
  return events;
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const Spectrum& s) {
  s.validate();
  std::string out;
  out.reserve(96 + s.n_bins() * 24);
  out += "# exposure_days=" + format_double(s.exposure_days) + "\n";
  out += "# area_cm2=" + format_double(s.area_cm2) + "\n";
  if (s.underflow != 0) {
    out += "# underflow=" + std::to_string(s.underflow) + "\n";
  }
  if (s.overflow != 0) {
    out += "# overflow=" + std::to_string(s.overflow) + "\n";
  }
  out += "bin_low_keV,bin_high_keV,counts\n";
  for (std::size_t i = 0; i < s.n_bins(); ++i) {
    out += format_double(s.edges_kev[i]);
    out += ',';
    out += format_double(s.edges_kev[i + 1]);
    out += ',';
    out += format_double(s.counts[i]);
    out += '\n';
  }
  atomic_write_text(path, out);
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  Spectrum s;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      const std::string value = line.substr(eq + 1);
      if (key == "exposure_days") {
        s.exposure_days = parse_double(value, location(path, lineno));
      } else if (key == "area_cm2") {
        s.area_cm2 = parse_double(value, location(path, lineno));
      } else if (key == "underflow") {
        s.underflow = static_cast<std::uint64_t>(
            parse_int(value, location(path, lineno)));
      } else if (key == "overflow") {
        s.overflow = static_cast<std::uint64_t>(
            parse_int(value, location(path, lineno)));
      }
      continue;
    }
    if (!header_seen) {
      if (line != "bin_low_keV,bin_high_keV,counts") {
        throw std::runtime_error(location(path, lineno) +
                                 ": unexpected spectrum header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto cols = split_csv(line);
    if (cols.size() != 3) {
      throw std::runtime_error(location(path, lineno) +
                               ": expected 3 columns, got " +
                               std::to_string(cols.size()));
    }
    const double lo = parse_double(cols[0], location(path, lineno));
    const double hi = parse_double(cols[1], location(path, lineno));
    const double counts = parse_double(cols[2], location(path, lineno));
    if (s.edges_kev.empty()) {
      s.edges_kev.push_back(lo);
    } else if (s.edges_kev.back() != lo) {
      throw std::runtime_error(location(path, lineno) +
                               ": bins are not contiguous");
    }
    if (!(hi > lo)) {
      throw std::runtime_error(location(path, lineno) +
                               ": bin_high must exceed bin_low");
    }
    s.edges_kev.push_back(hi);
    s.counts.push_back(counts);
  }
  if (!header_seen || s.counts.empty()) {
    throw std::runtime_error(path.string() + ": no spectrum rows");
  }
  s.validate();
  return s;
}

}  // namespace pepsim
