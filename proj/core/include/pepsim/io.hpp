#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pepsim/analysis.hpp"
#include "pepsim/simulate.hpp"

namespace pepsim {

// Shortest decimal form that parses back to the identical double
// (std::to_chars general form). All CSV numbers go through this, which is
// what makes write -> read -> write byte-stable.
std::string format_double(double v);

// Writes via a temp file in the same directory plus rename, so readers
// never observe a half-written file. Creates parent directories.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

// Event list CSV, header:
//   time_s,energy_keV,cell_id,origin,vetoed
// origin is "signal" or "background", vetoed is 0/1. The coincident flag
// is run-internal and not serialized; reading restores
// coincident_hit = vetoed.
void write_events_csv(const std::filesystem::path& path,
                      std::span<const EventRecord> events);
std::vector<EventRecord> read_events_csv(const std::filesystem::path& path);

// Spectrum CSV, header:
//   bin_low_keV,bin_high_keV,counts
// preceded by '# exposure_days=' and '# area_cm2=' comment lines (and
// '# underflow='/'# overflow=' when nonzero) so a spectrum round-trips
// completely. Rows must form a contiguous strictly increasing grid.
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);
Spectrum read_spectrum_csv(const std::filesystem::path& path);

const char* origin_name(Origin o);
Origin origin_from_name(const std::string& name);

}  // namespace pepsim
