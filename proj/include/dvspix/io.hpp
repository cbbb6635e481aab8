#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dvspix/errors.hpp"
#include "dvspix/simulator.hpp"
#include "dvspix/stimulus.hpp"

// File formats. Event files are "t x y p" lines, timestamps printed with
// nine fractional digits, polarity 0 = OFF / 1 = ON. Frames are binary PGM
// plus a timestamps.txt sidecar. All writes go through a temp file and a
// rename so readers never see partial content.

namespace dvspix {

/// Write text atomically (temp file in the same directory, then rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Serialize events in stream order.
void write_events(const std::filesystem::path& path, const std::vector<EventRecord>& events);

/// Parse an event file, preserving line order. Malformed lines raise
/// DataError with the line number.
[[nodiscard]] std::vector<EventRecord> read_events(const std::filesystem::path& path);

/// One formatted event line (no newline), shared by writer and tests.
[[nodiscard]] std::string format_event(const EventRecord& ev);

/// Binary 8-bit PGM.
void write_pgm(const std::filesystem::path& path, const Frame& frame);
[[nodiscard]] Frame read_pgm(const std::filesystem::path& path);

/// Load dir/*.pgm listed by dir/timestamps.txt ("filename time" per line).
[[nodiscard]] FrameSequence load_frame_dir(const std::filesystem::path& dir);

/// FNV-1a 64 of a byte string, for provenance stamping.
[[nodiscard]] std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace dvspix
