#include "dvspix/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace dvspix {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("rename failed: " + path.string() + ": " + ec.message());
}

std::string format_event(const EventRecord& ev) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.9f %d %d %d", ev.t, ev.x, ev.y,
                ev.polarity == Polarity::On ? 1 : 0);
  return buf;
}

void write_events(const fs::path& path, const std::vector<EventRecord>& events) {
  std::string out;
  out.reserve(events.size() * 24);
  for (const EventRecord& ev : events) {
    out += format_event(ev);
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<EventRecord> read_events(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open event file: " + path.string());
  std::vector<EventRecord> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double t = 0.0;
    int x = 0, y = 0, p = 0;
    char extra = 0;
    const int got = std::sscanf(line.c_str(), "%lf %d %d %d %c", &t, &x, &y, &p, &extra);
    if (got != 4 || (p != 0 && p != 1) || !(t >= 0.0))
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed event line");
    events.push_back(EventRecord{t, x, y, p == 1 ? Polarity::On : Polarity::Off});
  }
  return events;
}

void write_pgm(const fs::path& path, const Frame& frame) {
  if (frame.width <= 0 || frame.height <= 0)
    throw std::invalid_argument("write_pgm: empty frame");
  std::string out = "P5\n" + std::to_string(frame.width) + " " +
                    std::to_string(frame.height) + "\n255\n";
  out.reserve(out.size() + frame.pixels.size());
  for (double v : frame.pixels) {
    const double clamped = std::clamp(v, 0.0, 255.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(clamped))));
  }
  atomic_write(path, out);
}

namespace {

// Skips PGM whitespace and '#' comments, then reads one unsigned integer.
int read_pgm_int(std::istream& in, const fs::path& path) {
  int c = in.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = in.get();
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) throw DataError("bad PGM header: " + path.string());
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  if (c != EOF) in.unget();
  return value;
}

}  // namespace

Frame read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open frame file: " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') throw DataError("not a binary PGM: " + path.string());
  Frame frame;
  frame.width = read_pgm_int(in, path);
  frame.height = read_pgm_int(in, path);
  const int maxval = read_pgm_int(in, path);
  if (frame.width <= 0 || frame.height <= 0 || maxval != 255)
    throw DataError("unsupported PGM geometry: " + path.string());
  in.get();  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
  std::string raw(n, '\0');
  in.read(raw.data(), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw DataError("truncated PGM payload: " + path.string());
  frame.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    frame.pixels[i] = static_cast<double>(static_cast<unsigned char>(raw[i]));
  return frame;
}

FrameSequence load_frame_dir(const fs::path& dir) {
  const fs::path manifest = dir / "timestamps.txt";
  std::ifstream in(manifest);
  if (!in) throw DataError("cannot open frame manifest: " + manifest.string());
  FrameSequence seq;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string name;
    double t = 0.0;
    if (!(row >> name >> t))
      throw DataError(manifest.string() + ":" + std::to_string(line_no) + ": expected 'file time'");
    const fs::path frame_path = dir / name;
    if (!fs::exists(frame_path))
      throw DataError(manifest.string() + ":" + std::to_string(line_no) +
                      ": missing frame file " + frame_path.string());
    seq.frames.push_back(read_pgm(frame_path));
    seq.timestamps.push_back(t);
  }
  try {
    seq.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(manifest.string() + ": " + e.what());
  }
  return seq;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace dvspix
