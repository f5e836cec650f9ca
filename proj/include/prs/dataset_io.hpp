#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "prs/atomic_file.hpp"
#include "prs/common.hpp"

namespace prs {

inline constexpr std::size_t kMinSegmentLength = 16;

struct SignalSegment {
  std::vector<double> samples;
  double sampling_rate{0.0};  // Hz
  std::string label;
  std::string id;

  std::size_t size() const { return samples.size(); }
  friend bool operator==(const SignalSegment&, const SignalSegment&) = default;
};

// Two-class collection of segments. class_names is sorted lexicographically;
// class_names[0] is C1 and class_names[1] is C2 for all downstream math.
struct LabeledDataset {
  std::vector<SignalSegment> segments;
  std::array<std::string, 2> class_names;
  std::string name;

  std::size_t size() const { return segments.size(); }

  // Class index (0 = C1, 1 = C2) of every segment, in segment order.
  std::vector<int> class_indices() const {
    std::vector<int> out;
    out.reserve(segments.size());
    for (const auto& s : segments) out.push_back(s.label == class_names[1] ? 1 : 0);
    return out;
  }

  const SignalSegment& find(std::string_view id) const {
    for (const auto& s : segments)
      if (s.id == id) return s;
    throw DataError("unknown sample id '" + std::string(id) + "'");
  }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline bool is_safe_filename(std::string_view s) {
  if (s.empty() || s == "." || s == "..") return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-' || c == '.';
  });
}

}  // namespace detail

// Reads one amplitude per line. Blank lines are skipped.
inline std::vector<double> read_signal_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": missing file");
  std::vector<double> samples;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto text = detail::trim(line);
    if (text.empty()) continue;
    double v = 0.0;
    if (!detail::parse_double(text, v))
      throw DataError(path.string() + ":" + std::to_string(row) + ": non-numeric sample '" +
                      std::string(text) + "'");
    if (!std::isfinite(v))
      throw DataError(path.string() + ":" + std::to_string(row) + ": non-finite sample");
    samples.push_back(v);
  }
  return samples;
}

// Checks the LabeledDataset invariants and fills class_names.
inline void validate_dataset(LabeledDataset& ds) {
  std::set<std::string> labels;
  std::set<std::string> ids;
  for (const auto& s : ds.segments) {
    labels.insert(s.label);
    if (!ids.insert(s.id).second) throw DataError("duplicate segment id '" + s.id + "'");
    if (s.samples.size() < kMinSegmentLength)
      throw DataError("segment '" + s.id + "': segment too short (" + std::to_string(s.samples.size()) +
                      " < " + std::to_string(kMinSegmentLength) + " samples)");
    if (!(s.sampling_rate > 0.0) || !std::isfinite(s.sampling_rate))
      throw DataError("segment '" + s.id + "': sampling rate must be positive");
    for (double v : s.samples)
      if (!std::isfinite(v)) throw DataError("segment '" + s.id + "': non-finite sample");
  }
  if (labels.size() != 2)
    throw DataError("expected binary classes, found " + std::to_string(labels.size()) + " distinct labels");
  ds.class_names = {*labels.begin(), *labels.rbegin()};
  for (const auto& name : ds.class_names) {
    auto n = std::count_if(ds.segments.begin(), ds.segments.end(),
                           [&](const SignalSegment& s) { return s.label == name; });
    if (n < 2) throw DataError("class '" + name + "' has fewer than 2 segments");
  }
}

// Manifest format:
//   # sampling_rate=<Hz>
//   id,label,path
//   <id>,<label>,<path relative to the manifest directory>
inline LabeledDataset load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError(manifest_path.string() + ": missing file");
  const auto where = [&](std::size_t row) { return manifest_path.string() + ":" + std::to_string(row); };
  const auto base_dir = manifest_path.parent_path();

  LabeledDataset ds;
  ds.name = manifest_path.parent_path().filename().string();
  double fs = 0.0;
  bool header_seen = false;
  std::string line;
  std::size_t row = 0;
  struct Row {
    std::string id, label, path;
    std::size_t line;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++row;
    auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      auto body = detail::trim(text.substr(1));
      constexpr std::string_view key = "sampling_rate=";
      if (body.starts_with(key) && !detail::parse_double(body.substr(key.size()), fs))
        throw DataError(where(row) + ": invalid sampling_rate");
      continue;
    }
    auto fields = detail::split_csv(text);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "id" || fields[1] != "label" || fields[2] != "path")
        throw DataError(where(row) + ": expected header 'id,label,path'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
      throw DataError(where(row) + ": expected 3 fields 'id,label,path'");
    rows.push_back({std::string(fields[0]), std::string(fields[1]), std::string(fields[2]), row});
  }
  if (!header_seen) throw DataError(manifest_path.string() + ": empty manifest");
  if (!(fs > 0.0)) throw DataError(manifest_path.string() + ": missing '# sampling_rate=<Hz>' line");

  for (const auto& r : rows) {
    std::filesystem::path p = r.path;
    if (p.is_relative()) p = base_dir / p;
    SignalSegment seg;
    try {
      seg.samples = read_signal_file(p);
    } catch (const DataError& e) {
      throw DataError(where(r.line) + ": " + e.what());
    }
    if (seg.samples.size() < kMinSegmentLength)
      throw DataError(where(r.line) + ": " + p.string() + ": segment too short (" +
                      std::to_string(seg.samples.size()) + " samples)");
    seg.sampling_rate = fs;
    seg.label = r.label;
    seg.id = r.id;
    ds.segments.push_back(std::move(seg));
  }
  validate_dataset(ds);
  return ds;
}

// Writes `dir/manifest.csv` plus one text file per segment under
// `dir/signals/`. Values use shortest round-trip formatting, so
// load_dataset(write_dataset(d)) reproduces d exactly. All segments must share
// one sampling rate. Returns the manifest path.
inline std::filesystem::path write_dataset(const LabeledDataset& ds, const std::filesystem::path& dir) {
  if (ds.segments.empty()) throw ArgumentError("cannot write an empty dataset");
  const double fs = ds.segments.front().sampling_rate;
  for (const auto& s : ds.segments)
    if (s.sampling_rate != fs) throw ArgumentError("write_dataset requires a single sampling rate");

  std::string manifest = "# sampling_rate=" + detail::format_double(fs) + "\nid,label,path\n";
  for (std::size_t i = 0; i < ds.segments.size(); ++i) {
    const auto& s = ds.segments[i];
    if (s.id.find(',') != std::string::npos || s.label.find(',') != std::string::npos)
      throw ArgumentError("segment id/label must not contain ','");
    std::string stem = detail::is_safe_filename(s.id) ? s.id : "segment_" + std::to_string(i);
    std::string rel = "signals/" + stem + ".txt";
    std::string body;
    body.reserve(s.samples.size() * 24);
    for (double v : s.samples) {
      body += detail::format_double(v);
      body += '\n';
    }
    write_file_atomic(dir / rel, body);
    manifest += s.id + "," + s.label + "," + rel + "\n";
  }
  auto path = dir / "manifest.csv";
  write_file_atomic(path, manifest);
  return path;
}

// Deterministic two-class toy dataset sampled at 1000 Hz.
//   "P": unit-variance Gaussian noise + 1.5 * sin(2*pi*10*t + phase)
//   "N": unit-variance Gaussian noise scaled by 2
// Population variance is 1 + 1.5^2/2 = 2.125 for P and 4 for N.
inline LabeledDataset generate_synthetic(std::size_t n_per_class, std::size_t length, std::uint64_t seed) {
  if (n_per_class < 2) throw ArgumentError("generate_synthetic: n_per_class must be >= 2");
  if (length < kMinSegmentLength) throw ArgumentError("generate_synthetic: length must be >= 16");
  constexpr double fs = 1000.0;
  constexpr double tone_hz = 10.0;
  constexpr double tone_amp = 1.5;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);

  LabeledDataset ds;
  ds.name = "synthetic";
  ds.class_names = {"N", "P"};
  char id[32];
  for (const char* cls : {"P", "N"}) {
    for (std::size_t k = 0; k < n_per_class; ++k) {
      SignalSegment seg;
      seg.sampling_rate = fs;
      seg.label = cls;
      std::snprintf(id, sizeof id, "%s_%03zu", cls, k);
      seg.id = id;
      seg.samples.resize(length);
      if (cls[0] == 'P') {
        const double phase = phase_dist(rng);
        for (std::size_t i = 0; i < length; ++i)
          seg.samples[i] = noise(rng) + tone_amp * std::sin(2.0 * std::numbers::pi * tone_hz * i / fs + phase);
      } else {
        for (std::size_t i = 0; i < length; ++i) seg.samples[i] = 2.0 * noise(rng);
      }
      ds.segments.push_back(std::move(seg));
    }
  }
  return ds;
}

}  // namespace prs
