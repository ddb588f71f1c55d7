#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qrinv/forward.hpp"

namespace qrinv {

/// Plain-text trace container: ordered `key value` header lines followed by
/// named blocks of per-sample rows `x y length re_1 im_1 ... re_M im_M`.
/// Doubles are written with 17 significant digits, so a round trip is exact.
struct TraceFile {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::pair<std::string, TraceData>> blocks;

  /// Throws ValidationError when the key is missing.
  const std::string& get(const std::string& key) const;
  const TraceData& block(const std::string& name) const;
  void set(const std::string& key, std::string value);
};

void write_trace_file(std::ostream& out, const TraceFile& file);
TraceFile read_trace_file(std::istream& in);
void save_trace_file(const std::filesystem::path& path, const TraceFile& file);
TraceFile load_trace_file(const std::filesystem::path& path);

/// %.17g, used for every artifact number.
std::string format_double(double v);
std::string format_hex(std::uint64_t v);
std::uint64_t parse_hex(const std::string& s);
std::uint64_t fnv1a(const std::string& bytes);

TraceFile dataset_to_file(const Dataset& ds, std::uint64_t config_checksum);
Dataset dataset_from_file(const TraceFile& file);

}  // namespace qrinv
