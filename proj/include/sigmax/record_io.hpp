#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sigmax/measurement.hpp"

namespace sigmax {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t file_checksum(const std::string& path);

/// FNV-1a over the bytes of every SystemParams field.
std::uint64_t params_hash(const SystemParams& p);

/// CSV columns t_us, I, Q, hidden_state (-1 when no hidden sequence is given).
void write_record_csv(const std::string& path, const IQRecord& record,
                      const std::vector<int>& hidden = {});

struct LoadedRecord {
  IQRecord record;
  std::vector<int> hidden;  ///< empty when the file carries none
};

LoadedRecord read_record_csv(const std::string& path);

/// Little-endian binary layout:
///   8 bytes  magic "SGXIQ001"
///   u64      params hash
///   u64      seed
///   f64      t_m (seconds)
///   u64      sample count N
///   N x (f64 I, f64 Q)
void write_record_binary(const std::string& path, const IQRecord& record);
IQRecord read_record_binary(const std::string& path);

}  // namespace sigmax
