#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "scslab/qarith/hecke.hpp"

namespace scslab::cli {

inline constexpr char kCacheTag[] = "SCSLAB-EIG-1";
inline constexpr char kOrderingKey[] = "lambda2-ascending";

/// A cache file that is missing, truncated, corrupt or describes other tables.
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// <dir>/eig_k<k>_n<N>.bin
std::string cache_path(const std::string& dir, int k, std::size_t N);

/// Writes the eigenforms (all of weight k, tables of length N) atomically. Layout:
/// tag, k, N, ordering key, form count, then per form the optional norm and L-value
/// and the N + 1 table entries as little-endian binary64, then an FNV-1a checksum.
void cache_store(const std::string& path, const std::vector<qarith::HeckeEigenform>& forms);

/// Reads and validates a cache file against the expected weight and length; tables
/// come back bit-identical. Throws CacheError on any mismatch.
std::vector<qarith::HeckeEigenform> cache_load(const std::string& path, int k, std::size_t N);

}  // namespace scslab::cli
