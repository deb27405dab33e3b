#pragma once

#include <string>
#include <utility>
#include <vector>

namespace steer::zip {

struct Entry {
  std::string name;
  std::string data;
};

/// Build an uncompressed (stored) archive. Entries keep their order and carry
/// a fixed timestamp, so identical inputs give identical bytes.
std::string write(const std::vector<Entry>& entries);

/// Read every file entry of an archive. Handles stored and deflated members
/// and Zip64 size fields as written by numpy.savez; verifies CRC-32.
std::vector<Entry> read(const std::string& archive, const std::string& what = "archive");

}  // namespace steer::zip
