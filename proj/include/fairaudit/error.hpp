#pragma once

#include <stdexcept>
#include <string>

namespace fairaudit {

/// Error raised by ingest, configuration, and audit operations. Messages
/// carry the location of the failure (row/column for tabular input, JSON
/// path for documents, attribute/group for audit steps).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace fairaudit
