#pragma once

#include <string>

namespace moa {

// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(const std::string& data);

// First eight hex characters — the report-id form.
std::string short_hash(const std::string& data);

}  // namespace moa
