#pragma once

#include <filesystem>
#include <string>

#include "labelkit/domain.hpp"

namespace labelkit {

struct IoError : Error {
  using Error::Error;
};

std::string read_text_file(const std::filesystem::path& path);

// Writes via a sibling temp file and renames into place, so readers never
// observe a partial file.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

// True when `text` is well-formed UTF-8.
bool is_valid_utf8(std::string_view text);

}  // namespace labelkit
