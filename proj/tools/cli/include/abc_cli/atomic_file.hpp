#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string_view>

namespace abc::cli {

// Writes to a sibling temporary, flushes it to disk and renames it over
// `target`. Readers see either the previous file or the complete new one.
void write_atomically(const std::filesystem::path& target,
                      const std::function<void(std::ostream&)>& produce);

void write_atomically(const std::filesystem::path& target, std::string_view contents);

}  // namespace abc::cli
