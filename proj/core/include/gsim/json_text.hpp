#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace gsim {

using Json = nlohmann::json;

/// Serializes with sorted keys and every floating-point number printed with
/// 17 significant digits ("%.17g"), which round-trips doubles bit-exactly.
std::string dump_json(const Json& value, int indent = -1);

/// Parses a file, rethrowing parse errors with the path and byte offset.
Json read_json_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gsim
