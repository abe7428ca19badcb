#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rationlog {

using Json = nlohmann::json;

// Calls `fn` for every non-blank line parsed as JSON. Throws Error(kIo) if the
// file cannot be opened and Error(kSchema) on a line that is not valid JSON.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&)>& fn);

std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& value);

// Field accessors that raise Error(kSchema) naming the missing/mistyped key.
std::string json_string(const Json& obj, const char* key);
long long json_int(const Json& obj, const char* key);
double json_number(const Json& obj, const char* key);

}  // namespace rationlog
