#include "rationlog/jsonl.hpp"

#include <fstream>

#include "rationlog/error.hpp"

namespace rationlog {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Json row;
    try {
      row = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::kSchema,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    fn(row);
  }
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::vector<Json> rows;
  for_each_jsonl(path, [&](const Json& row) { rows.push_back(row); });
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& row : rows) out << row.dump() << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kSchema, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << value.dump(2) << '\n';
}

std::string json_string(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorKind::kSchema, std::string("expected string field '") + key + "'");
  return it->get<std::string>();
}

long long json_int(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer())
    throw Error(ErrorKind::kSchema, std::string("expected integer field '") + key + "'");
  return it->get<long long>();
}

double json_number(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    throw Error(ErrorKind::kSchema, std::string("expected numeric field '") + key + "'");
  return it->get<double>();
}

}  // namespace rationlog
