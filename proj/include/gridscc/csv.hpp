#pragma once

// Minimal comma-separated reader: no quoting, header row required.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gridscc/error.hpp"

namespace gridscc::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline double parse_double(std::string_view field, std::string_view context) {
  double v = 0.0;
  // from_chars rejects a leading '+'
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error(ErrorCode::ParseError, std::string(context) + ": not a number '" + std::string(field) + "'");
  return v;
}

inline std::int64_t parse_int(std::string_view field, std::string_view context) {
  std::int64_t v = 0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error(ErrorCode::ParseError, std::string(context) + ": not an integer '" + std::string(field) + "'");
  return v;
}

class Table {
 public:
  static Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(std::move(text), path.string());
  }

  static Table parse(std::string text, std::string source = "<memory>") {
    Table t;
    t.source_ = std::move(source);
    // rows hold views into this buffer, so it must not move with the Table
    t.text_ = std::make_unique<std::string>(std::move(text));
    std::string_view all(*t.text_);
    // UTF-8 BOM
    if (all.size() >= 3 && all.substr(0, 3) == "\xEF\xBB\xBF") all.remove_prefix(3);
    bool header_done = false;
    std::size_t line_no = 0;
    while (!all.empty()) {
      auto nl = all.find('\n');
      auto line = all.substr(0, nl);
      all.remove_prefix(nl == std::string_view::npos ? all.size() : nl + 1);
      ++line_no;
      if (trim(line).empty()) continue;
      auto fields = split(line);
      if (!header_done) {
        for (std::size_t i = 0; i < fields.size(); ++i) t.columns_.emplace(std::string(fields[i]), i);
        t.width_ = fields.size();
        header_done = true;
        continue;
      }
      if (fields.size() != t.width_)
        throw Error(ErrorCode::ParseError,
                    t.source_ + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.width_) +
                        " fields, got " + std::to_string(fields.size()));
      t.line_numbers_.push_back(line_no);
      t.rows_.push_back(std::move(fields));
    }
    if (!header_done) throw Error(ErrorCode::ParseError, t.source_ + ": empty file");
    return t;
  }

  /// Column index; throws MissingColumn.
  std::size_t column(std::string_view name) const {
    auto it = columns_.find(std::string(name));
    if (it == columns_.end()) throw Error(ErrorCode::MissingColumn, source_ + ": column '" + std::string(name) + "'");
    return it->second;
  }
  bool has_column(std::string_view name) const { return columns_.count(std::string(name)) != 0; }

  std::size_t size() const { return rows_.size(); }
  std::string_view at(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  std::string where(std::size_t row) const { return source_ + ":" + std::to_string(line_numbers_[row]); }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::unique_ptr<std::string> text_;
  std::unordered_map<std::string, std::size_t> columns_;
  std::size_t width_ = 0;
  std::vector<std::vector<std::string_view>> rows_;
  std::vector<std::size_t> line_numbers_;
};

}  // namespace gridscc::csv
