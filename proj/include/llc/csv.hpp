#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "llc/common.hpp"

namespace llc {

// Line-oriented reader for the comma-delimited formats this tool consumes.
// UTF-8, mandatory header row, LF or CRLF. Fields are views into an internal
// line buffer, valid until the next call; only one row is buffered at a time.
class CsvReader {
public:
  explicit CsvReader(const std::filesystem::path& path);

  // Validates the header against the expected column names. When
  // optional_tail columns are given, the file header may include any prefix
  // of them after the required ones.
  void expect_header(const std::vector<std::string>& required,
                     const std::vector<std::string>& optional_tail = {});

  std::size_t column_count() const { return header_.size(); }
  bool has_column(std::string_view name) const;

  // Reads the next data row; false at end of file. Blank lines are skipped.
  bool next(std::vector<std::string_view>& fields);

  // 1-based line number of the row most recently returned (header is line 1).
  std::uint64_t line_number() const { return line_number_; }
  std::uint64_t rows_read() const { return rows_read_; }

  // Largest line buffered so far; bounds the reader's working memory.
  std::size_t max_buffered_bytes() const { return max_line_bytes_; }

  const std::filesystem::path& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const;

private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::vector<std::string> header_;
  std::uint64_t line_number_ = 0;
  std::uint64_t rows_read_ = 0;
  std::size_t max_line_bytes_ = 0;

  bool read_line();
};

void split_csv_line(std::string_view line, std::vector<std::string_view>& out);

// Strict numeric field parsers; the whole field must be consumed.
bool parse_double_field(std::string_view s, double& out);
bool parse_int_field(std::string_view s, std::int64_t& out);

// Buffered text writer for output artifacts. Throws WriteError on failure.
class CsvWriter {
public:
  explicit CsvWriter(const std::filesystem::path& path);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& fields);
  void raw_line(std::string_view line);
  void close();

private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool closed_ = false;
};

}  // namespace llc
