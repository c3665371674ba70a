#include "llc/csv.hpp"

#include <algorithm>

namespace llc {

CsvReader::CsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw FileError("cannot open " + path.string());
}

bool CsvReader::read_line() {
  if (!std::getline(in_, line_)) return false;
  ++line_number_;
  if (!line_.empty() && line_.back() == '\r') line_.pop_back();
  max_line_bytes_ = std::max(max_line_bytes_, line_.size());
  return true;
}

void split_csv_line(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void CsvReader::expect_header(const std::vector<std::string>& required,
                              const std::vector<std::string>& optional_tail) {
  if (!read_line()) fail("missing header row");
  std::vector<std::string_view> fields;
  split_csv_line(line_, fields);
  if (fields.size() < required.size()) {
    fail("header has " + std::to_string(fields.size()) + " columns, expected at least " +
         std::to_string(required.size()));
  }
  for (std::size_t i = 0; i < required.size(); ++i) {
    if (fields[i] != required[i]) {
      fail("header column " + std::to_string(i + 1) + " is '" + std::string(fields[i]) +
           "', expected '" + required[i] + "'");
    }
  }
  for (std::size_t i = required.size(); i < fields.size(); ++i) {
    std::size_t j = i - required.size();
    if (j >= optional_tail.size() || fields[i] != optional_tail[j]) {
      fail("unexpected header column '" + std::string(fields[i]) + "'");
    }
  }
  header_.clear();
  for (auto f : fields) header_.emplace_back(f);
}

bool CsvReader::has_column(std::string_view name) const {
  return std::find(header_.begin(), header_.end(), name) != header_.end();
}

bool CsvReader::next(std::vector<std::string_view>& fields) {
  while (read_line()) {
    if (line_.empty()) continue;
    split_csv_line(line_, fields);
    ++rows_read_;
    return true;
  }
  return false;
}

void CsvReader::fail(const std::string& what) const {
  throw ValidationError(path_.string() + ":" + std::to_string(line_number_) + ": " + what);
}

bool parse_double_field(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int_field(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw WriteError("cannot open " + path.string() + " for writing");
}

CsvWriter::~CsvWriter() {
  if (!closed_) {
    out_.flush();
  }
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.put(',');
    out_.write(fields[i].data(), static_cast<std::streamsize>(fields[i].size()));
  }
  out_.put('\n');
  if (!out_) throw WriteError("write failed for " + path_.string());
}

void CsvWriter::raw_line(std::string_view line) {
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.put('\n');
  if (!out_) throw WriteError("write failed for " + path_.string());
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw WriteError("write failed for " + path_.string());
  out_.close();
  closed_ = true;
}

}  // namespace llc
