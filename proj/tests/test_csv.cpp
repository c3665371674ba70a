#include <doctest.h>

#include "llc/csv.hpp"
#include "support.hpp"

using namespace llc;
using testsupport::ScratchDir;
using testsupport::read_file;
using testsupport::write_file;

TEST_CASE("split_csv_line keeps empty fields") {
  std::vector<std::string_view> fields;
  split_csv_line("a,b,c", fields);
  REQUIRE(fields.size() == 3);
  CHECK(fields[1] == "b");
  split_csv_line("a,,c", fields);
  REQUIRE(fields.size() == 3);
  CHECK(fields[1] == "");
  split_csv_line("", fields);
  REQUIRE(fields.size() == 1);
  CHECK(fields[0] == "");
}

TEST_CASE("reader validates headers and reports row numbers") {
  ScratchDir dir("csv_reader");
  const auto path = dir / "t.csv";
  write_file(path, "id,count\r\nA,1\r\n\r\nB,2\n");

  CsvReader reader(path);
  reader.expect_header({"id", "count"});
  std::vector<std::string_view> fields;
  REQUIRE(reader.next(fields));
  CHECK(fields[0] == "A");  // carriage returns stripped
  CHECK(fields[1] == "1");
  REQUIRE(reader.next(fields));  // blank line skipped
  CHECK(fields[0] == "B");
  CHECK(reader.line_number() == 4);
  CHECK_FALSE(reader.next(fields));
  CHECK(reader.rows_read() == 2);

  CsvReader bad(path);
  CHECK_THROWS_WITH_AS(bad.expect_header({"id", "n"}),
                       doctest::Contains("header column 2"), ValidationError);
}

TEST_CASE("reader accepts declared optional tail columns only") {
  ScratchDir dir("csv_tail");
  const auto with_tail = dir / "tail.csv";
  write_file(with_tail, "id,count,extra\nA,1,x\n");
  CsvReader ok(with_tail);
  ok.expect_header({"id", "count"}, {"extra"});
  CHECK(ok.column_count() == 3);

  const auto wrong = dir / "wrong.csv";
  write_file(wrong, "id,count,bogus\n");
  CsvReader bad(wrong);
  CHECK_THROWS_AS(bad.expect_header({"id", "count"}, {"extra"}), ValidationError);
}

TEST_CASE("reader errors carry file and line context") {
  ScratchDir dir("csv_fail");
  const auto path = dir / "t.csv";
  write_file(path, "id\nA\n");
  CsvReader reader(path);
  reader.expect_header({"id"});
  std::vector<std::string_view> fields;
  reader.next(fields);
  try {
    reader.fail("broken");
    FAIL("unreachable");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find(":2: broken") != std::string::npos);
    CHECK(what.find("t.csv") != std::string::npos);
  }
  CHECK_THROWS_AS(CsvReader(dir / "missing.csv"), FileError);
}

TEST_CASE("numeric field parsing requires full consumption") {
  double d = 0;
  CHECK(parse_double_field("1.5", d));
  CHECK(d == 1.5);
  CHECK(parse_double_field("-0.002", d));
  CHECK_FALSE(parse_double_field("1.5x", d));
  CHECK_FALSE(parse_double_field("", d));
  CHECK_FALSE(parse_double_field(" 1", d));
  std::int64_t n = 0;
  CHECK(parse_int_field("42", n));
  CHECK(n == 42);
  CHECK(parse_int_field("-7", n));
  CHECK_FALSE(parse_int_field("4.2", n));
  CHECK_FALSE(parse_int_field("7 ", n));
  CHECK_FALSE(parse_int_field("", n));
}

TEST_CASE("writer emits rows verbatim with unix newlines") {
  ScratchDir dir("csv_writer");
  const auto path = dir / "out.csv";
  {
    CsvWriter out(path);
    out.raw_line("id,count");
    out.row({"A", "1"});
    out.close();
  }
  CHECK(read_file(path) == "id,count\nA,1\n");
  CHECK_THROWS_AS(CsvWriter(dir.path() / "no_such_dir" / "x.csv"), WriteError);
}
