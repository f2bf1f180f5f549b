#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "fadecast/csv.hpp"
#include "fadecast/error.hpp"

using namespace fadecast;

TEST_CASE("csv round trip") {
  CsvTable t;
  t.comments = {"fadecast test", "seed=42", "model_fingerprint=00ff"};
  t.columns = {"a", "b", "name"};
  t.add_row({"1", "2.5", "x"});
  t.add_row({"-3", "1e-9", ""});
  std::stringstream io;
  write_csv(io, t);
  CHECK(io.str() ==
        "# fadecast test\n# seed=42\n# model_fingerprint=00ff\na,b,name\n1,2.5,x\n-3,1e-9,\n");
  const auto back = read_csv(io);
  CHECK(back.comments == t.comments);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(back.meta("seed") == "42");
  CHECK(back.meta("model_fingerprint") == "00ff");
  CHECK(back.meta("absent").empty());
  CHECK(back.number(1, "b") == 1e-9);
  CHECK(back.text(0, "name") == "x");
  CHECK(back.column("name") == 2);
}

TEST_CASE("csv errors") {
  CsvTable t;
  t.columns = {"a", "b"};
  CHECK_THROWS_AS(t.add_row({"1"}), FormatError);
  t.add_row({"1", "oops"});
  CHECK_THROWS_AS(t.column("c"), FormatError);
  CHECK_THROWS_AS(t.number(0, "b"), FormatError);

  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged), FormatError);
  std::istringstream headless("# only a comment\n");
  CHECK_THROWS_AS(read_csv(headless), FormatError);
  CHECK_THROWS_AS(read_csv_file("/nonexistent/file.csv"), FormatError);

  std::istringstream crlf("# c\r\nx,y\r\n1,2\r\n\r\n");
  const auto ok = read_csv(crlf);
  CHECK(ok.columns == std::vector<std::string>{"x", "y"});
  CHECK(ok.number(0, "y") == 2.0);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, 1.7976931348623157e308}) {
    const auto s = format_number(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(100.0) == "100");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
}
