#include "crowdkb/csv.hpp"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

namespace crowdkb::csv {
namespace {

TEST(CsvTest, QuotedFieldsWithSeparatorsAndNewlines) {
  auto rows = read_all("a,b,c\n\"x,1\",\"say \"\"hi\"\"\",\"two\nlines\"\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].cells, (Row{"x,1", "say \"hi\"", "two\nlines"}));
  EXPECT_EQ(rows[1].line, 2u);
}

TEST(CsvTest, CrlfAndBomAndBlankLines) {
  auto rows = read_all("\xEF\xBB\xBFid,name\r\n\r\n1,a\r\n2,\r\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].cells, (Row{"id", "name"}));
  EXPECT_EQ(rows[2].cells, (Row{"2", ""}));
  EXPECT_EQ(rows[2].line, 4u);
}

TEST(CsvTest, UnterminatedQuoteIsAnError) {
  try {
    read_all("a\n\"open");
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedRow);
  }
}

TEST(CsvTest, WriteThenReadRestoresRandomCells) {
  std::mt19937 rng(17);
  const std::string alphabet = "ab ,\"\n\r;\\x\xC3\xA9";
  for (int iter = 0; iter < 200; ++iter) {
    Row row;
    int width = 1 + static_cast<int>(rng() % 5);
    for (int c = 0; c < width; ++c) {
      std::string cell;
      int len = static_cast<int>(rng() % 8);
      for (int i = 0; i < len; ++i) cell.push_back(alphabet[rng() % alphabet.size()]);
      row.push_back(cell);
    }
    // A lone empty cell is indistinguishable from a blank line.
    if (row.size() == 1 && row[0].empty()) row[0] = "z";
    std::ostringstream os;
    write_row(os, row);
    auto back = read_all(os.str());
    ASSERT_EQ(back.size(), 1u) << os.str();
    EXPECT_EQ(back[0].cells, row);
  }
}

}  // namespace
}  // namespace crowdkb::csv
