#pragma once

// Minimal RFC 4180 reader/writer: comma separator, double-quote quoting,
// doubled quotes inside quoted fields, CRLF or LF row terminators, embedded
// newlines allowed inside quotes.

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "crowdkb/error.hpp"

namespace crowdkb::csv {

using Row = std::vector<std::string>;

struct Record {
  Row cells;
  std::size_t line = 0;  // 1-based physical line where the row starts
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {
    if (data_.substr(0, 3) == "\xEF\xBB\xBF") data_.remove_prefix(3);
  }

  // Returns false at end of input. Blank lines are skipped.
  bool next(Record& out) {
    for (;;) {
      if (pos_ >= data_.size()) return false;
      out.cells.clear();
      out.line = line_;
      if (data_[pos_] == '\n' || data_[pos_] == '\r') {
        consume_newline();
        continue;
      }
      read_row(out.cells);
      return true;
    }
  }

 private:
  void consume_newline() {
    if (data_[pos_] == '\r') ++pos_;
    if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
    ++line_;
  }

  void read_row(Row& cells) {
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    std::size_t start_line = line_;
    while (pos_ < data_.size()) {
      char c = data_[pos_];
      if (quoted) {
        if (c == '"') {
          if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
            cell.push_back('"');
            pos_ += 2;
          } else {
            quoted = false;
            ++pos_;
          }
        } else {
          if (c == '\n') ++line_;
          cell.push_back(c);
          ++pos_;
        }
        continue;
      }
      if (c == '"' && !was_quoted && cell.empty()) {
        quoted = true;
        was_quoted = true;
        ++pos_;
      } else if (c == ',') {
        cells.push_back(std::move(cell));
        cell.clear();
        was_quoted = false;
        ++pos_;
      } else if (c == '\n' || c == '\r') {
        consume_newline();
        cells.push_back(std::move(cell));
        return;
      } else {
        cell.push_back(c);
        ++pos_;
      }
    }
    if (quoted) {
      throw Error(ErrorCode::MalformedRow,
                  "unterminated quoted field starting on line " +
                      std::to_string(start_line));
    }
    cells.push_back(std::move(cell));
  }

  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline std::vector<Record> read_all(std::string_view data) {
  Reader reader(data);
  std::vector<Record> out;
  Record rec;
  while (reader.next(rec)) out.push_back(rec);
  return out;
}

inline bool needs_quotes(std::string_view cell) {
  if (cell.empty()) return false;
  for (char c : cell) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') return true;
  }
  return cell.front() == ' ' || cell.back() == ' ';
}

inline void write_cell(std::ostream& os, std::string_view cell) {
  if (!needs_quotes(cell)) {
    os << cell;
    return;
  }
  os << '"';
  for (char c : cell) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

inline void write_row(std::ostream& os, const Row& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    write_cell(os, cells[i]);
  }
  os << '\n';
}

}  // namespace crowdkb::csv
