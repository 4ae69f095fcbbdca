#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tennis::ingest {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name, -1 when absent.
  int column(std::string_view name) const;
};

// RFC 4180-style reader: quoted fields, embedded commas/quotes/newlines,
// CRLF endings, optional UTF-8 BOM. Throws EmptyInputError when the stream
// has no header row.
CsvTable read_csv(std::istream& in);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace tennis::ingest
