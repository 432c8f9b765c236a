#pragma once

// Bundled per-mote load dataset (data/mote_table1.csv). Values are kept as the
// original text tokens so re-emitted rows match the file byte for byte.

#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsntrack/config.hpp"
#include "wsntrack/sha256.hpp"

namespace wsntrack {

inline constexpr const char* kMoteHeader = "index,db,tb_t12,tb_t40000,nab";
inline constexpr const char* kMoteSha256 = "1e549835137d618dceab2e99ecd4b079caf3afa5b28fba0594788c854a89b79d";
inline constexpr const char* kMoteSeries[] = {"db", "tb_t12", "tb_t40000", "nab"};

struct MoteDatasetRow {
  int index = 0;
  std::vector<std::string> text;  // db, tb_t12, tb_t40000, nab as written
  std::vector<double> values;
};

inline std::vector<MoteDatasetRow> parse_mote_table(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || line != kMoteHeader) throw std::runtime_error("mote table: unexpected header");
  std::vector<MoteDatasetRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != 5) throw std::runtime_error("mote table: expected 5 columns: " + line);
    MoteDatasetRow r;
    r.index = detail::parse_int<int>(cells[0]);
    for (std::size_t i = 1; i < 5; ++i) {
      r.text.emplace_back(cells[i]);
      r.values.push_back(detail::parse_double(cells[i]));
    }
    rows.push_back(std::move(r));
  }
  if (rows.size() != 7) throw std::runtime_error("mote table: expected 7 rows");
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].index != static_cast<int>(i) + 1) throw std::runtime_error("mote table: rows out of order");
  return rows;
}

// DB (column 0) is no larger than any other column in every row.
inline bool db_dominates(const std::vector<MoteDatasetRow>& rows) {
  for (const auto& r : rows)
    for (std::size_t c = 1; c < r.values.size(); ++c)
      if (r.values[0] > r.values[c]) return false;
  return true;
}

inline void write_mote_load(std::ostream& os, const std::vector<MoteDatasetRow>& rows) {
  os << kMoteHeader << '\n';
  for (const auto& r : rows) {
    os << r.index;
    for (const auto& t : r.text) os << ',' << t;
    os << '\n';
  }
}

inline void write_mote_long(std::ostream& os, const std::vector<MoteDatasetRow>& rows) {
  os << "index,series,load\n";
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.text.size(); ++c) os << r.index << ',' << kMoteSeries[c] << ',' << r.text[c] << '\n';
}

}  // namespace wsntrack
