#pragma once
// Result emission: CSV files whose first line is a '#'-prefixed JSON config
// echo (schema tag, command, parameters, seed), followed by a header row and
// data rows; and newline-delimited JSON for excursion ledgers.

#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lamplab {

using json = nlohmann::json;

inline constexpr const char* kCsvSchema = "lamplab.csv.v1";

inline std::string format_cell(double v) {
  std::ostringstream ss;
  ss << std::setprecision(12) << v;
  return ss.str();
}
inline std::string format_cell(const std::string& v) { return v; }
inline std::string format_cell(const char* v) { return v; }
template <typename T>
std::string format_cell(T v) {
  return std::to_string(v);
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, json config, std::vector<std::string> columns)
      : os_(&os), ncols_(columns.size()) {
    config["schema"] = kCsvSchema;
    *os_ << "# " << config.dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      *os_ << (i ? "," : "") << columns[i];
    *os_ << "\n";
  }

  void row(std::initializer_list<std::string> cells) {
    if (cells.size() != ncols_)
      throw std::invalid_argument("CsvWriter: wrong cell count");
    std::size_t i = 0;
    for (const auto& c : cells) *os_ << (i++ ? "," : "") << c;
    *os_ << "\n";
  }

  template <typename... Ts>
  void cells(Ts&&... vals) {
    row({format_cell(std::forward<Ts>(vals))...});
  }

 private:
  std::ostream* os_;
  std::size_t ncols_;
};

// parse the config line back out of a results file (round-trip checks)
inline json read_csv_config(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw std::runtime_error("read_csv_config: missing config header line");
  return json::parse(line.substr(2));
}

inline void write_jsonl(std::ostream& os, const json& record) {
  os << record.dump() << "\n";
}

}  // namespace lamplab
