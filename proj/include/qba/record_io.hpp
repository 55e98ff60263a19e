// Line-delimited record files: one flat JSON object per round with fields
// round, basisA/basisB/basisC and outA/outB/outC/outD. Writing is done with
// fixed formatting so identical runs produce byte-identical files.
#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qba/types.hpp"

namespace qba {

struct RecordParseError : std::runtime_error {
  std::size_t line_no;
  RecordParseError(std::size_t line, const std::string& what)
      : std::runtime_error("record file line " + std::to_string(line) + ": " +
                           what),
        line_no(line) {}
};

inline std::string format_record_line(const MeasurementRecord& rec) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "{\"round\":%llu,\"basisA\":\"%c\",\"basisB\":\"%c\","
                "\"basisC\":\"%c\",\"outA\":%d,\"outB\":%d,\"outC\":%d,"
                "\"outD\":%d}",
                static_cast<unsigned long long>(rec.round),
                basis_name(rec.basis_of_party(Party::A)),
                basis_name(rec.basis_of_party(Party::B)),
                basis_name(rec.basis_of_party(Party::C)),
                rec.outcome_of(Qubit::A), rec.outcome_of(Qubit::B),
                rec.outcome_of(Qubit::C), rec.outcome_of(Qubit::D));
  return buf;
}

inline void write_records(std::ostream& out,
                          std::span<const MeasurementRecord> records) {
  for (const auto& rec : records) {
    out << format_record_line(rec) << '\n';
  }
}

inline void write_record_file(const std::string& path,
                              std::span<const MeasurementRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open record file for writing: " + path);
  }
  write_records(out, records);
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing record file: " + path);
  }
}

namespace detail {

inline MeasurementRecord parse_record_line(const std::string& line,
                                           std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw RecordParseError(line_no, e.what());
  }
  if (!j.is_object()) {
    throw RecordParseError(line_no, "expected a JSON object");
  }
  MeasurementRecord rec;
  try {
    if (!j.at("round").is_number_unsigned()) {
      throw RecordParseError(line_no, "round must be a non-negative integer");
    }
    rec.round = j.at("round").get<std::uint64_t>();
    const auto get_basis = [&](const char* field) {
      const auto s = j.at(field).get<std::string>();
      if (s != "Z" && s != "X") {
        throw RecordParseError(line_no,
                               std::string(field) + " must be \"Z\" or \"X\"");
      }
      return basis_from_name(s[0]);
    };
    rec.basis[0] = get_basis("basisA");
    rec.basis[1] = get_basis("basisB");
    rec.basis[2] = get_basis("basisC");
    const auto get_bit = [&](const char* field) {
      if (!j.at(field).is_number_integer()) {
        throw RecordParseError(line_no, std::string(field) + " must be 0 or 1");
      }
      const auto v = j.at(field).get<int>();
      if (v != 0 && v != 1) {
        throw RecordParseError(line_no, std::string(field) + " must be 0 or 1");
      }
      return static_cast<std::int8_t>(v);
    };
    rec.outcome[0] = get_bit("outA");
    rec.outcome[1] = get_bit("outB");
    rec.outcome[2] = get_bit("outC");
    rec.outcome[3] = get_bit("outD");
  } catch (const nlohmann::json::exception& e) {
    throw RecordParseError(line_no, e.what());
  }
  return rec;
}

}  // namespace detail

inline std::vector<MeasurementRecord> read_records(std::istream& in) {
  std::vector<MeasurementRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool have_prev = false;
  std::uint64_t prev_round = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    MeasurementRecord rec = detail::parse_record_line(line, line_no);
    if (have_prev && rec.round <= prev_round) {
      throw RecordParseError(line_no,
                             "round indices must be strictly increasing");
    }
    prev_round = rec.round;
    have_prev = true;
    records.push_back(rec);
  }
  return records;
}

inline std::vector<MeasurementRecord> read_record_file(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open record file: " + path);
  }
  return read_records(in);
}

}  // namespace qba
