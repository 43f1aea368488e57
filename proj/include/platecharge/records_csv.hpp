#pragma once

// Survey record interchange: one CSV row per reading, UTF-8, LF endings.
//
//   platform,mount,position,r_m,run,motor_on,wheels_charged,reading_V,seed
//
// Numbers use the shortest round-trip decimal form, so writing is
// byte-reproducible and reading restores the exact doubles.

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "platecharge/errors.hpp"
#include "platecharge/survey.hpp"

namespace platecharge::csv {

inline constexpr std::string_view kRecordHeader =
    "platform,mount,position,r_m,run,motor_on,wheels_charged,reading_V,seed";

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("could not format number");
    return std::string(buf, end);
}

inline void write_records(std::ostream& out, const std::vector<MeasurementRecord>& records) {
    out << kRecordHeader << '\n';
    for (const auto& m : records) {
        out << to_string(m.platform) << ',' << (m.mount ? to_string(*m.mount) : std::string_view{}) << ','
            << m.position_label << ',' << format_double(m.r) << ',' << m.run << ',' << (m.motor_on ? 1 : 0) << ','
            << (m.wheels_charged ? 1 : 0) << ',' << format_double(m.reading) << ',' << m.seed << '\n';
    }
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <class T>
T parse_number(std::string_view text, std::size_t row, const char* column) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError("row " + std::to_string(row) + ": bad " + column + " '" + std::string(text) + "'", row);
    return value;
}

inline bool parse_flag(std::string_view text, std::size_t row, const char* column) {
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    throw DataError("row " + std::to_string(row) + ": bad " + column + " '" + std::string(text) + "'", row);
}

}  // namespace detail

/// Parses a record CSV. Row numbers in errors are 1-based file line numbers.
inline std::vector<MeasurementRecord> read_records(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty records file: missing header", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRecordHeader) throw DataError("row 1: unexpected header '" + line + "'", 1);

    std::vector<MeasurementRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = detail::split(line);
        if (f.size() != 9)
            throw DataError("row " + std::to_string(row) + ": expected 9 fields, found " + std::to_string(f.size()),
                            row);
        MeasurementRecord m;
        if (f[0] == "robot") m.platform = PlatformKind::Robot;
        else if (f[0] == "handheld") m.platform = PlatformKind::Handheld;
        else throw DataError("row " + std::to_string(row) + ": unknown platform '" + std::string(f[0]) + "'", row);
        if (!f[1].empty()) {
            m.mount = parse_mount(f[1]);
            if (!m.mount)
                throw DataError("row " + std::to_string(row) + ": unknown mount '" + std::string(f[1]) + "'", row);
        }
        if (f[2].empty()) throw DataError("row " + std::to_string(row) + ": empty position label", row);
        m.position_label = std::string(f[2]);
        m.r = detail::parse_number<double>(f[3], row, "r_m");
        m.run = detail::parse_number<int>(f[4], row, "run");
        m.motor_on = detail::parse_flag(f[5], row, "motor_on");
        m.wheels_charged = detail::parse_flag(f[6], row, "wheels_charged");
        m.reading = detail::parse_number<double>(f[7], row, "reading_V");
        m.seed = detail::parse_number<std::uint64_t>(f[8], row, "seed");
        if (!std::isfinite(m.r) || !std::isfinite(m.reading))
            throw DataError("row " + std::to_string(row) + ": non-finite value", row);
        if (m.run < 0) throw DataError("row " + std::to_string(row) + ": negative run index", row);
        records.push_back(std::move(m));
    }
    return records;
}

}  // namespace platecharge::csv
