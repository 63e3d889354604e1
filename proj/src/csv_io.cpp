#include "cmt/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <string_view>

#include "cmt/error.hpp"

namespace cmt {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_numbers;
};

Table read_table(const std::string& path) {
    std::ifstream in(path);
    CMT_REQUIRE(in.good(), ErrorCode::IoError, "cannot open '" + path + "'");
    Table table;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string_view v = trim(line);
        if (v.empty() || v.front() == '#') continue;
        std::vector<std::string> cells;
        for (auto cell : split(v)) cells.emplace_back(cell);
        if (table.header.empty()) {
            table.header = std::move(cells);
        } else {
            table.rows.push_back(std::move(cells));
            table.line_numbers.push_back(number);
        }
    }
    CMT_REQUIRE(!table.header.empty(), ErrorCode::ParseError, "'" + path + "' has no header row");
    return table;
}

void expect_header(const Table& t, const std::vector<std::string>& names, const std::string& path,
                   std::size_t optional_extra = 0) {
    bool ok = t.header.size() >= names.size() && t.header.size() <= names.size() + optional_extra;
    for (std::size_t i = 0; ok && i < names.size(); ++i) ok = t.header[i] == names[i];
    std::string expected;
    for (const auto& n : names) expected += (expected.empty() ? "" : ",") + n;
    CMT_REQUIRE(ok, ErrorCode::ParseError, "'" + path + "': expected header '" + expected + "'");
}

double number(const std::string& cell, const std::string& path, int line) {
    double value = 0.0;
    const char* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    CMT_REQUIRE(ec == std::errc{} && ptr == end, ErrorCode::ParseError,
                "'" + path + "' line " + std::to_string(line) + ": bad number '" + cell + "'");
    return value;
}

std::vector<CurvePillar> read_pillars(const std::string& path, const char* value_name) {
    const Table t = read_table(path);
    expect_header(t, {"t", value_name}, path);
    std::vector<CurvePillar> pillars;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        CMT_REQUIRE(t.rows[r].size() == 2, ErrorCode::ParseError,
                    "'" + path + "' line " + std::to_string(t.line_numbers[r]) + ": expected 2 columns");
        pillars.push_back({number(t.rows[r][0], path, t.line_numbers[r]), number(t.rows[r][1], path, t.line_numbers[r])});
    }
    return pillars;
}

}  // namespace

DiscountCurve load_discount_csv(const std::string& path, bool allow_extrapolation) {
    return DiscountCurve(read_pillars(path, "df"), allow_extrapolation);
}

HazardCurve load_hazard_csv(const std::string& path, bool allow_extrapolation) {
    return HazardCurve(read_pillars(path, "lambda"), allow_extrapolation);
}

std::vector<BondQuote> load_bond_quotes_csv(const std::string& path) {
    const Table t = read_table(path);
    expect_header(t, {"maturity", "coupon", "frequency", "price"}, path, 1);
    const bool has_type = t.header.size() == 5;
    CMT_REQUIRE(!has_type || t.header[4] == "type", ErrorCode::ParseError,
                "'" + path + "': optional fifth column must be 'type'");
    std::vector<BondQuote> quotes;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const int line = t.line_numbers[r];
        CMT_REQUIRE(row.size() == t.header.size(), ErrorCode::ParseError,
                    "'" + path + "' line " + std::to_string(line) + ": wrong column count");
        BondQuote q{};
        q.maturity = number(row[0], path, line);
        q.coupon_rate = number(row[1], path, line);
        const double freq = number(row[2], path, line);
        CMT_REQUIRE(freq >= 1.0 && freq == static_cast<int>(freq), ErrorCode::ParseError,
                    "'" + path + "' line " + std::to_string(line) + ": frequency must be a positive integer");
        q.frequency = static_cast<int>(freq);
        q.price = number(row[3], path, line);
        if (has_type) {
            CMT_REQUIRE(row[4] == "clean" || row[4] == "dirty", ErrorCode::ParseError,
                        "'" + path + "' line " + std::to_string(line) + ": type must be clean or dirty");
            q.price_type = row[4] == "clean" ? PriceType::Clean : PriceType::Dirty;
        }
        quotes.push_back(q);
    }
    return quotes;
}

}  // namespace cmt
