#include "excitrans/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace excitrans {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return {buf.data(), result.ptr};
}

double parse_number(std::string_view text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
        throw CsvSchemaError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::string csv_header() {
    std::string out;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (i) out += ',';
        out += kCsvColumns[i];
    }
    return out;
}

namespace {

void check_field(const std::string& text, const char* column) {
    if (text.find_first_of(",\"\n\r") != std::string::npos) {
        throw CsvSchemaError(std::string("field ") + column + " contains a separator: " + text);
    }
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

int parse_int(std::string_view text) {
    int value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
        throw CsvSchemaError("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::string csv_line(const CsvRow& r) {
    check_field(r.scenario, "scenario");
    check_field(r.seed, "seed");
    check_field(r.observable, "observable_name");
    std::string out;
    out.reserve(160);
    auto add = [&out](const std::string& s) {
        out += s;
        out += ',';
    };
    add(r.scenario);
    add(r.seed);
    add(std::to_string(r.N));
    add(std::to_string(r.M));
    add(format_number(r.g));
    add(format_number(r.Jprime));
    add(format_number(r.Delta));
    add(format_number(r.kappa));
    add(format_number(r.gamma_P));
    add(format_number(r.gamma_out));
    add(format_number(r.gamma_sp));
    add(format_number(r.gamma_deph));
    add(format_number(r.deltaJ));
    add(r.observable);
    add(r.t ? format_number(*r.t) : std::string("none"));
    out += format_number(r.value);
    return out;
}

void write_csv(std::ostream& out, std::span<const CsvRow> rows) {
    out << csv_header() << '\n';
    for (const CsvRow& row : rows) out << csv_line(row) << '\n';
}

std::vector<CsvRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvSchemaError("empty table: missing header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (i >= header.size() || header[i] != kCsvColumns[i]) {
            throw CsvSchemaError("missing column " + std::string(kCsvColumns[i]) + " at position " + std::to_string(i));
        }
    }
    if (header.size() != kCsvColumns.size()) {
        throw CsvSchemaError("unexpected column " + std::string(header[kCsvColumns.size()]));
    }
    std::vector<CsvRow> rows;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != kCsvColumns.size()) {
            throw CsvSchemaError("line " + std::to_string(number) + " has " + std::to_string(f.size()) + " fields");
        }
        CsvRow r;
        r.scenario = f[0];
        r.seed = f[1];
        r.N = parse_int(f[2]);
        r.M = parse_int(f[3]);
        r.g = parse_number(f[4]);
        r.Jprime = parse_number(f[5]);
        r.Delta = parse_number(f[6]);
        r.kappa = parse_number(f[7]);
        r.gamma_P = parse_number(f[8]);
        r.gamma_out = parse_number(f[9]);
        r.gamma_sp = parse_number(f[10]);
        r.gamma_deph = parse_number(f[11]);
        r.deltaJ = parse_number(f[12]);
        r.observable = f[13];
        if (f[14] != "none") r.t = parse_number(f[14]);
        r.value = parse_number(f[15]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace excitrans
