// csv.hpp - the tidy scenario table shared by the runner, the CLI and the
// plotting scripts.
//
// Columns: scenario, seed, N, M, g, Jprime, Delta, kappa, gamma_P, gamma_out,
// gamma_sp, gamma_deph, deltaJ, observable_name, t_or_none, value.
// The seed column holds the integer seed of a realisation, or "mean" /
// "stderr" for ensemble aggregates. t_or_none is "none" for time-independent
// observables. Numbers use the shortest round-trip decimal form.

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace excitrans {

inline constexpr std::array<std::string_view, 16> kCsvColumns = {
    "scenario", "seed",     "N",         "M",          "g",      "Jprime",         "Delta",     "kappa",
    "gamma_P",  "gamma_out", "gamma_sp", "gamma_deph", "deltaJ", "observable_name", "t_or_none", "value"};

struct CsvRow {
    std::string scenario;
    std::string seed = "0";
    int N = 0;
    int M = 0;
    double g = 0.0;
    double Jprime = 0.0;
    double Delta = 0.0;
    double kappa = 0.0;
    double gamma_P = 0.0;
    double gamma_out = 0.0;
    double gamma_sp = 0.0;
    double gamma_deph = 0.0;
    double deltaJ = 0.0;
    std::string observable;
    std::optional<double> t;
    double value = 0.0;

    bool operator==(const CsvRow&) const = default;
};

class CsvSchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to the same double; "nan", "inf", "-inf".
[[nodiscard]] std::string format_number(double x);
[[nodiscard]] double parse_number(std::string_view text);

[[nodiscard]] std::string csv_header();
[[nodiscard]] std::string csv_line(const CsvRow& row);
void write_csv(std::ostream& out, std::span<const CsvRow> rows);

/// Parses a table written by write_csv. Throws CsvSchemaError naming the
/// first missing or unexpected column, or the offending line.
[[nodiscard]] std::vector<CsvRow> read_csv(std::istream& in);

}  // namespace excitrans
