#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace thermalab {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

/// FNV-1a 64-bit hash, rendered as fixed-width hex.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t value);

std::string iso8601_utc_now();

/// CSV emitter with a mandatory header row; doubles get the shortest
/// round-trip form so identical runs produce identical bytes.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    int rows_written() const { return rows_; }
    static std::string cell(double x) { return format_double(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(long long x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "1" : "0"; }

private:
    std::ofstream out_;
    std::size_t columns_;
    int rows_ = 0;
};

} // namespace thermalab
