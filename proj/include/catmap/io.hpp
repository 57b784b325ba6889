#ifndef CATMAP_IO_HPP
#define CATMAP_IO_HPP

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "catmap/errors.hpp"

namespace catmap {

/// FNV-1a 64-bit, used to stamp outputs with the resolved config.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(const std::string& s) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << fnv1a(s);
    return os.str();
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

/// RFC 4180 CSV writer; the optional timestamp comment line is the
/// only run-dependent content.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& config_hash,
              const std::string& timestamp = "") : out_(path) {
        if (!out_) throw ConfigError("cannot open output file " + path);
        if (!timestamp.empty()) out_ << "# generated " << timestamp << "\r\n";
        out_ << "# config " << config_hash << "\r\n";
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_escape(fields[i]);
        }
        out_ << "\r\n";
    }

  private:
    std::ofstream out_;
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string fmt(std::int64_t v) { return std::to_string(v); }

} // namespace catmap

#endif
