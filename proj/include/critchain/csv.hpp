#pragma once
// critchain -- deterministic CSV output.
//
// Layout: '#'-prefixed "key = value" metadata lines (sorted by key), one
// header row, then data rows.  Every floating-point cell is rendered with
// '%.16e' (17 significant digits) so files are bitwise reproducible across
// runs and job counts.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "critchain/errors.hpp"

namespace critchain::csv {

/// 17-significant-digit scientific rendering used for every numeric cell.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return std::string(buf);
}

inline std::string fmt(int v) { return std::to_string(v); }

class Writer {
public:
    void metadata(const std::string& key, const std::string& value) { meta_[key] = value; }
    void metadata(const std::string& key, double value) { meta_[key] = fmt(value); }
    void metadata(const std::string& key, int value) { meta_[key] = std::to_string(value); }

    void header(const std::vector<std::string>& cols) {
        std::ostringstream os;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) os << ',';
            os << cols[i];
        }
        header_ = os.str();
    }

    void row(const std::string& line) { rows_.push_back(line); }
    void rows(const std::vector<std::string>& lines) {
        rows_.insert(rows_.end(), lines.begin(), lines.end());
    }

    std::string str() const {
        std::ostringstream os;
        for (const auto& [k, v] : meta_) os << "# " << k << " = " << v << '\n';
        if (!header_.empty()) os << header_ << '\n';
        for (const auto& r : rows_) os << r << '\n';
        return os.str();
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("csv: cannot open " + path + " for writing");
        out << str();
        if (!out) throw ConfigError("csv: write failed for " + path);
    }

private:
    std::map<std::string, std::string> meta_;
    std::string header_;
    std::vector<std::string> rows_;
};

/// Joins pre-formatted cells into one row.
inline std::string join(const std::vector<std::string>& cells) {
    std::ostringstream os;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    return os.str();
}

}  // namespace critchain::csv
