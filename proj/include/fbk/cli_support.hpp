#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbk/errors.hpp"
#include "fbk/family.hpp"

namespace fbk {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit content hash; stable across platforms and runs.
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), errc::parse_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return "fnv1a64:" + fnv1a_hex(ss.str());
}

// t-grid specs: "log:a..b:n", "lin:a..b:n", or a comma list that may contain
// the literal "central".
inline std::vector<FiberId> t_grid_parse(const std::string& spec) {
    auto parse_double = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            require(pos == s.size(), errc::grid_spec_error, "bad number '" + s + "'");
            return v;
        } catch (const std::exception&) {
            raise(errc::grid_spec_error, "bad number '" + s + "' in t-grid spec");
        }
    };
    std::vector<FiberId> out;
    if (spec.rfind("log:", 0) == 0 || spec.rfind("lin:", 0) == 0) {
        bool logscale = spec[1] == 'o';
        std::string body = spec.substr(4);
        auto dots = body.find("..");
        auto colon = body.rfind(':');
        require(dots != std::string::npos && colon != std::string::npos && colon > dots,
                errc::grid_spec_error, "expected " + spec.substr(0, 4) + "a..b:n");
        double a = parse_double(body.substr(0, dots));
        double b = parse_double(body.substr(dots + 2, colon - dots - 2));
        long n = std::strtol(body.c_str() + colon + 1, nullptr, 10);
        require(n >= 2, errc::grid_spec_error, "grid needs at least 2 points");
        require(a < b, errc::grid_spec_error, "grid endpoints reversed");
        if (logscale) require(a > 0, errc::grid_spec_error, "log grid needs positive endpoints");
        for (long i = 0; i < n; ++i) {
            double s = static_cast<double>(i) / static_cast<double>(n - 1);
            double t = logscale ? a * std::pow(b / a, s) : a + (b - a) * s;
            out.push_back(FiberId::at(t));
        }
        return out;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "central") {
            out.push_back(FiberId::central());
        } else {
            double t = parse_double(item);
            require(t != 0.0, errc::grid_spec_error, "t = 0 is spelled 'central'");
            out.push_back(FiberId::at(t));
        }
    }
    require(!out.empty(), errc::grid_spec_error, "empty t-grid spec");
    return out;
}

// m specs: "a..b" or a comma list
inline std::vector<int> m_spec_parse(const std::string& spec) {
    std::vector<int> out;
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        int a = std::atoi(spec.substr(0, dots).c_str());
        int b = std::atoi(spec.substr(dots + 2).c_str());
        require(a >= 0 && b >= a, errc::grid_spec_error, "bad m range '" + spec + "'");
        for (int m = a; m <= b; ++m) out.push_back(m);
        return out;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int m = std::atoi(item.c_str());
        require(m >= 0 && (m > 0 || item == "0"), errc::grid_spec_error,
                "bad m entry '" + item + "'");
        out.push_back(m);
    }
    require(!out.empty(), errc::grid_spec_error, "empty m spec");
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Every output embeds its manifest; identical manifests reproduce
// bit-identical outputs (fixed summation orders, no clocks, no randomness).
struct RunManifest {
    nlohmann::json fields;

    RunManifest(const std::string& subcommand, const std::string& family_path) {
        fields["tool"] = "fbk";
        fields["version"] = kToolVersion;
        fields["subcommand"] = subcommand;
        if (!family_path.empty()) {
            fields["family"] = family_path;
            fields["family_hash"] = file_hash(family_path);
        }
    }

    void set(const std::string& key, const nlohmann::json& value) { fields[key] = value; }

    std::string header_line() const { return "# manifest: " + fields.dump(); }
};

// CSV table with a manifest header; cells are preformatted strings.
struct OutputTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    std::string to_csv(const RunManifest& manifest) const {
        std::string out = manifest.header_line() + "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out += (i ? "," : "") + columns[i];
        out += "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
            out += "\n";
        }
        return out;
    }

    std::string to_json(const RunManifest& manifest) const {
        nlohmann::json j;
        j["manifest"] = manifest.fields;
        j["columns"] = columns;
        j["rows"] = nlohmann::json::array();
        for (const auto& row : rows) j["rows"].push_back(row);
        return j.dump(2) + "\n";
    }
};

}  // namespace fbk
