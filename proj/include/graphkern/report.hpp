#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "graphkern/cv.hpp"
#include "graphkern/error.hpp"
#include "graphkern/gram.hpp"
#include "graphkern/rng.hpp"

namespace graphkern {

/// Shortest decimal text that round-trips a double ("%.17g").
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Headerless CSV, one row per graph.
inline void write_gram_csv(const GramMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
            out << (j ? "," : "") << format_real(m.values(i, j));
        }
        out << '\n';
    }
}

inline GramMatrix read_gram_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("missing-file: cannot open " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || *end != '\0') {
                throw DataError("malformed-line: " + path.string() + ":" + std::to_string(line_no));
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    GramMatrix m;
    const auto n = static_cast<Eigen::Index>(rows.size());
    m.values.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n) {
            throw DataError("malformed-line: " + path.string() + ": Gram matrix is not square");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            m.values(i, j) = rows[i][j];
        }
    }
    return m;
}

inline nlohmann::ordered_json to_json(const GramProvenance& p, bool normalized, std::size_t size) {
    nlohmann::ordered_json j;
    j["kernel"] = p.kernel;
    if (p.kernel == "gh") {
        j["s"] = p.gap_size;
        j["node_kernel"] = p.node_kernel;
        j["lambda"] = p.bandwidth;
    } else {
        j["h"] = p.wl_iterations;
    }
    j["dataset"] = p.dataset;
    j["noise_x"] = p.noise_fraction;
    j["seed"] = p.seed;
    j["normalized"] = normalized;
    j["size"] = size;
    j["rng"] = rng_name;
    return j;
}

inline void write_gram_sidecar(const GramMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << to_json(m.provenance, m.normalized, m.size()).dump(2) << '\n';
}

/// Reads a Gram CSV and, when present, its JSON sidecar (same stem, .json).
inline GramMatrix read_gram(const std::filesystem::path& csv) {
    GramMatrix m = read_gram_csv(csv);
    auto sidecar = csv;
    sidecar.replace_extension(".json");
    if (std::filesystem::exists(sidecar)) {
        std::ifstream in(sidecar);
        const auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) {
            throw DataError("malformed JSON sidecar " + sidecar.string());
        }
        m.normalized = j.value("normalized", false);
        auto& p = m.provenance;
        p.kernel = j.value("kernel", "");
        p.gap_size = j.value("s", std::size_t{0});
        p.wl_iterations = j.value("h", 0);
        p.node_kernel = j.value("node_kernel", "");
        p.bandwidth = j.value("lambda", 0.0);
        p.dataset = j.value("dataset", "");
        p.noise_fraction = j.value("noise_x", 0.0);
        p.seed = j.value("seed", std::uint64_t{0});
    }
    return m;
}

inline nlohmann::ordered_json to_json(const CvResult& r) {
    nlohmann::ordered_json j;
    j["mean_accuracy"] = r.mean_accuracy;
    j["std_accuracy"] = r.std_accuracy;
    j["repetition_accuracy"] = r.repetition_accuracy;
    j["nonconverged_fits"] = r.nonconverged_fits;
    auto& folds = j["selections"] = nlohmann::ordered_json::array();
    for (const auto& s : r.selections) {
        folds.push_back({{"repetition", s.repetition},
                         {"fold", s.fold},
                         {"param", s.param},
                         {"c", s.c},
                         {"inner_accuracy", s.inner_accuracy},
                         {"test_accuracy", s.test_accuracy}});
    }
    return j;
}

/// One row of the plot-ready accuracy table.
struct AccuracyRow {
    std::string dataset;
    std::string kernel;
    std::string param;  // e.g. "s=0,1,2" or "h=5"
    double noise_x = 0.0;
    std::string repetition;  // index, or "all" for aggregate rows
    double mean = 0.0;
    double std = 0.0;
    std::optional<double> runtime_seconds;  // written as NA when absent
};

inline constexpr const char* accuracy_csv_header = "dataset,kernel,param,x,repetition,mean,std,runtime_seconds";

inline std::string to_csv(const AccuracyRow& row) {
    std::ostringstream os;
    os << row.dataset << ',' << row.kernel << ",\"" << row.param << "\"," << format_real(row.noise_x) << ','
       << row.repetition << ',' << format_real(row.mean) << ',' << format_real(row.std) << ','
       << (row.runtime_seconds ? format_real(*row.runtime_seconds) : std::string("NA"));
    return os.str();
}

inline void write_accuracy_csv(const std::vector<AccuracyRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << accuracy_csv_header << '\n';
    for (const auto& row : rows) {
        out << to_csv(row) << '\n';
    }
}

} // namespace graphkern
