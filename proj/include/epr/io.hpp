#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "epr/ensemble.hpp"
#include "epr/histogram.hpp"
#include "epr/matrix.hpp"
#include "epr/version.hpp"

// File formats. Complex numbers are [re, im] pairs throughout; no string
// parsing of "a+bi". Doubles in CSV are printed with %.17g so identical runs
// re-emit byte-identical files.

namespace epr {

using nlohmann::json;

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InvalidInput(what + ": complex values must be [re, im] number pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

// ---- matrix documents -------------------------------------------------------

struct MatrixDocument {
    ComplexMatrix matrix;
    std::optional<Complex> eigenvalue_ep;
    std::optional<int> order;
};

inline json matrix_document_to_json(const MatrixDocument& doc) {
    json entries = json::array();
    for (std::size_t i = 0; i < doc.matrix.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < doc.matrix.cols(); ++j)
            row.push_back(complex_to_json(doc.matrix(i, j)));
        entries.push_back(std::move(row));
    }
    json out{{"format_version", format_version},
             {"n", doc.matrix.rows()},
             {"entries", std::move(entries)}};
    if (doc.eigenvalue_ep) out["eigenvalue_ep"] = complex_to_json(*doc.eigenvalue_ep);
    if (doc.order) out["order"] = *doc.order;
    return out;
}

inline MatrixDocument parse_matrix_document(const json& j) {
    if (!j.is_object()) throw InvalidInput("matrix document: expected a JSON object");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw InvalidInput("matrix document: missing integer field 'n'");
    const int n = j["n"].get<int>();
    if (n < 1 || static_cast<std::size_t>(n) > max_dimension)
        throw InvalidInput("matrix document: n out of range");
    if (!j.contains("entries") || !j["entries"].is_array() ||
        j["entries"].size() != static_cast<std::size_t>(n))
        throw InvalidInput("matrix document: 'entries' must be an n-row array");

    MatrixDocument doc;
    doc.matrix = ComplexMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const json& row = j["entries"][static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
            throw InvalidInput("matrix document: ragged or non-array row");
        for (int c = 0; c < n; ++c)
            doc.matrix(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) =
                complex_from_json(row[static_cast<std::size_t>(c)], "matrix document");
    }
    require_finite(doc.matrix, "matrix document");
    if (j.contains("eigenvalue_ep"))
        doc.eigenvalue_ep = complex_from_json(j["eigenvalue_ep"], "matrix document");
    if (j.contains("order")) {
        if (!j["order"].is_number_integer())
            throw InvalidInput("matrix document: 'order' must be an integer");
        doc.order = j["order"].get<int>();
    }
    return doc;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidInput("cannot parse JSON in " + path + ": " + e.what());
    }
    return j;
}

inline MatrixDocument load_matrix_document(const std::string& path) {
    return parse_matrix_document(load_json_file(path));
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

// ---- ensemble config --------------------------------------------------------

inline EnsembleConfig parse_ensemble_config(const json& j) {
    if (!j.is_object()) throw InvalidInput("ensemble config: expected a JSON object");
    EnsembleConfig cfg;
    if (!j.contains("study") || !j["study"].is_string())
        throw InvalidInput("ensemble config: missing string field 'study'");
    cfg.study = study_from_name(j["study"].get<std::string>());
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("eigenvalue_ep"))
        cfg.eigenvalue_ep = complex_from_json(j["eigenvalue_ep"], "ensemble config");
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("realizations")) cfg.realizations = j["realizations"].get<std::uint64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("bins")) cfg.bins = j["bins"].get<int>();
    if (j.contains("omega")) cfg.omega = j["omega"].get<double>();
    if (j.contains("hbar")) cfg.hbar = j["hbar"].get<double>();
    if (j.contains("time")) cfg.time = j["time"].get<double>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    cfg.validate();
    return cfg;
}

// Worker count is an execution detail: it cannot change results and is left
// out of the echo so outputs are byte-identical for any parallelism.
inline json ensemble_config_to_json(const EnsembleConfig& cfg) {
    json out{{"format_version", format_version},
             {"study", study_name(cfg.study)},
             {"n", cfg.n},
             {"eigenvalue_ep", complex_to_json(cfg.eigenvalue_ep)},
             {"epsilon", cfg.epsilon},
             {"realizations", cfg.realizations},
             {"seed", cfg.seed},
             {"bins", cfg.bins},
             {"hbar", cfg.hbar},
             {"time", cfg.time}};
    if (cfg.omega) out["omega"] = *cfg.omega;
    return out;
}

inline EnsembleConfig load_ensemble_config(const std::string& path) {
    return parse_ensemble_config(load_json_file(path));
}

// ---- histogram emission -----------------------------------------------------

inline json summary_to_json(const SummaryStats& s) {
    return json{{"min", s.min},
                {"max", s.max},
                {"mean", s.mean},
                {"median", s.median},
                {"fraction_above_one", s.fraction_above_one}};
}

inline json histogram_to_json(const HistogramData& h, const EnsembleConfig* cfg = nullptr) {
    json axes = json::array();
    for (const auto& ax : h.axes)
        axes.push_back(json{{"label", ax.label}, {"log10_scale", ax.log10_scale}, {"edges", ax.edges}});
    json out{{"format_version", format_version},
             {"version", version_string},
             {"axes", std::move(axes)},
             {"densities", h.densities},
             {"count_total", h.count_total},
             {"count_accepted", h.count_accepted},
             {"count_failed", h.count_failed},
             {"summary", summary_to_json(h.summary)}};
    if (cfg) out["config"] = ensemble_config_to_json(*cfg);
    return out;
}

inline HistogramData histogram_from_json(const json& j) {
    HistogramData h;
    for (const auto& ax : j.at("axes")) {
        HistogramAxis a;
        a.label = ax.at("label").get<std::string>();
        a.log10_scale = ax.at("log10_scale").get<bool>();
        a.edges = ax.at("edges").get<std::vector<double>>();
        h.axes.push_back(std::move(a));
    }
    h.densities = j.at("densities").get<std::vector<double>>();
    h.count_total = j.at("count_total").get<std::uint64_t>();
    h.count_accepted = j.at("count_accepted").get<std::uint64_t>();
    h.count_failed = j.at("count_failed").get<std::uint64_t>();
    const json& s = j.at("summary");
    h.summary = {s.at("min").get<double>(), s.at("max").get<double>(), s.at("mean").get<double>(),
                 s.at("median").get<double>(), s.at("fraction_above_one").get<double>()};
    return h;
}

inline std::string histogram_to_csv(const HistogramData& h, const EnsembleConfig* cfg = nullptr) {
    std::ostringstream out;
    out << "# epr histogram, version " << version_string << ", format_version " << format_version
        << "\n";
    if (cfg) out << "# config " << ensemble_config_to_json(*cfg).dump() << "\n";
    out << "# count_total " << h.count_total << ", count_accepted " << h.count_accepted
        << ", count_failed " << h.count_failed << "\n";
    out << "# summary min " << format_double(h.summary.min) << ", max "
        << format_double(h.summary.max) << ", mean " << format_double(h.summary.mean)
        << ", median " << format_double(h.summary.median) << ", fraction_above_one "
        << format_double(h.summary.fraction_above_one) << "\n";
    if (h.axes.size() == 1) {
        out << "bin_left,bin_right,density\n";
        for (std::size_t i = 0; i < h.bins(0); ++i)
            out << format_double(h.axes[0].edges[i]) << "," << format_double(h.axes[0].edges[i + 1])
                << "," << format_double(h.densities[i]) << "\n";
    } else {
        out << "bin_x,bin_y,density\n";
        const std::size_t by = h.bins(1);
        for (std::size_t ix = 0; ix < h.bins(0); ++ix) {
            const double cx = 0.5 * (h.axes[0].edges[ix] + h.axes[0].edges[ix + 1]);
            for (std::size_t iy = 0; iy < by; ++iy) {
                const double cy = 0.5 * (h.axes[1].edges[iy] + h.axes[1].edges[iy + 1]);
                out << format_double(cx) << "," << format_double(cy) << ","
                    << format_double(h.densities[ix * by + iy]) << "\n";
            }
        }
    }
    return out.str();
}

// Write a histogram to path as "csv" or "json".
inline void emit(const HistogramData& h, const std::string& path, const std::string& format,
                 const EnsembleConfig* cfg = nullptr) {
    if (format == "csv") {
        write_text_file(path, histogram_to_csv(h, cfg));
    } else if (format == "json") {
        write_text_file(path, histogram_to_json(h, cfg).dump(2) + "\n");
    } else {
        throw InvalidInput("emit: unknown format '" + format + "' (expected csv or json)");
    }
}

} // namespace epr
