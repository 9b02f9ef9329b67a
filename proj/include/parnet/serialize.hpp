#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "parnet/estimator.hpp"
#include "parnet/experiments.hpp"
#include "parnet/topology.hpp"
#include "parnet/weights.hpp"

namespace parnet {

// %.17g: enough digits to restore any double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Flat human-diffable weight layout:
// {topology, outer: [...], subnets: [{layer0: [[...]], hidden: [[[...]]]}]}
inline nlohmann::json weights_to_json(const WeightVector& w) {
    const Topology& t = w.topology();
    nlohmann::json j;
    j["topology"] = {{"d", t.d}, {"L", t.L}, {"r", t.r}, {"K_n", t.K}};
    nlohmann::json outer = nlohmann::json::array();
    for (int k = 0; k < t.K; ++k) outer.push_back(w.outer(k));
    j["outer"] = std::move(outer);
    nlohmann::json subnets = nlohmann::json::array();
    for (int k = 0; k < t.K; ++k) {
        nlohmann::json layer0 = nlohmann::json::array();
        for (int i = 1; i <= t.r; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int jj = 0; jj <= t.d; ++jj) row.push_back(w.input_w(k, i, jj));
            layer0.push_back(std::move(row));
        }
        nlohmann::json hidden = nlohmann::json::array();
        for (int l = 1; l <= t.L - 1; ++l) {
            nlohmann::json level = nlohmann::json::array();
            for (int i = 1; i <= t.r; ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (int jj = 0; jj <= t.r; ++jj) row.push_back(w.hidden_w(k, l, i, jj));
                level.push_back(std::move(row));
            }
            hidden.push_back(std::move(level));
        }
        subnets.push_back({{"layer0", std::move(layer0)}, {"hidden", std::move(hidden)}});
    }
    j["subnets"] = std::move(subnets);
    return j;
}

inline WeightVector weights_from_json(const nlohmann::json& j) {
    const auto& jt = j.at("topology");
    Topology t{jt.at("d").get<int>(), jt.at("L").get<int>(), jt.at("r").get<int>(),
               jt.at("K_n").get<int>()};
    t.validate();
    WeightVector w(t);
    const auto& outer = j.at("outer");
    const auto& subnets = j.at("subnets");
    if (static_cast<int>(outer.size()) != t.K || static_cast<int>(subnets.size()) != t.K)
        throw std::invalid_argument("weights: array sizes do not match topology");
    for (int k = 0; k < t.K; ++k) {
        w.outer(k) = outer.at(static_cast<std::size_t>(k)).get<double>();
        const auto& sn = subnets.at(static_cast<std::size_t>(k));
        const auto& layer0 = sn.at("layer0");
        for (int i = 1; i <= t.r; ++i)
            for (int jj = 0; jj <= t.d; ++jj)
                w.input_w(k, i, jj) = layer0.at(i - 1).at(static_cast<std::size_t>(jj)).get<double>();
        const auto& hidden = sn.at("hidden");
        for (int l = 1; l <= t.L - 1; ++l)
            for (int i = 1; i <= t.r; ++i)
                for (int jj = 0; jj <= t.r; ++jj)
                    w.hidden_w(k, l, i, jj) =
                        hidden.at(l - 1).at(i - 1).at(static_cast<std::size_t>(jj)).get<double>();
    }
    if (!w.all_finite()) throw std::invalid_argument("weights: non-finite entry");
    return w;
}

inline void save_weights(const WeightVector& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << weights_to_json(w).dump(1) << "\n";
}

inline WeightVector load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return weights_from_json(nlohmann::json::parse(in));
}

inline nlohmann::json trace_to_json(const GDTrace& trace) {
    return {{"risk", trace.risk},
            {"grad_norm", trace.grad_norm},
            {"drift", trace.drift},
            {"step_len", trace.step_len}};
}

inline constexpr const char* kCurveCsvHeader =
    "n,replicates,median_l2,q25,q75,mean_final_risk,conditions_ok";

inline std::string curve_to_csv(const std::vector<CurveRow>& rows) {
    std::ostringstream out;
    out << kCurveCsvHeader << "\n";
    for (const auto& row : rows) {
        out << row.n << ',' << row.replicates << ',' << format_double(row.median_l2) << ','
            << format_double(row.q25) << ',' << format_double(row.q75) << ','
            << format_double(row.mean_final_risk) << ',' << (row.conditions_ok ? 1 : 0) << "\n";
    }
    return out.str();
}

// JSON array of objects with the same keys as the CSV columns; doubles
// written via format_double so both formats carry 17 significant digits.
inline std::string curve_to_json(const std::vector<CurveRow>& rows) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        out << (i == 0 ? "\n" : ",\n");
        out << "  {\"n\": " << row.n << ", \"replicates\": " << row.replicates
            << ", \"median_l2\": " << format_double(row.median_l2)
            << ", \"q25\": " << format_double(row.q25)
            << ", \"q75\": " << format_double(row.q75)
            << ", \"mean_final_risk\": " << format_double(row.mean_final_risk)
            << ", \"conditions_ok\": " << (row.conditions_ok ? "true" : "false") << "}";
    }
    out << "\n]\n";
    return out.str();
}

inline std::vector<CurveRow> curve_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<CurveRow> rows;
    for (const auto& item : j) {
        CurveRow row;
        row.n = item.at("n").get<int>();
        row.replicates = item.at("replicates").get<int>();
        row.median_l2 = item.at("median_l2").get<double>();
        row.q25 = item.at("q25").get<double>();
        row.q75 = item.at("q75").get<double>();
        row.mean_final_risk = item.at("mean_final_risk").get<double>();
        row.conditions_ok = item.at("conditions_ok").get<bool>();
        rows.push_back(std::move(row));
    }
    return rows;
}

// Curve rows to disk as CSV (header always present) or a JSON array.
inline void write_results(const std::vector<CurveRow>& rows, const std::string& path,
                          const std::string& format) {
    std::string text;
    if (format == "csv") {
        text = curve_to_csv(rows);
    } else if (format == "json") {
        text = curve_to_json(rows);
    } else {
        throw std::invalid_argument("write_results: format must be csv or json");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace parnet
