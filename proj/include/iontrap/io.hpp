#ifndef IONTRAP_IO_HPP
#define IONTRAP_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iontrap/revivals.hpp"

// Serialization of series and reports.  CSV carries 17 significant digits
// so doubles round-trip losslessly; JSON uses nlohmann's shortest
// round-trip formatting.  Output is byte-deterministic for identical
// inputs.

namespace iontrap {

using json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Series CSV, schema: tau,n_mean[,n_mean_oracle,abs_dev].
inline void write_series_csv(const std::string& path,
                             const ExcitationSeries& series,
                             const ExcitationSeries* oracle = nullptr) {
    if (oracle && oracle->tau.size() != series.tau.size())
        throw DimensionMismatch("write_series_csv: grids differ");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << (oracle ? "tau,n_mean,n_mean_oracle,abs_dev\n" : "tau,n_mean\n");
    for (std::size_t i = 0; i < series.tau.size(); ++i) {
        out << format_double(series.tau[i]) << ','
            << format_double(series.n_mean[i]);
        if (oracle)
            out << ',' << format_double(oracle->n_mean[i]) << ','
                << format_double(std::abs(series.n_mean[i] - oracle->n_mean[i]));
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

struct SeriesTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[col][row]
};

inline SeriesTable read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    SeriesTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty csv: " + path);
    std::stringstream hdr(line);
    std::string cell;
    while (std::getline(hdr, cell, ',')) t.columns.push_back(cell);
    t.data.resize(t.columns.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            if (col >= t.columns.size())
                throw IoError("ragged csv row in " + path);
            t.data[col].push_back(std::stod(cell));
            ++col;
        }
        if (col != t.columns.size()) throw IoError("short csv row in " + path);
    }
    return t;
}

inline json params_to_json(const IonParams& p) {
    return json{{"nu", p.nu},
                {"omega", p.omega},
                {"delta", p.delta},
                {"eta", p.eta},
                {"g", p.g},
                {"rwa_regime", p.rwa_regime},
                {"rwa_delta_term_over_g", rwa_delta_diagnostic(p)}};
}

inline json report_to_json(const RevivalReport& rep,
                           const ExcitationSeries& series, int n_max_used,
                           const std::string& mode,
                           bool include_envelope = true) {
    json j;
    j["mode"] = mode;
    j["provenance"] = to_string(series.provenance);
    j["params"] = params_to_json(series.params);
    j["preparation"] = {
        {"alpha_re", series.alpha.alpha.real()},
        {"alpha_im", series.alpha.alpha.imag()},
        {"alpha_tilde_re", series.alpha.alpha_tilde.real()},
        {"alpha_tilde_im", series.alpha.alpha_tilde.imag()},
        {"n_bar", std::norm(series.alpha.alpha)},
    };
    j["grid"] = {
        {"n_points", series.tau.size()},
        {"tau_first", series.tau.front()},
        {"tau_last", series.tau.back()},
        {"n_max", n_max_used},
    };
    j["conventions"] = {
        {"basis_ordering", std::string(kBasisOrdering)},
        {"time", "scaled, tau = g*t"},
        {"coefficients",
         "unit state norm (1/sqrt(2) vs raw branch amplitudes); "
         "propagator exp(-i H_int t); global phase exp(-i eta Re(alpha)/2)"},
    };
    json r;
    r["n_bar"] = rep.n_bar;
    r["tau_r_predicted_scaled"] = rep.tau_r_predicted_scaled;
    r["tau_r_predicted_rabi"] = rep.tau_r_predicted_rabi;
    r["tau_r_measured"] =
        rep.tau_r_measured ? json(*rep.tau_r_measured) : json(nullptr);
    r["tau_r_first_envelope_peak"] = rep.tau_r_first_envelope_peak
                                         ? json(*rep.tau_r_first_envelope_peak)
                                         : json(nullptr);
    r["tau_sr_predicted"] =
        rep.tau_sr_predicted ? json(*rep.tau_sr_predicted) : json(nullptr);
    r["tau_sr_measured"] =
        rep.tau_sr_measured ? json(*rep.tau_sr_measured) : json(nullptr);
    r["super_revival_evaluated"] = rep.super_revival_evaluated;
    r["super_revival_detected"] = rep.super_revival_detected;
    r["envelope_window"] = rep.envelope_window;
    r["threshold"] = rep.threshold;
    r["median_level"] = rep.median_level;
    r["mad_level"] = rep.mad_level;
    r["super_baseline"] = rep.super_baseline;
    json peaks = json::array();
    for (const Peak& pk : rep.peak_list)
        peaks.push_back({{"tau", pk.tau}, {"height", pk.height}});
    r["peaks"] = peaks;
    if (include_envelope) {
        r["envelope"] = {{"tau", rep.envelope.tau},
                         {"value", rep.envelope.value}};
    }
    j["revivals"] = r;
    return j;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError("bad json in " + path + ": " + e.what());
    }
}

}  // namespace iontrap

#endif
