#include "bo/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bo {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
    if (values.size() != header_.size()) throw std::logic_error("CSV row width does not match header");
    rows_.push_back(values);
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + path.string());
    f << text;
    if (!f) throw ValidationError("write failed for " + path.string());
}

CsvTable spectrum_table(const SpectralData& sd) {
    CsvTable t({"n", "lambda", "gamma", "inner1_re", "inner1_im"});
    for (int n = 0; n <= sd.reliable_count; ++n)
        t.add_row({double(n), sd.lambdas[n], n == 0 ? 0.0 : sd.gaps[n], sd.inner1[n].real(), sd.inner1[n].imag()});
    return t;
}

CsvTable birkhoff_table(const SpectralData& sd, const BirkhoffCoordinates& bc) {
    CsvTable t({"n", "zeta_re", "zeta_im", "gamma", "kappa"});
    for (int n = 1; n <= bc.size(); ++n)
        t.add_row({double(n), bc.zetas[n - 1].real(), bc.zetas[n - 1].imag(), sd.gaps[n], bc.kappas[n]});
    return t;
}

CsvTable inverse_log_table(const InverseResult& result) {
    CsvTable t({"iteration", "residual", "step_norm"});
    for (const auto& it : result.log) t.add_row({double(it.iteration), it.residual, it.step_norm});
    return t;
}

CsvTable trajectory_table(const FlowTrajectory& traj) {
    int n_max = 1;
    for (const auto& s : traj.states) n_max = std::max(n_max, s.n_max());
    std::vector<std::string> header{"t"};
    for (int n = 1; n <= n_max; ++n) {
        header.push_back("u" + std::to_string(n) + "_re");
        header.push_back("u" + std::to_string(n) + "_im");
    }
    CsvTable t(std::move(header));
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        std::vector<double> row{traj.times[i]};
        for (int n = 1; n <= n_max; ++n) {
            row.push_back(traj.states[i][n].real());
            row.push_back(traj.states[i][n].imag());
        }
        t.add_row(row);
    }
    return t;
}

CsvTable observable_table(const ObservableReport& report) {
    CsvTable t({"t", "xi_re", "xi_im"});
    for (std::size_t i = 0; i < report.times.size(); ++i)
        t.add_row({report.times[i], report.xi[i].real(), report.xi[i].imag()});
    return t;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
    CsvTable t({"q", "eps", "mu_q", "lambda0_matrix", "norm_sqrtlog", "xi_window_ratio"});
    for (const auto& r : rows) t.add_row({r.q, r.eps, r.mu_q, r.lambda0_matrix, r.norm_sqrtlog, r.xi_window_ratio});
    return t;
}

std::string potential_to_json(const PotentialSpectrum& u) {
    // hand-written so that coefficients keep 17 significant digits
    std::ostringstream os;
    os << "{\"n_max\": " << u.n_max() << ", \"coeffs\": [";
    for (int n = 1; n <= u.n_max(); ++n) {
        if (n > 1) os << ", ";
        os << '[' << format_double(u[n].real()) << ", " << format_double(u[n].imag()) << ']';
    }
    os << "]}\n";
    return os.str();
}

PotentialSpectrum potential_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("potential JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
        throw ValidationError("potential JSON needs a \"coeffs\" array");
    const auto& c = j["coeffs"];
    const int n_max = j.contains("n_max") ? j["n_max"].get<int>() : static_cast<int>(c.size());
    if (n_max < 1) throw ValidationError("potential JSON: n_max must be >= 1");
    if (static_cast<int>(c.size()) != n_max) throw ValidationError("potential JSON: coeffs length differs from n_max");
    CVector<double> v(n_max);
    for (int n = 0; n < n_max; ++n) {
        const auto& e = c[n];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ValidationError("potential JSON: each coefficient is a [re, im] pair");
        v[n] = {e[0].get<double>(), e[1].get<double>()};
    }
    return PotentialSpectrum(std::move(v));
}

PotentialSpectrum load_potential(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return potential_from_json(ss.str());
}

void save_potential(const PotentialSpectrum& u, const std::filesystem::path& path) {
    write_text(path, potential_to_json(u));
}

}  // namespace bo
