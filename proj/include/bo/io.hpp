#pragma once

// CSV and JSON emission. Every CSV starts with a header row and prints floating-point
// values with 17 significant digits so that they read back bit-exactly.

#include "bo/birkhoff.hpp"
#include "bo/counterexample.hpp"
#include "bo/flow.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bo {

/// Shortest-general formatting with 17 significant digits ("nan" for NaN).
std::string format_double(double value);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

/// n, lambda, gamma, inner1_re, inner1_im for n = 0..reliable_count.
CsvTable spectrum_table(const SpectralData& sd);

/// n, zeta_re, zeta_im, gamma, kappa for n = 1..K.
CsvTable birkhoff_table(const SpectralData& sd, const BirkhoffCoordinates& bc);

/// iteration, residual, step_norm.
CsvTable inverse_log_table(const InverseResult& result);

/// t followed by interleaved re/im of u^(1..n_max); states are padded to a common n_max.
CsvTable trajectory_table(const FlowTrajectory& traj);

/// t, xi_re, xi_im.
CsvTable observable_table(const ObservableReport& report);

struct SweepRow {
    double q, eps, mu_q, lambda0_matrix, norm_sqrtlog, xi_window_ratio;
};

/// q, eps, mu_q, lambda0_matrix, norm_sqrtlog, xi_window_ratio (NaN where not computed).
CsvTable sweep_table(const std::vector<SweepRow>& rows);

/// {"n_max": M, "coeffs": [[re, im], ...]} listing u^(1)..u^(M).
std::string potential_to_json(const PotentialSpectrum& u);
PotentialSpectrum potential_from_json(const std::string& text);
PotentialSpectrum load_potential(const std::filesystem::path& path);
void save_potential(const PotentialSpectrum& u, const std::filesystem::path& path);

/// Writes `text` to `path`, raising ValidationError when the file cannot be opened.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bo
