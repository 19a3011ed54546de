// bo-birkhoff: command-line front end for the spectral toolkit.
//
// Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.

#include "bo/bo.hpp"
#include "bo/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw bo::ValidationError(std::string("cannot parse ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) throw bo::ValidationError(std::string(what) + " list is empty");
    return out;
}

struct PotentialArgs {
    std::string family = "cosine";
    std::string input;
    double amplitude = 1.0;
    int mode = 1;
    std::uint64_t seed = 1;
    double decay = 2.0;
    double beta = 2.0;
    double q = 0.9;
    int n_max = 0;

    void add_to(CLI::App* app) {
        app->add_option("--family", family, "zero, cosine, random, counterexample or explicit")
            ->check(CLI::IsMember({"zero", "cosine", "random", "counterexample", "explicit"}));
        app->add_option("--input", input, "potential JSON (implies --family explicit)");
        app->add_option("--amplitude", amplitude, "cosine amplitude a in a cos(mode x), or random-family scale");
        app->add_option("--mode", mode, "cosine mode");
        app->add_option("--seed", seed, "random-family seed");
        app->add_option("--decay", decay, "random-family decay exponent p in |u(n)| = n^-p");
        app->add_option("--beta", beta, "counterexample beta");
        app->add_option("--q", q, "counterexample q");
        app->add_option("--n-max", n_max, "truncation order of the potential");
    }

    bo::PotentialSpectrum make(int M) const {
        if (!input.empty()) return bo::load_potential(input);
        if (family == "zero") return bo::PotentialSpectrum::zero(n_max > 0 ? n_max : 1);
        if (family == "cosine") return bo::make_potential(bo::CosineFamily{amplitude, mode}, n_max > 0 ? n_max : mode);
        if (family == "random")
            return bo::make_potential(bo::RandomFamily{seed, decay, amplitude}, n_max > 0 ? n_max : 16);
        if (family == "counterexample") {
            const bo::CounterexampleParams p(beta, q);
            return bo::make_potential(bo::CounterexampleFamily{beta, q},
                                      n_max > 0 ? n_max : std::min(M, p.decay_order(1e-12)));
        }
        throw bo::ValidationError("family explicit needs --input");
    }

    json describe() const {
        json j{{"family", input.empty() ? family : "explicit"}};
        if (!input.empty()) j["input"] = input;
        if (family == "cosine") j.update({{"amplitude", amplitude}, {"mode", mode}});
        if (family == "random") j.update({{"seed", seed}, {"decay", decay}, {"amplitude", amplitude}});
        if (family == "counterexample") j.update({{"beta", beta}, {"q", q}});
        if (n_max > 0) j["n_max"] = n_max;
        return j;
    }
};

class Manifest {
public:
    Manifest(std::string command, fs::path out) : out_(std::move(out)), start_(std::chrono::steady_clock::now()) {
        doc_["tool"] = "bo-birkhoff";
        doc_["version"] = kVersion;
        doc_["command"] = std::move(command);
        doc_["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION);
        doc_["inputs"] = json::object();
        doc_["seeds"] = json::array();
        doc_["outputs"] = json::array();
    }

    json& inputs() { return doc_["inputs"]; }
    void seed(std::uint64_t s) { doc_["seeds"].push_back(s); }

    void emit(const std::string& name, const std::string& text) {
        bo::write_text(out_ / name, text);
        doc_["outputs"].push_back(name);
    }
    void emit(const std::string& name, const bo::CsvTable& table) { emit(name, table.str()); }

    void finish() {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        doc_["wall_time_seconds"] = secs;
        bo::write_text(out_ / "manifest.json", doc_.dump(2) + "\n");
    }

private:
    fs::path out_;
    std::chrono::steady_clock::time_point start_;
    json doc_;
};

fs::path prepare_out(const std::string& out) {
    const fs::path p(out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw bo::ValidationError("output directory not writable: " + out);
    return p;
}

int default_jobs() {
    if (const char* env = std::getenv("BO_BIRKHOFF_JOBS")) {
        try {
            const int j = std::stoi(env);
            if (j >= 1) return j;
        } catch (const std::exception&) {
        }
        throw bo::ValidationError("BO_BIRKHOFF_JOBS must be a positive integer");
    }
    return 1;
}

/// Evaluates fn(i) for i < count with at most `jobs` concurrent tasks; results keep index order.
template <typename F>
auto ordered_map(std::size_t count, int jobs, F fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out;
    out.reserve(count);
    for (std::size_t begin = 0; begin < count; begin += jobs) {
        std::vector<std::future<R>> batch;
        for (std::size_t i = begin; i < std::min(count, begin + jobs); ++i)
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, fn, i));
        for (auto& f : batch) out.push_back(f.get());
    }
    return out;
}

struct ConfigFile {
    std::string command;  ///< optional "command" key; empty when absent
    std::vector<std::string> args;
};

/// Arguments taken from a JSON config file: {"schema": 1, "command": "...", "<flag>": value, ...}.
ConfigFile config_arguments(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw bo::ValidationError("cannot read config " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw bo::ValidationError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw bo::ValidationError("config must be a JSON object");
    if (j.value("schema", 0) != 1) throw bo::ValidationError("config needs \"schema\": 1");
    ConfigFile cfg;
    if (j.contains("command")) {
        if (!j["command"].is_string()) throw bo::ValidationError("config \"command\" must be a string");
        cfg.command = j["command"].get<std::string>();
    }
    auto& args = cfg.args;
    for (const auto& [key, value] : j.items()) {
        if (key == "schema" || key == "command") continue;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& e : value) joined += (joined.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
            args.insert(args.end(), {flag, joined});
        } else {
            args.insert(args.end(), {flag, value.is_string() ? value.get<std::string>() : value.dump()});
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------------------------

int run_spectrum(const PotentialArgs& pa, int M, const std::string& out) {
    Manifest man("spectrum", prepare_out(out));
    const auto u = pa.make(M);
    man.inputs() = {{"potential", pa.describe()}, {"modes", M}};
    if (pa.family == "random") man.seed(pa.seed);
    const auto sd = bo::spectral_data(u, M);
    man.emit("spectrum.csv", bo::spectrum_table(sd));
    man.finish();
    std::cout << "lambda_0 = " << bo::format_double(sd.lambdas[0]) << ", trace residual "
              << bo::gaps_and_trace(sd).trace_residual << ", " << sd.reliable_count + 1 << " rows\n";
    return 0;
}

int run_birkhoff(const PotentialArgs& pa, int M, const std::string& out) {
    Manifest man("birkhoff", prepare_out(out));
    const auto u = pa.make(M);
    man.inputs() = {{"potential", pa.describe()}, {"modes", M}};
    if (pa.family == "random") man.seed(pa.seed);
    const auto sd = bo::spectral_data(u, M);
    const auto bc = bo::birkhoff_from_spectrum(sd);
    man.emit("spectrum.csv", bo::spectrum_table(sd));
    man.emit("birkhoff.csv", bo::birkhoff_table(sd, bc));
    man.emit("potential.json", bo::potential_to_json(u));
    man.finish();
    std::cout << bc.size() << " coordinates written\n";
    return 0;
}

bo::CVector<double> read_zeta_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw bo::ValidationError("cannot read " + path);
    std::string line;
    std::getline(f, line);
    if (line.rfind("n,zeta_re,zeta_im", 0) != 0) throw bo::ValidationError("expected a birkhoff CSV header in " + path);
    std::vector<std::complex<double>> z;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto v = parse_list(line, "birkhoff CSV");
        if (v.size() < 3 || v[0] != double(z.size() + 1)) throw bo::ValidationError("malformed birkhoff CSV row");
        z.emplace_back(v[1], v[2]);
    }
    bo::CVector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i];
    return out;
}

int run_invert(const PotentialArgs& pa, const std::string& zeta_csv, int M, int n_unknown, int max_iter,
               const std::string& out) {
    Manifest man("invert", prepare_out(out));
    bo::CVector<double> target;
    json in{{"modes", M}, {"n_unknowns", n_unknown}, {"max_iterations", max_iter}};
    std::optional<bo::PotentialSpectrum> truth;
    if (!zeta_csv.empty()) {
        target = read_zeta_csv(zeta_csv);
        in["zeta_csv"] = zeta_csv;
    } else {
        truth = pa.make(M);
        target = bo::birkhoff_forward(*truth, M).zetas;
        in["potential"] = pa.describe();
        if (pa.family == "random") man.seed(pa.seed);
    }
    man.inputs() = in;
    bo::InverseOptions opt;
    opt.n_max = n_unknown > 0 ? n_unknown : (truth ? truth->n_max() : 0);
    opt.max_iterations = max_iter;
    const auto res = bo::birkhoff_inverse(target, M, opt);
    man.emit("potential.json", bo::potential_to_json(res.u));
    man.emit("inverse_log.csv", bo::inverse_log_table(res));
    man.finish();
    std::cout << "residual " << res.residual << " after " << res.iterations << " iterations";
    if (truth) std::cout << ", roundtrip error " << bo::weighted_norm(res.u - *truth, {-0.5, bo::LogMode::sqrt_log});
    std::cout << '\n';
    if (!res.converged) {
        std::cerr << "error: inverse map did not converge (best residual " << res.residual << ")\n";
        return 2;
    }
    return 0;
}

int run_evolve(const PotentialArgs& pa, int M, const std::string& method, const std::string& times_text, double dt,
               int grid, const std::string& out) {
    Manifest man("evolve", prepare_out(out));
    const auto u0 = pa.make(M);
    const auto times = parse_list(times_text, "--times");
    man.inputs() = {{"potential", pa.describe()}, {"modes", M},  {"method", method},
                    {"times", times},             {"dt", dt},    {"grid", grid}};
    if (pa.family == "random") man.seed(pa.seed);
    int status = 0;
    if (method == "birkhoff" || method == "both") {
        const auto traj = bo::trajectory_birkhoff(u0, times, M);
        man.emit("trajectory_birkhoff.csv", bo::trajectory_table(traj));
        if (!traj.complete) {
            std::cerr << "error: inverse map failed after " << traj.times.size() << " samples; trajectory truncated\n";
            status = 2;
        }
    }
    if (method == "direct" || method == "both") {
        const auto traj = bo::trajectory_direct(u0, times, dt, grid);
        man.emit("trajectory_direct.csv", bo::trajectory_table(traj));
    }
    man.finish();
    return status;
}

int run_counterexample(double beta, const std::string& qs, int M, bool observable, double window, int obs_modes,
                       int jobs, const std::string& out) {
    Manifest man("counterexample", prepare_out(out));
    const auto qgrid = parse_list(qs, "--q");
    man.inputs() = {{"beta", beta}, {"q", qgrid}, {"modes", M}, {"observable", observable}, {"window", window},
                    {"observable_modes", obs_modes}, {"jobs", jobs}};
    for (double q : qgrid) (void)bo::CounterexampleParams(beta, q);  // validate before any work

    struct Cell {
        bo::SweepRow row;
        std::optional<bo::ObservableReport> obs;
        std::string note;
    };
    const auto cells = ordered_map(qgrid.size(), jobs, [&](std::size_t i) {
        const double q = qgrid[i];
        const bo::CounterexampleParams p(beta, q);
        Cell c;
        c.row = {q, p.eps(), NAN, NAN, bo::norm_and_weak_trend(beta, {q})[0].norm_sqrtlog, NAN};
        const auto search = bo::find_mu(p);
        c.note = search.diagnostic;
        if (search.mu) {
            c.row.mu_q = *search.mu;
            c.row.lambda0_matrix = bo::cross_validate_lambda0(p, *search.mu, M).lambda0;
            if (observable) {
                const int m = obs_modes > 0 ? obs_modes : std::min(2 * ((p.decay_order(1e-12) + 1) / 2), 512);
                const auto u0 = bo::make_potential(bo::CounterexampleFamily{beta, q}, m);
                c.obs = bo::windowed_observable(u0, *search.mu, bo::observable_time_grid(0.0, window, *search.mu), m);
                c.row.xi_window_ratio = c.obs->ratio;
            }
        } else {
            c.row.lambda0_matrix = bo::cross_validate_lambda0(p, 1.0, M).lambda0;
        }
        return c;
    });

    std::vector<bo::SweepRow> rows;
    for (const auto& c : cells) {
        rows.push_back(c.row);
        std::cout << "q=" << c.row.q << ": " << c.note << '\n';
        if (c.obs) {
            std::ostringstream name;
            name << "observable_q" << c.row.q << ".csv";
            man.emit(name.str(), bo::observable_table(*c.obs));
        }
    }
    man.emit("ce_sweep.csv", bo::sweep_table(rows));
    man.finish();
    return 0;
}

int run_verify_cmd(const std::string& suite, int M, std::uint64_t seed, const std::string& out) {
    const auto results = bo::run_verify({suite, M, seed});
    const std::string table = bo::format_verify_table(results);
    std::cout << table;
    if (!out.empty()) {
        Manifest man("verify", prepare_out(out));
        man.inputs() = {{"suite", suite}, {"modes", M}, {"seed", seed}};
        man.seed(seed);
        man.emit("verify.txt", table);
        man.finish();
    }
    for (const auto& r : results)
        if (!r.pass) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral toolkit for the periodic Benjamin-Ono Lax operator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->take_last();

    std::string config;
    app.add_option("--config", config, "JSON config (schema 1); flags given on the command line win");
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker count for sweeps (default: BO_BIRKHOFF_JOBS or 1)");

    int M = 128;
    std::string out = ".";
    PotentialArgs pa;

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, gaps and <1|f_n>");
    auto* birkhoff = app.add_subcommand("birkhoff", "Birkhoff coordinates and norming constants");
    auto* invert = app.add_subcommand("invert", "inverse Birkhoff map by Gauss-Newton");
    auto* evolve = app.add_subcommand("evolve", "Benjamin-Ono evolution");
    auto* counter = app.add_subcommand("counterexample", "geometric family: mu_q, lambda_0, norms");
    auto* verify = app.add_subcommand("verify", "invariant checks with a PASS/FAIL table");

    for (auto* sub : {spectrum, birkhoff, invert, evolve}) {
        pa.add_to(sub);
        sub->add_option("--modes", M, "truncation M of the Lax matrix")->check(CLI::Range(2, 1 << 14));
        sub->add_option("--out", out, "output directory");
        sub->add_option("--config", config, "JSON config (schema 1)");
    }

    std::string zeta_csv;
    int n_unknown = 0, max_iter = 50;
    invert->add_option("--zeta", zeta_csv, "birkhoff CSV with the target coordinates (default: Phi of the potential)");
    invert->add_option("--unknowns", n_unknown, "number of unknown Fourier modes");
    invert->add_option("--max-iter", max_iter, "Gauss-Newton iteration cap")->check(CLI::PositiveNumber);

    std::string method = "both", times = "0.25,0.5,1";
    double dt = 1e-4;
    int grid = 0;
    evolve->add_option("--method", method)->check(CLI::IsMember({"birkhoff", "direct", "both"}));
    evolve->add_option("--times", times, "comma-separated increasing sample times");
    evolve->add_option("--dt", dt, "direct-method time step")->check(CLI::PositiveNumber);
    evolve->add_option("--grid", grid, "direct-method grid size (default: 4 n_max rounded up to a power of two)");

    double beta = 2.0, window = 1.0;
    std::string qs = "0.9,0.99";
    bool observable = false;
    int obs_modes = 0, ce_modes = 0;
    counter->add_option("--beta", beta, "beta > 0");
    counter->add_option("--q", qs, "comma-separated q values in (0,1)");
    counter->add_option("--modes", ce_modes, "minimum Lax truncation (raised to the coefficient decay order)");
    counter->add_flag("--observable", observable, "also compute the windowed xi_q observable (slow)");
    counter->add_option("--window", window, "observable window [0, window]")->check(CLI::PositiveNumber);
    counter->add_option("--observable-modes", obs_modes, "truncation for the observable (default from decay, <= 512)");
    counter->add_option("--out", out, "output directory");
    counter->add_option("--config", config, "JSON config (schema 1)");
    counter->add_option("--jobs", jobs, "worker count");

    std::string suite = "all";
    std::uint64_t seed = 1;
    std::string verify_out;
    verify->add_option("--suite", suite)->check(CLI::IsMember({"all", "hardy", "lax", "birkhoff", "flow", "counterexample"}));
    verify->add_option("--modes", M, "truncation M")->check(CLI::Range(8, 4096));
    verify->add_option("--seed", seed, "ensemble seed");
    verify->add_option("--out", verify_out, "directory for verify.txt and manifest.json");
    verify->add_option("--config", config, "JSON config (schema 1)");

    try {
        // Splice config-file arguments in front of the user's flags so that the latter win.
        std::vector<std::string> args(argv + 1, argv + argc);
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--config") {
                const auto cfg = config_arguments(args[i + 1]);
                std::size_t sub = 0;
                while (sub < args.size() && !app.get_subcommand_no_throw(args[sub])) ++sub;
                if (sub == args.size()) {
                    if (cfg.command.empty())
                        throw bo::ValidationError("no subcommand on the command line or in the config");
                    if (!app.get_subcommand_no_throw(cfg.command))
                        throw bo::ValidationError("config names an unknown command: " + cfg.command);
                    args.push_back(cfg.command);
                } else if (!cfg.command.empty() && cfg.command != args[sub]) {
                    throw bo::ValidationError("config command '" + cfg.command + "' conflicts with '" + args[sub] + "'");
                }
                args.insert(args.begin() + sub + 1, cfg.args.begin(), cfg.args.end());
                break;
            }
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const bo::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (jobs <= 0) jobs = default_jobs();
        if (*spectrum) return run_spectrum(pa, M, out);
        if (*birkhoff) return run_birkhoff(pa, M, out);
        if (*invert) return run_invert(pa, zeta_csv, M, n_unknown, max_iter, out);
        if (*evolve) return run_evolve(pa, M, method, times, dt, grid, out);
        if (*counter) return run_counterexample(beta, qs, ce_modes, observable, window, obs_modes, jobs, out);
        if (*verify) return run_verify_cmd(suite, M, seed, verify_out);
    } catch (const bo::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const bo::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
