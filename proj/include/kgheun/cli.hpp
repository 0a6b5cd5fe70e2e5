#ifndef KGHEUN_CLI_HPP
#define KGHEUN_CLI_HPP

// Run configuration and the table-producing runners behind the kgheun
// command-line tool. Argument parsing lives in tools/; everything here is
// callable in-process.

#include <kgheun/errors.hpp>
#include <kgheun/potential.hpp>
#include <kgheun/spectrum.hpp>
#include <kgheun/table.hpp>
#include <kgheun/thermo.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace kgheun::cli {

enum class Command { spectrum, wavefunction, thermo, compare, density };
enum class SweepScale { log, linear };
enum class MethodChoice { direct, em, both };
enum class DensityForm { consistent, root };

struct Sweep
{
    double mbar_min = 0.1;
    double mbar_max = 10.0;
    int steps = 200;
    SweepScale scale = SweepScale::log;
};

inline std::vector<double> const& default_q_values()
{
    static std::vector<double> const v{0.5, 1.0, 1.5};
    return v;
}

struct RunConfig
{
    Command command = Command::spectrum;
    PhysicalParams physical{};
    std::optional<Sweep> sweep;
    std::vector<double> q_list;
    std::vector<int> n_list;
    MethodChoice method = MethodChoice::both;
    int em_order = 2;
    OutputFormat format = OutputFormat::csv;
    std::string output_path; ///< empty: standard output
    double tol = 1e-12;

    bool include_negative = false;
    spectrum::HeunFactor heun = spectrum::HeunFactor::polynomial;
    std::size_t points = 401;
    std::optional<double> y_max;
    DensityForm density_form = DensityForm::consistent;
    Units units{};
    unsigned workers = 0; ///< 0: hardware concurrency

    /// Throws ConfigError on values no command can run with.
    void validate() const
    {
        physical.validate();
        if (!(tol > 0.0))
            throw ConfigError("--tol must be positive");
        if (em_order != 1 && em_order != 2)
            throw ConfigError("--em-order must be 1 or 2");
        if (sweep) {
            if (sweep->steps < 2)
                throw ConfigError("--steps must be at least 2 for a sweep");
            if (!(sweep->mbar_min > 0.0) || !(sweep->mbar_max >= sweep->mbar_min))
                throw ConfigError("sweep needs 0 < --mbar-min <= --mbar-max");
        }
        for (double const q : q_list)
            if (!(q > 0.0))
                throw ConfigError("--q values must be positive");
        for (int const n : n_list)
            if (n < 0)
                throw ConfigError("--n values must be non-negative");
        if (points < 2)
            throw ConfigError("--points must be at least 2");
        if (y_max && !(*y_max > 0.0))
            throw ConfigError("--y-max must be positive");
        if (command == Command::wavefunction && n_list.empty())
            throw ConfigError("wavefunction needs at least one --n value");
        if (units.mode == UnitMode::explicit_units && !(physical.a3 > 0.0))
            throw ConfigError("explicit units derive q and eps from --a2/--a3 and need a3 > 0");
    }
};

struct RunResult
{
    /// One table, or one per quantum number for `wavefunction`.
    std::vector<Table> tables;
    std::vector<int> table_keys;
    std::vector<std::string> warnings;
    std::string summary;
    bool all_ok = true;
};

/// Parses "0..3", "0,5,10" or a mix such as "0..2,7". Throws ConfigError.
inline std::vector<int> parse_n_list(std::string const& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    auto to_int = [&](std::string const& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (std::exception const&) {
            throw ConfigError("malformed quantum number list '" + text + "'");
        }
        if (used != s.size() || v < 0)
            throw ConfigError("malformed quantum number list '" + text + "'");
        return v;
    };
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            throw ConfigError("malformed quantum number list '" + text + "'");
        auto const dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(item));
            continue;
        }
        int const lo = to_int(item.substr(0, dots));
        int const hi = to_int(item.substr(dots + 2));
        if (hi < lo)
            throw ConfigError("empty quantum number range '" + item + "'");
        for (int n = lo; n <= hi; ++n)
            out.push_back(n);
    }
    if (out.empty())
        throw ConfigError("empty quantum number list");
    return out;
}

/// Sweep abscissae; mbar_min == mbar_max collapses to a single point.
inline std::vector<double> sweep_points(Sweep const& s)
{
    if (s.mbar_min == s.mbar_max)
        return {s.mbar_min};
    std::vector<double> m(static_cast<std::size_t>(s.steps));
    for (int i = 0; i < s.steps; ++i) {
        double const t = static_cast<double>(i) / static_cast<double>(s.steps - 1);
        m[static_cast<std::size_t>(i)] =
            s.scale == SweepScale::log ? s.mbar_min * std::pow(s.mbar_max / s.mbar_min, t)
                                       : s.mbar_min + (s.mbar_max - s.mbar_min) * t;
    }
    m.back() = s.mbar_max;
    return m;
}

/// Applies fn to 0..count-1 on a bounded pool; results are stored by index.
template <class Result>
std::vector<Result> parallel_map(std::size_t count, unsigned workers,
                                 std::function<Result(std::size_t)> const& fn)
{
    std::vector<Result> out(count);
    unsigned const hw = std::max(1U, std::thread::hardware_concurrency());
    unsigned const pool = static_cast<unsigned>(
        std::min<std::size_t>(count, workers == 0 ? hw : workers));
    if (pool <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> threads;
        threads.reserve(pool);
        for (unsigned w = 0; w < pool; ++w)
            threads.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++)
                    out[i] = fn(i);
            });
    }
    return out;
}

inline RunResult run_spectrum(RunConfig const& cfg)
{
    cfg.validate();
    auto const ns = cfg.n_list.empty() ? parse_n_list("0..10") : cfg.n_list;
    RunResult res;
    Table t{{"n", "branch", "energy", "residual"}, {}};
    for (int const n : ns) {
        for (auto const branch : {spectrum::Branch::positive, spectrum::Branch::negative}) {
            if (branch == spectrum::Branch::negative && !cfg.include_negative)
                continue;
            auto const sp = spectrum::energy(n, cfg.physical, branch);
            double const r = spectrum::quantization_residual(sp.energy, n, cfg.physical);
            t.rows.push_back({std::int64_t{n}, std::string(spectrum::to_string(branch)), sp.energy, r});
        }
    }
    res.tables.push_back(std::move(t));
    res.table_keys.push_back(0);
    return res;
}

inline RunResult run_density(RunConfig const& cfg)
{
    cfg.validate();
    auto const ns = cfg.n_list.empty() ? parse_n_list("0..20") : cfg.n_list;
    bool const root = cfg.density_form == DensityForm::root;
    RunResult res;
    Table t{{"n", "energy", "rho", "form"}, {}};
    for (int const n : ns) {
        double const e = spectrum::energy(n, cfg.physical).energy;
        double const rho = root ? spectrum::level_density_sqrt(e, cfg.physical)
                                 : spectrum::level_density_consistent(e, cfg.physical);
        t.rows.push_back({std::int64_t{n}, e, rho, std::string(root ? "sqrt" : "consistent")});
    }
    res.tables.push_back(std::move(t));
    res.table_keys.push_back(0);
    return res;
}

inline RunResult run_wavefunction(RunConfig const& cfg)
{
    cfg.validate();
    struct PerN
    {
        std::optional<spectrum::WavefunctionSample> sample;
        std::string error;
    };
    auto const results = parallel_map<PerN>(cfg.n_list.size(), cfg.workers, [&](std::size_t i) {
        int const n = cfg.n_list[i];
        PerN r;
        try {
            std::vector<double> grid;
            if (cfg.y_max) {
                grid.resize(cfg.points);
                for (std::size_t k = 0; k < cfg.points; ++k)
                    grid[k] = *cfg.y_max * static_cast<double>(k) / static_cast<double>(cfg.points - 1);
            } else {
                grid = spectrum::decaying_grid(n, cfg.physical, cfg.points, cfg.heun);
            }
            r.sample = spectrum::wavefunction(n, cfg.physical, grid, true, cfg.heun);
        } catch (Error const& e) {
            r.error = e.what();
        }
        return r;
    });

    RunResult res;
    for (std::size_t i = 0; i < results.size(); ++i) {
        int const n = cfg.n_list[i];
        if (!results[i].sample) {
            res.warnings.push_back("n = " + std::to_string(n) + ": " + results[i].error);
            res.all_ok = false;
            continue;
        }
        auto const& s = *results[i].sample;
        if (!s.normalized)
            res.warnings.push_back("n = " + std::to_string(n) +
                                   ": eigenfunction has not decayed on the grid; values left unnormalized");
        Table t{{"y", "psi"}, {}};
        for (std::size_t k = 0; k < s.grid.size(); ++k)
            t.rows.push_back({s.grid[k], s.values[k]});
        res.tables.push_back(std::move(t));
        res.table_keys.push_back(n);
    }
    return res;
}

namespace detail {

struct SweepPoint
{
    std::optional<double> Z_direct, Z_em, F, U, C, rel_diff;
    std::optional<std::int64_t> terms;
    std::string error;
};

inline Cell opt_cell(std::optional<double> const& v)
{
    return v ? Cell{*v} : Cell{};
}

inline RunResult run_sweep(RunConfig const& cfg, MethodChoice method, bool with_terms)
{
    cfg.validate();
    Sweep const sw = cfg.sweep.value_or(Sweep{});
    auto const ms = sweep_points(sw);

    std::vector<double> qs = cfg.q_list;
    double energy_scale = 1.0;
    if (cfg.units.mode == UnitMode::explicit_units) {
        auto const dp = to_dimensionless(cfg.physical);
        qs = {dp.q};
        energy_scale = cfg.units.energy_factor(dp.eps);
    } else if (qs.empty()) {
        qs = default_q_values();
    }

    thermo::ThermalOptions opt;
    opt.em.order = cfg.em_order;
    opt.tol = cfg.tol;

    std::size_t const total = qs.size() * ms.size();
    auto const points = parallel_map<SweepPoint>(total, cfg.workers, [&](std::size_t idx) {
        double const q = qs[idx / ms.size()];
        double const m = ms[idx % ms.size()];
        SweepPoint sp;
        auto take = [&](thermo::ThermoPoint const& src) {
            sp.F = src.F * energy_scale;
            sp.U = src.U * energy_scale;
            sp.C = src.C;
        };
        try {
            if (method != MethodChoice::em) {
                auto const direct = thermo::thermal_functions(thermo::Method::direct, m, q, opt);
                sp.Z_direct = direct.Z;
                sp.terms = static_cast<std::int64_t>(direct.terms);
                take(direct);
            }
            if (method != MethodChoice::direct) {
                auto const em = thermo::thermal_functions(thermo::Method::euler_maclaurin, m, q, opt);
                sp.Z_em = em.Z;
                if (method == MethodChoice::em)
                    take(em);
                else
                    sp.rel_diff = std::abs(*sp.Z_direct - em.Z) / *sp.Z_direct;
            }
        } catch (Error const& e) {
            sp.error = e.what();
        }
        return sp;
    });

    RunResult res;
    Table t{{"mbar", "q", "Z_direct", "Z_em", "F", "U", "C", "rel_diff"}, {}};
    if (with_terms)
        t.columns.push_back("terms");
    double max_rel = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        double const q = qs[idx / ms.size()];
        double const m = ms[idx % ms.size()];
        auto const& sp = points[idx];
        if (!sp.error.empty()) {
            res.all_ok = false;
            res.warnings.push_back("mbar = " + format_double(m) + ", q = " + format_double(q) + ": " + sp.error);
        }
        if (sp.rel_diff)
            max_rel = std::max(max_rel, *sp.rel_diff);
        std::vector<Cell> row{m, q, opt_cell(sp.Z_direct), opt_cell(sp.Z_em), opt_cell(sp.F),
                              opt_cell(sp.U), opt_cell(sp.C), opt_cell(sp.rel_diff)};
        if (with_terms)
            row.push_back(sp.terms ? Cell{*sp.terms} : Cell{});
        t.rows.push_back(std::move(row));
    }
    if (method == MethodChoice::both)
        res.summary = "max rel_diff = " + format_double(max_rel) + " over " + std::to_string(total) + " points";
    if (!res.warnings.empty())
        res.warnings.push_back(std::to_string(res.warnings.size()) + " of " + std::to_string(total) +
                               " sweep points failed");
    res.tables.push_back(std::move(t));
    res.table_keys.push_back(0);
    return res;
}

} // namespace detail

inline RunResult run_thermo(RunConfig const& cfg)
{
    return detail::run_sweep(cfg, cfg.method, false);
}

inline RunResult run_compare(RunConfig const& cfg)
{
    return detail::run_sweep(cfg, MethodChoice::both, true);
}

inline RunResult run(RunConfig const& cfg)
{
    switch (cfg.command) {
    case Command::spectrum: return run_spectrum(cfg);
    case Command::wavefunction: return run_wavefunction(cfg);
    case Command::thermo: return run_thermo(cfg);
    case Command::compare: return run_compare(cfg);
    case Command::density: return run_density(cfg);
    }
    throw InternalError("unknown command");
}

inline char const* extension(OutputFormat f) noexcept
{
    return f == OutputFormat::csv ? ".csv" : ".json";
}

/// Output file for one table: the configured path with the format's
/// extension, suffixed with _n<k> for per-quantum-number tables.
inline std::filesystem::path output_file(RunConfig const& cfg, int key)
{
    std::filesystem::path p(cfg.output_path);
    if (cfg.command == Command::wavefunction)
        p.replace_filename(p.stem().string() + "_n" + std::to_string(key));
    p.replace_extension(extension(cfg.format));
    return p;
}

/// Writes the result to files (or `os` when no output path is set) and
/// returns the paths written. Wavefunction tables on a stream are merged
/// into one long table with an n column.
inline std::vector<std::filesystem::path> write_result(RunConfig const& cfg, RunResult const& res,
                                                       std::ostream& os)
{
    std::vector<std::filesystem::path> written;
    if (cfg.output_path.empty()) {
        if (cfg.command == Command::wavefunction) {
            Table merged{{"n", "y", "psi"}, {}};
            for (std::size_t i = 0; i < res.tables.size(); ++i)
                for (auto const& row : res.tables[i].rows) {
                    std::vector<Cell> r{std::int64_t{res.table_keys[i]}};
                    r.insert(r.end(), row.begin(), row.end());
                    merged.rows.push_back(std::move(r));
                }
            write_table(os, merged, cfg.format);
        } else {
            for (auto const& t : res.tables)
                write_table(os, t, cfg.format);
        }
        return written;
    }
    for (std::size_t i = 0; i < res.tables.size(); ++i) {
        auto const path = output_file(cfg, res.table_keys[i]);
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error("cannot open output file " + path.string());
        write_table(out, res.tables[i], cfg.format);
        if (!out)
            throw Error("failed writing " + path.string());
        written.push_back(path);
    }
    return written;
}

} // namespace kgheun::cli

#endif // KGHEUN_CLI_HPP
