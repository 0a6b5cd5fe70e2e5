// kgheun: bound states and thermodynamics of the Klein-Gordon equation with
// the scalar potential a1 + a2|x| + a3/|x|.
//
// Exit codes: 0 success, 1 computation or I/O failure, 2 usage error.

#include <kgheun/cli.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <utility>
#include <vector>
#include <string>
#include <unistd.h>

namespace {

bool use_color()
{
    char const* no_color = std::getenv("NO_COLOR");
    return (no_color == nullptr || *no_color == '\0') && ::isatty(STDERR_FILENO);
}

void diagnose(char const* level, std::string const& msg)
{
    bool const color = use_color();
    std::string const tag = std::string(level) == "error" ? "\033[31m" : "\033[33m";
    std::cerr << "kgheun: " << (color ? tag : "") << level << (color ? "\033[0m" : "") << ": " << msg
              << '\n';
}

// Maps a choice name to the enum's integer value, with a readable error.
template <class E>
CLI::Validator choice(std::vector<std::pair<std::string, E>> items)
{
    std::string names;
    for (auto const& [name, value] : items)
        names += (names.empty() ? "" : ", ") + name;
    return CLI::Validator(
        [items, names](std::string& text) -> std::string {
            for (auto const& [name, value] : items)
                if (name == text) {
                    text = std::to_string(static_cast<int>(value));
                    return {};
                }
            return "expected one of " + names + ", got '" + text + "'";
        },
        "");
}

} // namespace

int main(int argc, char** argv)
{
    using namespace kgheun;
    using namespace kgheun::cli;

    CLI::App app{"Klein-Gordon bound states, eigenfunctions and thermal functions for "
                 "V(x) = a1 + a2|x| + a3/|x|"};
    app.set_config("--config", "", "Flat key = value file mirroring the long flag names");
    app.require_subcommand(1, 1);

    RunConfig cfg;
    Sweep sweep;
    std::string n_text;
    std::string units_text = "natural";

    app.add_option("--a1", cfg.physical.a1, "Constant potential shift");
    app.add_option("--a2", cfg.physical.a2, "Linear strength (> 0)");
    app.add_option("--a3", cfg.physical.a3, "Inverse-linear strength (>= 0)");
    app.add_option("--mass", cfg.physical.mass, "Rest energy m c^2");
    app.add_option("--hbar-c", cfg.physical.hbar_c, "hbar c (> 0)");
    app.add_option("--q", cfg.q_list, "Comma-separated q values (default 0.5,1,1.5)")->delimiter(',');
    app.add_option("--n", n_text, "Quantum numbers, e.g. 0..3 or 0,5,10");
    app.add_option("--mbar-min", sweep.mbar_min, "Sweep start");
    app.add_option("--mbar-max", sweep.mbar_max, "Sweep end");
    app.add_option("--steps", sweep.steps, "Sweep points (>= 2)");
    app.add_option("--scale", sweep.scale, "Sweep spacing")
        ->transform(choice<SweepScale>({{"log", SweepScale::log}, {"linear", SweepScale::linear}}))
        ->option_text("{log,linear}");
    app.add_option("--method", cfg.method, "Partition function source (default both)")
        ->transform(choice<MethodChoice>(
            {{"direct", MethodChoice::direct}, {"em", MethodChoice::em}, {"both", MethodChoice::both}}))
        ->option_text("{direct,em,both}");
    app.add_option("--em-order", cfg.em_order, "Euler-MacLaurin Bernoulli pairs (1 or 2)");
    app.add_option("--tol", cfg.tol, "Direct-sum tail tolerance");
    app.add_option("--format", cfg.format, "Output format")
        ->transform(choice<OutputFormat>({{"csv", OutputFormat::csv}, {"json", OutputFormat::json}}))
        ->option_text("{csv,json}");
    app.add_option("--out", cfg.output_path, "Output path (extension set by --format)");
    app.add_flag("--negative", cfg.include_negative, "spectrum: include the negative branch");
    app.add_option("--points", cfg.points, "wavefunction: grid points");
    app.add_option("--y-max", cfg.y_max, "wavefunction: grid end (default: automatic)");
    app.add_option("--heun", cfg.heun, "wavefunction: Heun factor evaluation")
        ->transform(choice<spectrum::HeunFactor>(
            {{"polynomial", spectrum::HeunFactor::polynomial}, {"series", spectrum::HeunFactor::series}}))
        ->option_text("{polynomial,series}");
    app.add_option("--density-form", cfg.density_form, "density: level density form")
        ->transform(choice<DensityForm>(
            {{"consistent", DensityForm::consistent}, {"sqrt", DensityForm::root}}))
        ->option_text("{consistent,sqrt}");
    app.add_option("--units", units_text, "thermo/compare: natural or explicit")
        ->check(CLI::IsMember({"natural", "explicit"}))
        ->option_text("{natural,explicit}");
    app.add_option("--workers", cfg.workers, "Worker threads (0: all cores)");

    struct Sub
    {
        char const* name;
        char const* help;
        Command command;
    };
    for (auto const& s : {Sub{"spectrum", "Energy levels with quantization residuals", Command::spectrum},
                          Sub{"wavefunction", "Sampled eigenfunctions, one file per n", Command::wavefunction},
                          Sub{"thermo", "Z, F, U, C over an mbar sweep", Command::thermo},
                          Sub{"compare", "Direct sum vs Euler-MacLaurin over an mbar sweep", Command::compare},
                          Sub{"density", "Single-particle level density", Command::density}}) {
        app.add_subcommand(s.name, s.help)->fallthrough()->final_callback([&cfg, c = s.command] {
            cfg.command = c;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        diagnose("error", e.what());
        std::cerr << "Run with --help for usage.\n";
        return 2;
    }

    RunResult result;
    try {
        if (!n_text.empty())
            cfg.n_list = parse_n_list(n_text);
        cfg.units.mode = units_text == "explicit" ? UnitMode::explicit_units : UnitMode::natural;
        if (cfg.command == Command::thermo || cfg.command == Command::compare)
            cfg.sweep = sweep;
        cfg.validate();
    } catch (Error const& e) {
        diagnose("error", e.what());
        return 2;
    }

    try {
        result = run(cfg);
        write_result(cfg, result, std::cout);
    } catch (Error const& e) {
        diagnose("error", e.what());
        return 1;
    }

    for (auto const& w : result.warnings)
        diagnose("warning", w);
    if (!result.summary.empty())
        std::cerr << result.summary << '\n';
    return result.all_ok ? 0 : 1;
}
