#include <nlsdist/nlsdist.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

void print_line(const char* line, void*)
{
    std::fprintf(stderr, "%s\n", line);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distorted Fourier analysis and long-time dynamics of 1D cubic NLS with a potential"};
    app.set_version_flag("--version", nlsdist_version());
    app.require_subcommand(1);

    std::string config, out = "out", filter;
    bool strict = false, quiet = false;
    std::uint64_t seed = 0;
    int threads = 0;

    struct Cmd {
        const char* name;
        const char* help;
    };
    const Cmd cmds[] = {
        {"scatter", "Jost solutions, T and R on a k grid, hypothesis and genericity reports"},
        {"basis", "build and dump the distorted Fourier basis on the propagation grid"},
        {"evolve", "integrate the NLS, write snapshots and conserved quantities"},
        {"asymptotics", "profiles, phase corrections, reduced ODE and physical-space asymptotics"},
        {"verify", "run the acceptance criteria"},
    };
    for (const auto& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("-c,--config", config, "JSON config file (defaults when omitted)")->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out, "output directory")->capture_default_str();
        sub->add_flag("--strict", strict, "treat hypothesis violations as errors");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threads", threads, "OpenMP threads (0 keeps the config value)");
        sub->add_flag("-q,--quiet", quiet, "no progress lines");
        if (std::string(c.name) == "verify")
            sub->add_option("--filter", filter, "criterion id or name substring");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    std::string line;
    for (int i = 0; i < argc; ++i) line += (i ? " " : "") + std::string(argv[i]);

    nlsdist_run_options opt;
    nlsdist_run_options_init(&opt);
    opt.config_path = config.c_str();
    opt.out_dir = out.c_str();
    opt.filter = filter.c_str();
    opt.strict = strict ? 1 : 0;
    opt.has_seed = sub->count("--seed") > 0 ? 1 : 0;
    opt.seed = seed;
    opt.threads = threads;
    opt.command_line = line.c_str();
    if (!quiet) opt.log = print_line;

    nlsdist_status st = nlsdist_run(sub->get_name().c_str(), &opt);
    if (st != NLSDIST_OK) std::fprintf(stderr, "error: %s\n", nlsdist_last_error());
    return nlsdist_exit_code(st);
}
