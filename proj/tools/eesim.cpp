#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "eesim/config.hpp"
#include "eesim/errors.hpp"
#include "eesim/verify.hpp"

namespace {

int do_spectrum(const std::string &config_path) {
    const eesim::ResolvedRun run =
        eesim::resolve(eesim::parse_config_file(config_path));
    std::cout << eesim::spectrum_report(run);
    return 0;
}

int do_run(const std::string &config_path, const std::string &out_override,
           bool dry_run) {
    const eesim::ResolvedRun run =
        eesim::resolve(eesim::parse_config_file(config_path));
    const std::string out =
        out_override.empty() ? run.cfg.directory : out_override;
    const eesim::RunArtifacts art = eesim::execute_run(run, out, dry_run);
    for (const auto &[k, v] : art.summary)
        std::printf("%-24s %s\n", k.c_str(), v.c_str());
    std::printf("manifest: %s\n", art.manifest_path.c_str());
    return 0;
}

int do_verify() {
    const auto checks = eesim::run_verification();
    bool all_pass = true;
    for (const auto &c : checks) {
        std::printf("%-32s %-4s %.3e  %s\n", c.name.c_str(),
                    c.pass ? "ok" : "FAIL", c.metric, c.detail.c_str());
        all_pass = all_pass && c.pass;
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"embedded-eigenstate simulator"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    bool dry_run = false;

    auto *spectrum =
        app.add_subcommand("spectrum", "print derived frequencies and spectra");
    spectrum->add_option("config", config_path, "run configuration file")
        ->required();

    auto *runcmd = app.add_subcommand("run", "execute a configured experiment");
    runcmd->add_option("config", config_path, "run configuration file")
        ->required();
    runcmd->add_option("--out", out_override, "output directory override");
    runcmd->add_flag("--dry-run", dry_run, "resolve and write the manifest only");

    auto *verify =
        app.add_subcommand("verify", "run the fast oracle suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed())
            return do_spectrum(config_path);
        if (runcmd->parsed())
            return do_run(config_path, out_override, dry_run);
        if (verify->parsed())
            return do_verify();
    } catch (const eesim::ConfigError &err) {
        std::fprintf(stderr, "%s\n", err.what());
        return 2;
    } catch (const eesim::SimulationError &err) {
        std::fprintf(stderr, "%s\n", err.what());
        return 3;
    } catch (const std::exception &err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 3;
    }
    return 0;
}
