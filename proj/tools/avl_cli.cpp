#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "avl/errors.hpp"
#include "avl/network_gen.hpp"
#include "avl/scenario.hpp"
#include "avl/signal_codes.hpp"
#include "avl/simulation.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<uint64_t> seed, bool no_dgps) {
    avl::Scenario sc = avl::load_scenario(scenario_path);
    if (seed) {
        sc.seed = *seed;
    }
    if (no_dgps) {
        sc.dgps_enabled = false;
    }
    const avl::RunReport report = avl::run_scenario(sc);
    const avl::LaneNetwork net = avl::load_network(sc.network_file);
    avl::emit_outputs(report, net, out_dir);
    std::cout << report.summary_text();
    std::cout << "outputs written to " << out_dir << "\n";
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    const avl::Scenario sc = avl::load_scenario(scenario_path);
    const auto diags = avl::validate_scenario(sc);
    bool any_error = false;
    for (const avl::Diagnostic& d : diags) {
        std::cout << (d.is_error ? "error" : "warning") << ": " << d.field << ": "
                  << d.message << "\n";
        any_error = any_error || d.is_error;
    }
    if (diags.empty()) {
        std::cout << "scenario ok\n";
    }
    return any_error ? 1 : 0;
}

int cmd_gen_network(const std::string& spec_path, const std::string& out_path) {
    const avl::NetworkGenSpec spec = avl::parse_network_gen_spec(read_file(spec_path));
    const avl::LaneNetwork net = avl::generate_lane_grid(spec);
    avl::save_network(net, out_path);
    double total = 0.0;
    for (const auto& lane : net.lanes()) {
        total += lane.total_length_km();
    }
    std::cout << net.lanes().size() << " lanes, " << total << " km total, written to "
              << out_path << "\n";
    return 0;
}

int cmd_codes(int prn) {
    const avl::PrnCode code = avl::generate_ca_code(prn);
    for (size_t i = 0; i < code.chips.size(); ++i) {
        std::putchar(code.chips[i] ? '1' : '0');
        if (i % 64 == 63) {
            std::putchar('\n');
        }
    }
    std::putchar('\n');
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lane-level vehicle location simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", spec_path, out_path;
    std::optional<uint64_t> seed;
    bool no_dgps = false;
    int prn = 1;

    auto* run = app.add_subcommand("run", "run a scenario and write result files");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_flag("--no-dgps", no_dgps, "disable differential corrections");

    auto* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("scenario", scenario_path, "scenario file")->required();

    auto* gen = app.add_subcommand("gen-network", "generate a parallel-lane network");
    gen->add_option("spec", spec_path, "generation spec file")->required();
    gen->add_option("out", out_path, "output network file")->required();

    auto* codes = app.add_subcommand("codes", "print a C/A code");
    codes->add_option("--prn", prn, "satellite PRN, 1..32")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) {
            return cmd_run(scenario_path, out_dir, seed, no_dgps);
        }
        if (app.got_subcommand(validate)) {
            return cmd_validate(scenario_path);
        }
        if (app.got_subcommand(gen)) {
            return cmd_gen_network(spec_path, out_path);
        }
        if (app.got_subcommand(codes)) {
            return cmd_codes(prn);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
