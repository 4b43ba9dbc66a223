// Command-line driver: frequency sweeps, convergence studies, the
// numerical self-test, and a mesh dump for debugging.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include "axibem/axibem.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw axibem::ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("AXIBEM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

std::vector<int> parse_levels(const std::string& arg) {
    std::vector<int> levels;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        levels.push_back(std::stoi(tok));
        if (levels.back() < 4) throw axibem::ConfigError("--levels entries must be >= 4");
    }
    if (levels.size() < 3) throw axibem::ConfigError("--levels needs at least 3 mesh levels");
    return levels;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"axibem: axisymmetric eddy-current Galerkin BEM"};
    app.require_subcommand(1);

    std::string config_path, out_path, levels_arg = "40,80,160,320";
    int order_override = 0, threads = 0;

    auto add_common = [&](CLI::App* cmd, bool with_config) {
        if (with_config)
            cmd->add_option("config", config_path, "JSON run configuration")->required();
        cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_option("--threads", threads,
                        "worker threads (default: AXIBEM_THREADS or all cores)");
        cmd->add_option("--order", order_override, "element order override (1 or 2)")
            ->check(CLI::IsMember({1, 2}));
    };

    CLI::App* sweep = app.add_subcommand("sweep", "frequency sweep, CSV per frequency");
    add_common(sweep, true);
    CLI::App* conv = app.add_subcommand("converge", "mesh convergence study, CSV per level");
    add_common(conv, true);
    conv->add_option("--levels", levels_arg, "comma-separated n_s list (>= 3 levels)");
    CLI::App* self = app.add_subcommand("selftest", "run the numerical self-test");
    add_common(self, false);
    CLI::App* meshcmd = app.add_subcommand("mesh", "dump the mesh as text (debugging aid)");
    add_common(meshcmd, true);

    CLI11_PARSE(app, argc, argv);

    std::ofstream file;
    try {
        if (self->parsed()) {
            std::ostream& os = open_output(out_path, file);
            return axibem::run_selftest(os) == 0 ? 0 : 2;
        }
        axibem::RunConfig cfg = axibem::parse_config(read_file(config_path));
        if (order_override != 0) cfg.order = order_override;
        const int n_threads = resolve_threads(threads);

        if (sweep->parsed()) {
            const auto rows = axibem::run_sweep(cfg, n_threads);
            std::ostream& os = open_output(out_path, file);
            axibem::write_sweep_csv(os, rows);
            int rc = 0;
            for (const auto& row : rows)
                if (!row.ok) {
                    std::cerr << "frequency " << row.result.frequency
                              << " Hz failed: " << row.error << "\n";
                    rc = 2;
                }
            return rc;
        }
        if (conv->parsed()) {
            const auto levels = parse_levels(levels_arg);
            const auto rep = axibem::run_convergence(cfg, levels, n_threads);
            std::ostream& os = open_output(out_path, file);
            axibem::write_convergence_csv(os, rep);
            return 0;
        }
        if (meshcmd->parsed()) {
            const auto mesh = axibem::build_mesh(cfg);
            std::ostream& os = open_output(out_path, file);
            axibem::write_mesh_text(mesh, os);
            return 0;
        }
    } catch (const axibem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
