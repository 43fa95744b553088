#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <helmtrace/sweep.hpp>

namespace {

struct CliOverrides {
    double sigma_min = 0.0, sigma_max = 0.0, mesh_h = 0.0, rho = 0.0;
    int sigma_points = 0, kmax = 0;
    std::string out;
};

void add_shared_options(CLI::App* sub, std::string& config_path, CliOverrides& ov) {
    // free the short -h for the mesh-size option below
    sub->set_help_flag("--help", "print this help message and exit");
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--sigma-min", ov.sigma_min, "low end of the sigma grid");
    sub->add_option("--sigma-max", ov.sigma_max, "high end of the sigma grid");
    sub->add_option("--sigma-points", ov.sigma_points, "number of log-spaced sigma points");
    sub->add_option("--kmax", ov.kmax, "largest trace mode");
    sub->add_option("--h", ov.mesh_h, "mesh size for the finite element runs");
    sub->add_option("--rho", ov.rho, "annulus inner radius");
    sub->add_option("--out", ov.out, "output directory for CSV reports");
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << body;
}

int run_report_command(const std::string& name, const helmtrace::SweepConfig& cfg) {
    std::vector<helmtrace::MeasuredConstant> consts;
    helmtrace::SweepReport rep;
    if (name == "characterize") rep = helmtrace::cmd_characterize(cfg, consts);
    else if (name == "scaling") rep = helmtrace::cmd_scaling(cfg, consts);
    else if (name == "compare") rep = helmtrace::cmd_compare(cfg, consts);
    else if (name == "extension_sets") rep = helmtrace::cmd_extension_sets(cfg, consts);
    else if (name == "trace") rep = helmtrace::cmd_trace(cfg, consts);
    else if (name == "fem_validate") rep = helmtrace::cmd_fem_validate(cfg, consts);
    else throw std::logic_error("unknown report command " + name);

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ostringstream body;
        helmtrace::write_report_csv(rep, body);
        write_file(std::filesystem::path(cfg.out_dir) / (name + ".csv"), body.str());
    }
    {
        std::ostringstream body;
        helmtrace::write_constants_csv(consts, cfg, body);
        write_file(std::filesystem::path(cfg.out_dir) / "constants.csv", body.str());
    }
    std::printf("[%s] %zu rows, worst margin %.6g\n", name.c_str(), rep.rows.size(),
                rep.worst_margin);
    for (const auto& c : consts)
        std::printf("[%s] %s = %.12g (%s)\n", name.c_str(), c.name.c_str(), c.value,
                    c.geometry.c_str());
    for (const auto& v : rep.violations) std::printf("[violation] %s\n", v.c_str());
    if (!rep.all_pass()) {
        std::printf("[%s] %zu violation(s)\n", name.c_str(), rep.violations.size());
        return 1;
    }
    std::printf("[%s] all rows pass\n", name.c_str());
    return 0;
}

int run_bio(const helmtrace::SweepConfig& cfg) {
    auto res = helmtrace::cmd_bio(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ostringstream body;
        res.report.write_csv(body);
        write_file(std::filesystem::path(cfg.out_dir) / "bio.csv", body.str());
    }
    {
        std::ostringstream body;
        helmtrace::write_constants_csv({}, cfg, body);
        write_file(std::filesystem::path(cfg.out_dir) / "constants.csv", body.str());
    }
    std::printf("[bio] %zu rows, worst margin %.6g (%s, k=%d)\n", res.report.rows.size(),
                res.report.worst_margin, res.report.worst_bound.c_str(),
                res.report.worst_k);
    for (const auto& v : res.violations) std::printf("[violation] %s\n", v.c_str());
    if (!res.report.all_pass) {
        std::printf("[bio] %zu violation(s)\n", res.violations.size());
        return 1;
    }
    std::printf("[bio] all rows pass\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavenumber-weighted trace norm laboratory"};
    app.require_subcommand(1);
    std::string config_path;
    CliOverrides ov;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"selftest", "fast consistency gate over the special function core"},
        {"characterize", "minimal-extension weights against the Gagliardo weights"},
        {"scaling", "sigma-dependence of the weights against sigma = 1"},
        {"compare", "standard vs alternative norms on the annulus"},
        {"extension_sets", "weights across different extension domains"},
        {"trace", "trace inequality and finite element cross-checks"},
        {"bio", "boundary integral operator bound sweep"},
        {"fem_validate", "finite element refinement study"},
    };
    for (const auto& [name, desc] : commands)
        add_shared_options(app.add_subcommand(name, desc), config_path, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    CLI::App* sub = app.get_subcommands().front();

    try {
        helmtrace::SweepConfig cfg;
        if (sub->count("--config") > 0)
            cfg = helmtrace::load_config_file(config_path, cfg);
        if (sub->count("--sigma-min") > 0) cfg.sigma_min = ov.sigma_min;
        if (sub->count("--sigma-max") > 0) cfg.sigma_max = ov.sigma_max;
        if (sub->count("--sigma-points") > 0) cfg.sigma_points = ov.sigma_points;
        if (sub->count("--kmax") > 0) cfg.mode_max = ov.kmax;
        if (sub->count("--h") > 0) cfg.mesh_h = ov.mesh_h;
        if (sub->count("--rho") > 0) cfg.annulus_rho = ov.rho;
        if (sub->count("--out") > 0) cfg.out_dir = ov.out;
        cfg.validate();

        const std::string name = sub->get_name();
        if (name == "selftest") return helmtrace::cmd_selftest(std::cout);
        if (name == "bio") return run_bio(cfg);
        return run_report_command(name, cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
