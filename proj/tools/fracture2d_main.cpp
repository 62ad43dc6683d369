// Experiment driver: run config-described experiments, validate configs,
// regenerate reports, and expose the cleavage / gamma studies directly.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracture/cleavage.hpp"
#include "fracture/config.hpp"
#include "fracture/experiments.hpp"
#include "fracture/gamma.hpp"

int main(int argc, char** argv) {
    CLI::App app{"2D linearized Griffith fracture toolkit"};
    app.require_subcommand(1);

    // run
    std::string run_config, run_out;
    auto* run = app.add_subcommand("run", "execute an experiment described by a config file");
    run->add_option("--config", run_config, "config file")->required();
    run->add_option("--out-root", run_out, "output root directory override");

    // validate
    std::string val_config;
    auto* validate = app.add_subcommand("validate", "schema-check and lint a config file");
    validate->add_option("--config", val_config, "config file")->required();

    // report
    std::string report_dir;
    auto* report = app.add_subcommand("report", "regenerate summary.txt from an artifact directory");
    report->add_option("--dir", report_dir, "artifact directory")->required();

    // cleavage
    double cl_l = 1.0, cl_eta = 0.03125;
    int cl_nx = 64, cl_ny = 64;
    bool cl_alpha_from_density = true;
    std::string cl_a_grid = "-1.5:0.25:1.5", cl_eps_grid = "1e-4", cl_mode = "candidates";
    std::string cl_density = "dist2", cl_out;
    auto* cleav = app.add_subcommand("cleavage", "uniaxial tension/compression sweep");
    cleav->add_option("--l", cl_l, "strip length");
    cleav->add_option("--nx", cl_nx, "cells across (0,l)");
    cleav->add_option("--ny", cl_ny, "cells across (0,1)");
    cleav->add_option("--eta", cl_eta, "collar width (snapped to whole cell columns)");
    cleav->add_flag("--alpha-from-density,!--no-alpha-from-density", cl_alpha_from_density,
                    "derive alpha from the density Hessian (always recorded)");
    cleav->add_option("--a-grid", cl_a_grid, "limit strains, list or start:step:stop");
    cleav->add_option("--eps-grid", cl_eps_grid, "eps values, decreasing");
    cleav->add_option("--mode", cl_mode, "candidates|alternating|both");
    cleav->add_option("--density", cl_density, "density id (dist2|stvk)");
    cleav->add_option("--out", cl_out, "output root directory");

    // gamma
    std::string ga_triple, ga_eps_grid = "1e-2,1e-3,1e-4,1e-5,1e-6", ga_xi = "e1";
    std::string ga_sigma_grid = "0,0.1,0.5,1.0", ga_out, ga_density = "dist2";
    auto* gamma = app.add_subcommand("gamma", "recovery-sequence rates and slicing measures");
    gamma->add_option("--triple", ga_triple, "limit triple JSON file (demo triple when omitted)");
    gamma->add_option("--eps-grid", ga_eps_grid, "eps values, decreasing");
    gamma->add_option("--xi", ga_xi, "slice direction e1|e2");
    gamma->add_option("--sigma-grid", ga_sigma_grid, "theta_sigma truncations");
    gamma->add_option("--density", ga_density, "density id");
    gamma->add_option("--out", ga_out, "output root directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const fracture::Config cfg = fracture::Config::parse_file(run_config);
            const fracture::RunResult res = fracture::run_experiment(cfg, run_out);
            if (!res.ok) {
                std::cerr << res.error;
                return 1;
            }
            std::cout << "artifacts: " << res.dir << "\n" << res.summary;
            return 0;
        }
        if (*validate) {
            const fracture::Config cfg = fracture::Config::parse_file(val_config);
            const auto problems = fracture::validate_config(cfg);
            if (problems.empty()) {
                std::cout << "ok: no problems found\n";
                return 0;
            }
            for (const auto& p : problems)
                std::cout << cfg.origin() << ':' << p.line << ": " << p.path << ": " << p.message
                          << "\n";
            return 2;
        }
        if (*report) {
            std::cout << fracture::regenerate_summary(report_dir);
            return 0;
        }
        if (*cleav) {
            // Snap the collar to whole columns and hand over to the driver.
            const double hx = cl_l / cl_nx;
            const int collar = cl_eta > 0.0 ? std::max(1, static_cast<int>(std::lround(cl_eta / hx)))
                                            : 0;
            std::ostringstream cfg_text;
            cfg_text << "experiment = cleavage\n[mesh]\nl = " << cl_l << "\nnx = " << cl_nx
                     << "\nny = " << cl_ny << "\ncollar_cols = " << std::max(collar, 1)
                     << "\n[density]\nid = " << cl_density << "\n[cleavage]\na_grid = " << cl_a_grid
                     << "\neps_grid = " << cl_eps_grid << "\nmode = " << cl_mode << "\n";
            const fracture::Config cfg = fracture::Config::parse_text(cfg_text.str(), "<cleavage>");
            const fracture::RunResult res = fracture::run_experiment(cfg, cl_out);
            if (!res.ok) {
                std::cerr << res.error;
                return 1;
            }
            if (!cl_alpha_from_density)
                std::cout << "note: alpha is always derived from the density Hessian\n";
            std::cout << "artifacts: " << res.dir << "\n" << res.summary;
            return 0;
        }
        if (*gamma) {
            std::ostringstream cfg_text;
            cfg_text << "experiment = gamma\n[density]\nid = " << ga_density << "\n[gamma]\n";
            if (!ga_triple.empty()) cfg_text << "triple = " << ga_triple << "\n";
            cfg_text << "eps_grid = " << ga_eps_grid << "\nxi = " << ga_xi
                     << "\nsigma_grid = " << ga_sigma_grid << "\n";
            const fracture::Config cfg = fracture::Config::parse_text(cfg_text.str(), "<gamma>");
            const fracture::RunResult res = fracture::run_experiment(cfg, ga_out);
            if (!res.ok) {
                std::cerr << res.error;
                return 1;
            }
            std::cout << "artifacts: " << res.dir << "\n" << res.summary;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
