#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "dpw/capacity/capacity.hpp"
#include "dpw/error.hpp"
#include "dpw/io/csv.hpp"
#include "dpw/io/serialize.hpp"
#include "dpw/lab/convergence.hpp"
#include "dpw/lab/gaps.hpp"
#include "dpw/solvable1d/spectrum1d.hpp"
#include "dpw/waveguide/assemble.hpp"
#include "dpw/waveguide/modes.hpp"

namespace dpw::cli {

namespace {

class Stage {
public:
    Stage(RunLog& log, std::string name) : log_(log), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
    ~Stage() {
        const auto dt = std::chrono::steady_clock::now() - t0_;
        log_.stages.emplace_back(name_, std::chrono::duration<double>(dt).count());
    }

private:
    RunLog& log_;
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
};

std::ofstream open(RunLog& log, const std::string& name) {
    const auto path = log.add_output(name);
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    return os;
}

void write_json(RunLog& log, const std::string& name, const io::Json& j) { open(log, name) << j.dump(2) << '\n'; }

waveguide::Grading grading_with_breakpoints(const Config& cfg, double a, double b) {
    auto gr = cfg.grading();
    for (double t : cfg.potential().breakpoints_in(a, b)) gr.z_lines.push_back(t);
    return gr;
}

void eig1d(const Config& cfg, RunLog& log) {
    solvable1d::PointModel1d model;
    model.L_minus = cfg.L_minus;
    model.L_plus = cfg.L_plus;
    model.interaction = cfg.point_interaction();
    model.potential = cfg.potential();
    linalg::Spectrum spec;
    {
        Stage s(log, "solve");
        spec = solvable1d::eigenvalues_1d(model, cfg.m);
    }
    Stage s(log, "write");
    {
        auto os = open(log, "spectrum.csv");
        io::write_spectrum_csv(os, spec);
    }
    write_json(log, "spectrum.json", io::to_json(spec));
}

void eig2d(const Config& cfg, RunLog& log) {
    const auto geom = cfg.geometry();
    waveguide::Mesh2d mesh;
    {
        Stage s(log, "mesh");
        mesh = waveguide::build_mesh(geom, grading_with_breakpoints(cfg, geom.L_minus, geom.L_plus));
    }
    waveguide::ModeResult modes;
    {
        Stage s(log, "solve");
        const auto pair = waveguide::assemble(mesh, cfg.potential());
        modes = waveguide::solve_modes(pair, cfg.m, cfg.tol, cfg.seed);
    }
    Stage s(log, "write");
    {
        auto os = open(log, "spectrum.csv");
        io::write_spectrum_csv(os, modes.spectrum);
    }
    auto j = io::to_json(modes.spectrum);
    j["d"] = geom.d;
    j["nodes"] = mesh.node_count();
    j["elements"] = mesh.elements.size();
    write_json(log, "spectrum.json", j);
    for (std::size_t k = 0; k < modes.vectors.size(); ++k) {
        const auto profile = waveguide::cross_section_average(mesh, modes.vectors[k], geom);
        {
            auto os = open(log, "profile_" + std::to_string(k + 1) + ".csv");
            waveguide::write_profile_csv(os, profile);
        }
    }
}

void capacity_cmd(const Config& cfg, RunLog& log) {
    std::vector<io::CapacityRow> rows;
    {
        Stage s(log, "solve");
        for (double h : cfg.half_widths) {
            const capacity::WindowSpec spec{2, h, cfg.cap_r, {}};
            const double asym = capacity::cap_asymptotic(spec);
            for (int level : cfg.levels) {
                capacity::CapacityMeshParams p;
                p.n_phi = cfg.n_phi;
                p.level = level;
                const auto r = capacity::cap_numeric_2d(spec, p);
                rows.push_back({h, cfg.cap_r, level, r.energy, r.flux, asym, capacity::relative_gap(r.energy, r.flux)});
            }
        }
    }
    Stage s(log, "write");
    {
        auto os = open(log, "capacity.csv");
        io::write_capacity_csv(os, rows);
    }
}

void converge(const Config& cfg, int threads, RunLog& log) {
    Config base = cfg;
    base.gamma.reset();
    lab::StudyConfig sc;
    sc.geometry = base.geometry();
    if (!std::isinf(cfg.study_gamma)) sc.gamma = cfg.study_gamma;
    sc.eps_list = cfg.study_eps;
    sc.potential = cfg.potential();
    sc.m = cfg.m;
    sc.grading = cfg.grading();
    sc.richardson = cfg.richardson;
    sc.tol = cfg.tol;
    sc.cutoff = cfg.cutoff;
    sc.threads = threads;
    sc.seed = cfg.seed;
    lab::StudyResult res;
    {
        Stage s(log, "study");
        res = lab::convergence_study(sc);
    }
    Stage s(log, "write");
    {
        auto os = open(log, "study.csv");
        io::write_study_csv(os, res);
    }
    write_json(log, "summary.json", io::summary_json(res));
}

void bands(const Config& cfg, int threads, RunLog& log) {
    lab::GapConfig gc;
    gc.geometry = cfg.geometry();
    gc.period = cfg.period;
    gc.gamma = cfg.bands_gamma;
    gc.potential = cfg.potential();
    gc.lambda_max = cfg.lambda_max;
    gc.thetas = cfg.thetas;
    gc.grading = cfg.grading();
    gc.tol = cfg.tol;
    gc.threads = threads;
    gc.seed = cfg.seed;
    lab::GapReport rep;
    {
        Stage s(log, "bands");
        rep = lab::gap_comparison_study(gc);
    }
    Stage s(log, "write");
    {
        auto os = open(log, "waveguide_bands.csv");
        io::write_bands_csv(os, rep.waveguide);
    }
    {
        auto os = open(log, "kp_bands.csv");
        io::write_bands_csv(os, rep.kp);
    }
    {
        auto os = open(log, "gaps.csv");
        io::write_gaps_csv(os, rep);
    }
    write_json(log, "summary.json", io::summary_json(rep));
}

}  // namespace

std::filesystem::path RunLog::add_output(const std::string& name) {
    outputs.push_back(out_dir / name);
    return outputs.back();
}

void run_command(const std::string& command, const Config& cfg, int threads, RunLog& log) {
    if (command == "eig1d")
        eig1d(cfg, log);
    else if (command == "eig2d")
        eig2d(cfg, log);
    else if (command == "capacity")
        capacity_cmd(cfg, log);
    else if (command == "converge")
        converge(cfg, threads, log);
    else if (command == "bands")
        bands(cfg, threads, log);
    else
        throw ContractError("unknown subcommand '" + command + "'");
}

}  // namespace dpw::cli
