#include "fracture/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fracture/cleavage.hpp"
#include "fracture/gamma.hpp"
#include "fracture/rigidity.hpp"

namespace fracture {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", std::localtime(&tt));
    return buf;
}

fs::path fresh_run_dir(const std::string& root, const std::string& experiment) {
    fs::create_directories(root);
    const std::string stamp = timestamp_now();
    fs::path dir = fs::path(root) / (experiment + "-" + stamp);
    for (int k = 1; fs::exists(dir); ++k)
        dir = fs::path(root) / (experiment + "-" + stamp + "-" + std::to_string(k));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

json config_echo(const Config& cfg) {
    json echo;
    for (const auto& [section, kv] : cfg.sections()) {
        json s;
        for (const auto& [k, v] : kv) s[k] = v;
        echo[section.empty() ? "_top" : section] = s;
    }
    return echo;
}

json quadratic_form_json(const QuadraticForm& q) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i)
        rows.push_back({q.m[static_cast<size_t>(i)][0], q.m[static_cast<size_t>(i)][1],
                        q.m[static_cast<size_t>(i)][2]});
    return rows;
}

GridMesh mesh_from_config(const Config& cfg, double default_l, int default_nx, int default_ny,
                          int default_collar) {
    return GridMesh(cfg.get_double("mesh", "l", default_l), cfg.get_int("mesh", "nx", default_nx),
                    cfg.get_int("mesh", "ny", default_ny),
                    cfg.get_int("mesh", "collar_cols", default_collar));
}

// ---------------------------------------------------------------------------

struct ExperimentOutput {
    std::vector<std::pair<std::string, std::string>> files;
    std::string summary;
    json extra_manifest;
};

ExperimentOutput run_cleavage(const Config& cfg, const EnergyDensity& density, double box_m) {
    const GridMesh mesh = mesh_from_config(cfg, 1.0, 64, 64, 2);
    const std::vector<double> a_grid = cfg.require_list("cleavage", "a_grid");
    const std::vector<double> eps_grid = cfg.require_list("cleavage", "eps_grid");
    const std::string mode_name = cfg.get_string("cleavage", "mode", "candidates");
    const SolveMode mode = mode_name == "alternating"
                               ? SolveMode::Alternating
                               : (mode_name == "both" ? SolveMode::Both : SolveMode::Candidates);

    const CleavageProblem prototype =
        make_cleavage_problem(mesh.length, mesh.nx - 2 * mesh.collar_cols, mesh.ny,
                              mesh.collar_cols, 0.0, eps_grid.front(), density, box_m);
    const SweepTable table = sweep_cleavage(a_grid, eps_grid, prototype, mode);

    ExperimentOutput out;
    out.files.emplace_back("sweep.csv", sweep_to_csv(table, prototype, mode));
    out.files.emplace_back("energy_vs_a.dat", sweep_to_dat(table));

    json reports = json::array();
    for (const SweepRow& r : table.rows)
        reports.push_back({{"eps", r.eps},
                           {"a", r.a},
                           {"candidate_total", r.candidate_total},
                           {"alternating_total", r.alternating_total},
                           {"candidate_kind", r.candidate_kind},
                           {"alternating_kind", r.alternating_kind},
                           {"crack_x", r.crack_x},
                           {"jump1", r.jump1},
                           {"formula", r.formula},
                           {"rel_gap", r.rel_gap}});
    out.files.emplace_back("reports.json", reports.dump(2));

    double max_gap = 0.0, max_asym = 0.0;
    for (const SweepRow& r : table.rows) {
        max_gap = std::max(max_gap, r.rel_gap);
        for (const SweepRow& s : table.rows)
            if (s.eps == r.eps && s.a == -r.a)
                max_asym = std::max(
                    max_asym, std::fabs((std::isnan(r.candidate_total) ? r.alternating_total
                                                                       : r.candidate_total) -
                                        (std::isnan(s.candidate_total) ? s.alternating_total
                                                                       : s.candidate_total)));
    }
    std::ostringstream sum;
    sum.precision(10);
    sum << "cleavage sweep\n"
        << "alpha = " << table.alpha << "\n"
        << "formula crossover a* = " << table.a_star << "\n"
        << "printed a_crit = " << table.a_crit_printed
        << " (differs from the formula crossover unless alpha = 1; suspected misprint, both "
           "recorded)\n"
        << "rows = " << table.rows.size() << "\n"
        << "max relative gap vs min(alpha l a^2/2, 1) = " << max_gap << "\n"
        << "max |E(a) - E(-a)| = " << max_asym << "\n";
    out.summary = sum.str();
    out.extra_manifest = {{"a_star", table.a_star}, {"a_crit_printed", table.a_crit_printed}};
    return out;
}

LimitTriple demo_triple() {
    // Two rigid pieces with a displacement jump across x = 1/2.
    GridMesh mesh(1.0, 16, 16, 0);
    CacciopPartition part = trivial_partition(mesh);
    PiecewiseRigidMotion motion;
    motion.comp.push_back(RigidMotion{});
    DisplacementField u = make_field(mesh);
    const int v = crack_column_near(mesh, 0.5);
    const double xs = column_x(mesh, v);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        u.grad[sc] = Mat2::zero();
        u.shift[sc] = mesh.cell_center(c).x < xs ? Vec2{0.0, 0.0} : Vec2{0.3, 0.1};
    }
    for (int j = 0; j < mesh.ny; ++j) u.open[static_cast<size_t>(mesh.vertical_facet(v, j))] = 1;
    return {std::move(u), std::move(part), std::move(motion)};
}

ExperimentOutput run_gamma(const Config& cfg, const EnergyDensity& density, double box_m) {
    LimitTriple t;
    if (cfg.has("gamma", "triple")) {
        std::ifstream in(cfg.get_string("gamma", "triple"));
        if (!in) throw std::invalid_argument("gamma: cannot open triple file");
        std::ostringstream buf;
        buf << in.rdbuf();
        t = triple_from_json(buf.str());
    } else {
        t = demo_triple();
    }
    std::vector<double> eps_grid = cfg.get_list("gamma", "eps_grid");
    if (eps_grid.empty()) eps_grid = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    std::vector<double> sigma_grid = cfg.get_list("gamma", "sigma_grid");
    if (sigma_grid.empty()) sigma_grid = {0.0, 0.1, 0.5, 1.0};
    const Axis xi = cfg.get_string("gamma", "xi", "e1") == "e2" ? Axis::X2 : Axis::X1;

    const QuadraticForm q = hessian_q(density);
    const EnergyBreakdown limit = energy_limit(t, q);
    const auto ys = recovery_sequence(t, eps_grid, box_m);

    std::ostringstream rate_csv;
    rate_csv.precision(12);
    rate_csv << "eps,energy,limit,gap\n";
    std::vector<std::pair<double, double>> pairs;
    for (size_t k = 0; k < ys.size(); ++k) {
        const double e = energy_nonlinear(ys[k], eps_grid[k], density, box_m).total();
        const double gap = std::fabs(e - limit.total());
        pairs.emplace_back(eps_grid[k], gap);
        rate_csv << eps_grid[k] << ',' << e << ',' << limit.total() << ',' << gap << '\n';
    }
    const RateFit fit = rate_fit(pairs);

    std::ostringstream slice_csv;
    slice_csv.precision(12);
    slice_csv << "sigma,xi,measure\n";
    for (double s : sigma_grid)
        slice_csv << s << ',' << (xi == Axis::X1 ? "e1" : "e2") << ',' << slice_measure(t.u, xi, s)
                  << '\n';

    ExperimentOutput out;
    out.files.emplace_back("rate.csv", rate_csv.str());
    out.files.emplace_back("slices.csv", slice_csv.str());
    std::ostringstream sum;
    sum.precision(10);
    sum << "gamma harness\n"
        << "limit energy = " << limit.total() << "\n"
        << "rate fit slope = " << fit.slope << " (intercept " << fit.intercept << ", rms "
        << fit.residual << ", dropped " << fit.dropped << ")\n";
    out.summary = sum.str();
    out.extra_manifest = {{"rate_slope", fit.slope}};
    return out;
}

ExperimentOutput run_rigidity(const Config& cfg, const EnergyDensity& density, double box_m) {
    (void)density;
    (void)box_m;
    // Three translated pieces on (0,3) x (0,1); the middle separation scales
    // like sqrt(eps) and merges, the right one like eps^{1/4} and stays.
    const GridMesh mesh = mesh_from_config(cfg, 3.0, 48, 16, 0);
    std::vector<double> eps_grid = cfg.get_list("rigidity", "eps_grid");
    if (eps_grid.empty()) eps_grid = {1e-2, 1e-3, 1e-4};
    const Vec2 alpha{cfg.get_double("rigidity", "alpha_x", 0.2),
                     cfg.get_double("rigidity", "alpha_y", -0.1)};
    const double cstar = cfg.get_double("rigidity", "cstar", 10.0);
    const int tail = cfg.get_int("rigidity", "tail", 3);

    std::vector<SequenceEntry> seq;
    std::ostringstream decomp_csv;
    decomp_csv.precision(12);
    decomp_csv << "eps,components,b2_x,b2_y,b3_x,b3_y\n";
    for (double eps : eps_grid) {
        DiscreteDeformation y = make_field(mesh);
        const Vec2 t2 = std::sqrt(eps) * alpha;
        const Vec2 t3 = std::pow(eps, 0.25) * Vec2{1.0, 1.0};
        for (int c = 0; c < mesh.cell_count(); ++c) {
            const double x = mesh.cell_center(c).x;
            y.shift[static_cast<size_t>(c)] = x < 1.0 ? Vec2{} : (x < 2.0 ? t2 : t3);
        }
        for (int v = 0; v < mesh.nx - 1; ++v) {
            const double x = column_x(mesh, v);
            if (std::fabs(x - 1.0) < 0.25 * mesh.hx || std::fabs(x - 2.0) < 0.25 * mesh.hx)
                for (int j = 0; j < mesh.ny; ++j)
                    y.open[static_cast<size_t>(mesh.vertical_facet(v, j))] = 1;
        }
        const Decomposition d = piecewise_rigid_decompose(y, 1e-8);
        seq.push_back({eps, d.part, d.motion});
        decomp_csv << eps << ',' << d.part.count;
        for (int j = 1; j <= 2 && j < d.part.count; ++j)
            decomp_csv << ',' << d.motion.comp[static_cast<size_t>(j)].shift.x << ','
                       << d.motion.comp[static_cast<size_t>(j)].shift.y;
        decomp_csv << '\n';
    }
    const CoarsestResult merged = coarsest_partition(seq, cstar, tail);

    json trace = json::array();
    for (const MergeDecision& d : merged.trace)
        trace.push_back({{"i", d.comp_i},
                         {"j", d.comp_j},
                         {"merged", d.merged},
                         {"scaled_separation", d.scaled_separation}});
    json merge_json = {{"components_after", merged.part.count},
                       {"band_low", merged.band_low},
                       {"band_high", merged.band_high},
                       {"trace", trace},
                       {"partition", json::parse(partition_to_json(merged.part))}};

    ExperimentOutput out;
    out.files.emplace_back("decomposition.csv", decomp_csv.str());
    out.files.emplace_back("merge_trace.json", merge_json.dump(2));
    std::ostringstream sum;
    sum.precision(10);
    sum << "rigidity experiment\n"
        << "sequence entries = " << seq.size() << ", components = " << seq.front().part.count
        << "\n"
        << "coarsest partition components = " << merged.part.count << "\n"
        << "threshold band = [" << merged.band_low << ", " << merged.band_high << ")\n";
    out.summary = sum.str();
    return out;
}

ExperimentOutput run_loads(const Config& cfg, const EnergyDensity& density, double box_m) {
    const GridMesh mesh = mesh_from_config(cfg, 1.0, 16, 16, 0);
    const double lambda = cfg.get_double("loads", "lambda", 1.0);
    std::vector<double> eps_grid = cfg.get_list("loads", "eps_grid");
    if (eps_grid.empty()) eps_grid = {1e-2, 1e-3, 1e-4};
    const QuadraticForm q = hessian_q(density);

    // Reference triple (g, P_g, T_g): two components split at x = 1/2,
    // identity motions, g affine per component.
    std::vector<int> labels(static_cast<size_t>(mesh.cell_count()), 0);
    for (int c = 0; c < mesh.cell_count(); ++c)
        if (mesh.cell_center(c).x > 0.5) labels[static_cast<size_t>(c)] = 1;
    CacciopPartition part_g = make_partition(mesh, labels);
    PiecewiseRigidMotion motion_g;
    motion_g.comp.assign(2, RigidMotion{});
    DisplacementField g = make_field(mesh);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        g.grad[sc] = labels[sc] == 0 ? Mat2::diag(0.2, -0.1) : Mat2::diag(-0.1, 0.2);
        g.shift[sc] = labels[sc] == 0 ? Vec2{0.0, 0.0} : Vec2{0.4, 0.0};
    }
    for (auto f : interface_facets(part_g)) (void)f;
    g.open = interface_facets(part_g);
    const LimitTriple g_triple{g, part_g, motion_g};

    // Test triple: u = g plus a piecewise infinitesimal motion.
    PiecewiseInfinitesimalMotion m;
    m.comp = {{0.3, Vec2{0.1, -0.2}}, {-0.2, Vec2{0.0, 0.3}}};
    const LimitTriple t{add_infinitesimal(g, part_g, motion_g, m), part_g, motion_g};

    const LoadConstraint constraint{part_g, motion_g};
    const EnergyBreakdown fg = energy_loaded_limit(t, lambda, g, constraint, q);
    const auto fks = recovery_sequence(g_triple, eps_grid, box_m);
    const auto yks = recovery_sequence(t, eps_grid, box_m);

    std::ostringstream csv;
    csv.precision(12);
    csv << "eps,lambda,F_eps,F_g,gap\n";
    for (size_t k = 0; k < eps_grid.size(); ++k) {
        const EnergyBreakdown fe =
            energy_loaded(yks[k], eps_grid[k], lambda, fks[k], density, box_m);
        csv << eps_grid[k] << ',' << lambda << ',' << fe.total() << ',' << fg.total() << ','
            << std::fabs(fe.total() - fg.total()) << '\n';
    }

    // Constraint violations must flag as infinite.
    PiecewiseRigidMotion wrong_motion = motion_g;
    wrong_motion.comp[1].angle = 0.3;
    const EnergyBreakdown rejected =
        energy_loaded_limit({t.u, part_g, wrong_motion}, lambda, g, constraint, q);

    ExperimentOutput out;
    out.files.emplace_back("loads.csv", csv.str());
    std::ostringstream sum;
    sum.precision(10);
    const InfinitesimalProjection proj = project_infinitesimal(t.u, part_g, motion_g, g);
    sum << "loads experiment\n"
        << "F_g = " << fg.total() << " (load part " << fg.load << ")\n"
        << "projection distance = " << proj.distance << "\n"
        << "constraint violation flagged infinite = " << (rejected.infinite ? "yes" : "no")
        << "\n";
    out.summary = sum.str();
    return out;
}

ExperimentOutput run_partition_demo(const Config& cfg, const EnergyDensity& density,
                                    double box_m) {
    (void)density;
    (void)box_m;
    const GridMesh mesh = mesh_from_config(cfg, 3.0, 48, 16, 0);
    std::vector<int> labels(static_cast<size_t>(mesh.cell_count()), 0);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const double x = mesh.cell_center(c).x;
        labels[static_cast<size_t>(c)] = x < 1.0 ? 0 : (x < 2.0 ? 1 : 2);
    }
    const CacciopPartition p = make_partition(mesh, labels);
    const PerimeterReport per = perimeters(p);
    const LocalStructureReport structure = local_structure_check(p);
    const CacciopPartition merged = merge(p, {{0, 1}});

    ExperimentOutput out;
    out.files.emplace_back("partition.json", partition_to_json(p));
    out.files.emplace_back("interfaces.csv", interface_matrix_csv(per));
    out.files.emplace_back("merged_partition.json", partition_to_json(merged));
    std::ostringstream sum;
    sum.precision(10);
    sum << "partition demo\n"
        << "components = " << p.count << ", interior interface length = "
        << per.interior_interface_total << "\n"
        << "local structure pass = " << (structure.pass ? "yes" : "no") << "\n"
        << "after merging the two largest: components = " << merged.count << "\n";
    out.summary = sum.str();
    return out;
}

}  // namespace

RunResult run_experiment(const Config& cfg, const std::string& out_root_override) {
    RunResult result;
    const auto problems = validate_config(cfg);
    if (!problems.empty()) {
        std::ostringstream msg;
        for (const auto& p : problems)
            msg << cfg.origin() << ':' << p.line << ": " << p.path << ": " << p.message << '\n';
        result.error = msg.str();
        return result;
    }

    std::string root = out_root_override;
    if (root.empty()) root = cfg.get_string("", "out_root");
    if (root.empty()) {
        const char* env = std::getenv(kOutRootEnv);
        root = env ? env : "runs";
    }

    const std::string experiment = cfg.get_string("", "experiment");
    const std::string density_id = cfg.get_string("density", "id", "dist2");
    const double box_m = cfg.get_double("density", "box_m", kDefaultBoxBound);
    const EnergyDensity density = make_density(density_id);
    const QuadraticForm q = hessian_q(density);
    const UniaxialOptimum opt = alpha_and_fa(q, 1.0);

    try {
        ExperimentOutput out;
        if (experiment == "cleavage")
            out = run_cleavage(cfg, density, box_m);
        else if (experiment == "gamma")
            out = run_gamma(cfg, density, box_m);
        else if (experiment == "rigidity")
            out = run_rigidity(cfg, density, box_m);
        else if (experiment == "loads")
            out = run_loads(cfg, density, box_m);
        else
            out = run_partition_demo(cfg, density, box_m);

        const fs::path dir = fresh_run_dir(root, experiment);
        json manifest = {{"experiment", experiment},
                         {"version", kVersion},
                         {"timestamp", timestamp_now()},
                         {"seed", cfg.get_int("", "seed", 0)},
                         {"config", config_echo(cfg)},
                         {"density",
                          {{"id", density_id},
                           {"alpha", opt.alpha},
                           {"Q", quadratic_form_json(q)},
                           {"box_m", box_m}}}};
        if (!out.extra_manifest.is_null()) manifest["results"] = out.extra_manifest;
        json file_list = json::array();
        for (const auto& [name, content] : out.files) {
            write_file(dir / name, content);
            file_list.push_back(name);
        }
        file_list.push_back("summary.txt");
        manifest["files"] = file_list;
        write_file(dir / "manifest.json", manifest.dump(2));
        write_file(dir / "summary.txt", out.summary);

        result.ok = true;
        result.dir = dir.string();
        result.summary = out.summary;
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

std::string regenerate_summary(const std::string& dir) {
    const fs::path path = fs::path(dir) / "manifest.json";
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("report: no manifest.json in " + dir);
    json manifest;
    in >> manifest;
    std::ostringstream sum;
    sum.precision(10);
    sum << "run report\n"
        << "experiment = " << manifest.value("experiment", "?") << "\n"
        << "version = " << manifest.value("version", "?") << "\n"
        << "density = " << manifest["density"].value("id", "?")
        << ", alpha = " << manifest["density"].value("alpha", 0.0) << "\n";
    if (manifest.contains("results"))
        for (const auto& [k, v] : manifest["results"].items()) sum << k << " = " << v << "\n";
    sum << "files:";
    for (const auto& f : manifest["files"]) sum << ' ' << f.get<std::string>();
    sum << "\n";
    write_file(fs::path(dir) / "summary.txt", sum.str());
    return sum.str();
}

std::string triple_to_json(const LimitTriple& t) {
    json j;
    j["u"] = json::parse(field_to_json(t.u));
    j["partition"] = json::parse(partition_to_json(t.part));
    json motions = json::array();
    for (const RigidMotion& rm : t.motion.comp)
        motions.push_back({{"angle", rm.angle}, {"shift", {rm.shift.x, rm.shift.y}}});
    j["motions"] = motions;
    return j.dump();
}

LimitTriple triple_from_json(const std::string& text) {
    const json j = json::parse(text);
    LimitTriple t;
    t.u = field_from_json(j.at("u").dump());
    t.part = partition_from_json(j.at("partition").dump());
    for (const auto& m : j.at("motions")) {
        RigidMotion rm;
        rm.angle = m.at("angle").get<double>();
        rm.shift = Vec2{m.at("shift")[0].get<double>(), m.at("shift")[1].get<double>()};
        t.motion.comp.push_back(rm);
    }
    if (static_cast<int>(t.motion.comp.size()) != t.part.count)
        throw std::invalid_argument("triple_from_json: motion count does not match partition");
    return t;
}

}  // namespace fracture
