#include "pestctl/scenarios.hpp"

#include "pestctl/csv.hpp"
#include "pestctl/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace pestctl {

namespace fs = std::filesystem;
using nlohmann::json;

unsigned resolve_thread_count(int cli_value) {
    if (cli_value > 0) return static_cast<unsigned>(cli_value);
    if (const char* env = std::getenv("PESTCTL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::clamp(hw, 1u, 16u);
}

namespace {

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

fs::path ensure_output_dir(const ScenarioConfig& cfg) {
    fs::path dir = cfg.output_dir.empty() ? fs::path(".") : fs::path(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_echo(CsvWriter& csv, const ScenarioConfig& cfg) {
    for (const std::string& line : cfg.echo_lines()) csv.comment(line);
}

void write_gnuplot(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << "set datafile separator ','\n";
    out << "set key outside\n";
    out << body;
}

json state_json(const State& s) {
    return json{{"X", s.X}, {"S", s.S}, {"I", s.I}, {"A", s.A}};
}

json equilibrium_json(const Equilibrium& e) {
    json flags = json::object();
    for (const auto& [name, value] : e.existence_flags) flags[name] = value;
    return json{{"kind", to_string(e.kind)},
                {"state", state_json(e.state)},
                {"residual_norm", e.residual_norm},
                {"existence_flags", flags}};
}

std::vector<double> trajectory_row(const TimeGrid& grid, std::size_t k, const Vec4& v) {
    return {grid.node(k), v[0], v[1], v[2], v[3]};
}

struct SimVariant {
    std::string label;
    ModelParams params;
    Trajectory trajectory;
    BoundsCertificate cert;
    std::string file;
};

}  // namespace

void run_simulate(const ScenarioConfig& cfg, unsigned threads) {
    cfg.validate();
    const fs::path dir = ensure_output_dir(cfg);
    const TimeGrid grid = cfg.grid(false);

    std::vector<SimVariant> variants;
    if (cfg.scan.present) {
        for (double value : cfg.scan.grid()) {
            SimVariant v;
            v.params = cfg.params;
            if (!set_model_parameter(v.params, cfg.scan.parameter, value)) {
                throw InvariantViolation("scan parameter '" + cfg.scan.parameter + "' unknown");
            }
            v.params.validate();
            v.label = cfg.scan.parameter + " = " + short_num(value);
            v.file = "simulate_" + cfg.scan.parameter + "_" + short_num(value) + ".csv";
            variants.push_back(std::move(v));
        }
    } else {
        SimVariant v;
        v.params = cfg.params;
        v.label = "base";
        v.file = "simulate.csv";
        variants.push_back(std::move(v));
    }

    parallel_for(variants.size(), threads, [&](std::size_t i) {
        variants[i].trajectory = integrate_forward(variants[i].params, cfg.initial_state, grid);
        variants[i].cert = bounds_certificate(variants[i].params, variants[i].trajectory);
    });

    for (const SimVariant& v : variants) {
        CsvWriter csv((dir / v.file).string());
        write_echo(csv, cfg);
        if (cfg.scan.present) csv.comment("variant: " + v.label);
        csv.comment("bounds: L=" + fmt17(v.cert.L) + " bound_XSI=" + fmt17(v.cert.bound_XSI) +
                    " bound_A=" + fmt17(v.cert.bound_A) + " sup_XSI=" + fmt17(v.cert.sup_XSI) +
                    " sup_A=" + fmt17(v.cert.sup_A) +
                    " satisfied=" + (v.cert.satisfied ? "true" : "false"));
        csv.header({"t", "X", "S", "I", "A"});
        for (std::size_t k = 0; k < v.trajectory.values.size(); ++k) {
            csv.row(trajectory_row(grid, k, v.trajectory.values[k]));
        }
        csv.close();
    }

    std::string body = "set xlabel 'time (days)'\nset terminal pngcairo size 1200,900\n"
                       "set output 'simulate.png'\nset multiplot layout 2,2\n";
    const char* cols[4] = {"X", "S", "I", "A"};
    for (int c = 0; c < 4; ++c) {
        body += std::string("set ylabel '") + cols[c] + "'\nplot ";
        for (std::size_t i = 0; i < variants.size(); ++i) {
            if (i) body += ", ";
            body += "'" + variants[i].file + "' using 1:" + std::to_string(c + 2) +
                    " with lines title '" + variants[i].label + "'";
        }
        body += "\n";
    }
    body += "unset multiplot\n";
    write_gnuplot(dir / "simulate.gp", body);
}

void run_equilibria_stability(const ScenarioConfig& cfg, const std::string& prefix) {
    cfg.validate();
    const fs::path dir = ensure_output_dir(cfg);
    const ModelParams& p = cfg.params;

    json doc;
    doc["config"] = json::object();
    for (const std::string& line : cfg.echo_lines()) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) {
            doc["config"][line.substr(0, eq)] = line.substr(eq + 3);
        }
    }

    std::ofstream txt(dir / (prefix + "_report.txt"), std::ios::binary);
    txt << "equilibrium and stability report\n";
    txt << "=================================\n\n";
    txt << "configuration\n";
    for (const std::string& line : cfg.echo_lines()) txt << "  " << line << "\n";
    txt << "\n";

    // thresholds
    const ThresholdPair th = thresholds(p);
    doc["thresholds"] = {{"R0", th.R0}, {"R1", th.R1}};
    txt << "critical parameters\n";
    txt << "  R0 = " << fmt17(th.R0) << "\n";
    txt << "  R1 = " << fmt17(th.R1) << "\n";
    txt << "  pest-free state is locally asymptotically stable iff R0 < 1 and R1 < 1: "
        << ((th.R0 < 1.0 && th.R1 < 1.0) ? "condition holds" : "condition fails") << "\n\n";

    // axial point
    const Equilibrium e0 = axial_equilibrium(p);
    const E0Classification c0 = classify_E0(p);
    doc["axial"] = equilibrium_json(e0);
    doc["axial"]["verdict"] = to_string(c0.verdict);
    doc["axial"]["witness_eigenvalue"] = c0.witness_eigenvalue;
    txt << "axial equilibrium (no crop, no pests)\n";
    txt << "  state = (" << fmt17(e0.state.X) << ", " << fmt17(e0.state.S) << ", "
        << fmt17(e0.state.I) << ", " << fmt17(e0.state.A) << ")\n";
    txt << "  residual = " << fmt17(e0.residual_norm) << "\n";
    txt << "  verdict: " << to_string(c0.verdict)
        << " (crop growth eigenvalue " << fmt17(c0.witness_eigenvalue) << " > 0)\n\n";

    // pest-free point
    const Equilibrium e1 = pest_free_equilibrium(p);
    const E1Classification c1 = classify_E1(p);
    doc["pest_free"] = equilibrium_json(e1);
    doc["pest_free"]["verdict"] = to_string(c1.verdict);
    doc["pest_free"]["max_real_eigenvalue"] = c1.max_real_numeric;
    txt << "pest-free equilibrium\n";
    txt << "  state = (" << fmt17(e1.state.X) << ", 0, 0, " << fmt17(e1.state.A) << ")\n";
    txt << "  verdict: " << to_string(c1.verdict)
        << " (max real eigenvalue " << fmt17(c1.max_real_numeric) << ")\n";
    txt << "  threshold and eigenvalue verdicts agree\n\n";

    // boundary point never exists
    const NonExistenceReport bx = boundary_equilibrium_check(p);
    doc["boundary_check"] = {{"positive_root_exists", bx.positive_root_exists},
                             {"discriminant", bx.discriminant},
                             {"root1_re", bx.root1.real()},
                             {"root1_im", bx.root1.imag()},
                             {"root2_re", bx.root2.real()},
                             {"root2_im", bx.root2.imag()}};
    txt << "crop-free boundary equilibrium\n";
    txt << "  awareness quadratic " << fmt17(bx.c2) << "*A^2 + " << fmt17(bx.c1) << "*A + "
        << fmt17(bx.c0) << " has no positive root"
        << (bx.positive_root_exists ? " -- UNEXPECTED POSITIVE ROOT" : "") << "\n";
    txt << "  roots: " << fmt17(bx.root1.real()) << (bx.root1.imag() != 0.0 ? " +- i*" : "")
        << (bx.root1.imag() != 0.0 ? fmt17(std::abs(bx.root1.imag())) : std::string())
        << " and " << fmt17(bx.root2.real()) << "\n\n";

    // susceptible-pest-free points
    doc["healthy_pest_free"] = json::array();
    txt << "susceptible-pest-free equilibria\n";
    try {
        const auto e3s = healthy_pest_free_equilibria(p);
        if (e3s.empty()) txt << "  none for this parameter set\n";
        for (const Equilibrium& e : e3s) {
            const CubicStabilityReport rep = classify_E3(p, e);
            json j = equilibrium_json(e);
            j["verdict"] = to_string(rep.verdict);
            j["C"] = {rep.C1, rep.C2, rep.C3};
            j["F"] = {rep.F11, rep.F22, rep.F33};
            j["printed_C"] = {rep.printed_C2, rep.printed_C3};
            j["printed_max_rel_deviation"] = rep.printed_max_rel_deviation;
            j["max_real_eigenvalue"] = rep.max_real_numeric;
            doc["healthy_pest_free"].push_back(j);
            txt << "  state = (" << fmt17(e.state.X) << ", 0, " << fmt17(e.state.I) << ", "
                << fmt17(e.state.A) << ")  residual = " << fmt17(e.residual_norm) << "\n";
            txt << "    cubic coefficients C = (" << fmt17(rep.C1) << ", " << fmt17(rep.C2)
                << ", " << fmt17(rep.C3) << ")\n";
            txt << "    diagonal terms F = (" << fmt17(rep.F11) << ", " << fmt17(rep.F22) << ", "
                << fmt17(rep.F33) << ")\n";
            txt << "    verdict: " << to_string(rep.verdict) << " (max real eigenvalue "
                << fmt17(rep.max_real_numeric) << ")\n";
            txt << "    expanded-form C2/C3 deviate from the matrix-derived values by rel. "
                << short_num(rep.printed_max_rel_deviation)
                << " (transcription drift; matrix-derived values used)\n";
        }
    } catch (const DegenerateDenominator& e) {
        doc["healthy_pest_free_degenerate"] = e.what();
        txt << "  cubic undefined: " << e.what() << "\n";
    }
    txt << "\n";

    // interior points
    doc["coexistence"] = json::array();
    txt << "coexistence equilibria\n";
    const auto stars = coexistence_equilibria(p);
    if (stars.empty()) txt << "  none found by the seeded search\n";
    const SexticCoefficients sex = sextic_coefficients(p);
    for (const Equilibrium& e : stars) {
        const EstarClassification c = classify_Estar(p, e);
        const QuarticPrintedComparison printed = quartic_printed_comparison(p, e);
        const double sextic_residual = sex.eval(e.state.A);
        json j = equilibrium_json(e);
        j["verdict"] = to_string(c.verdict);
        j["y"] = {c.y.y1, c.y.y2, c.y.y3, c.y.y4};
        j["printed_y"] = {printed.printed.y1, printed.printed.y2, printed.printed.y3,
                          printed.printed.y4};
        j["printed_max_rel_deviation"] = printed.max_rel_deviation;
        j["sextic_residual"] = sextic_residual;
        j["max_real_eigenvalue"] = c.max_real_numeric;
        doc["coexistence"].push_back(j);
        txt << "  state = (" << fmt17(e.state.X) << ", " << fmt17(e.state.S) << ", "
            << fmt17(e.state.I) << ", " << fmt17(e.state.A) << ")  residual = "
            << fmt17(e.residual_norm) << "\n";
        txt << "    quartic coefficients y = (" << fmt17(c.y.y1) << ", " << fmt17(c.y.y2) << ", "
            << fmt17(c.y.y3) << ", " << fmt17(c.y.y4) << ")\n";
        txt << "    verdict: " << to_string(c.verdict) << " (max real eigenvalue "
            << fmt17(c.max_real_numeric) << ")\n";
        txt << "    awareness sextic residual at A* = " << short_num(sextic_residual)
            << " (cross-validation)\n";
        txt << "    expanded-form y2..y4 deviate from the matrix-derived values by rel. "
            << short_num(printed.max_rel_deviation)
            << " (transcription drift; matrix-derived values used)\n";
        for (const auto& [flag, val] : e.existence_flags) {
            txt << "    flag " << flag << " = " << (val ? "true" : "false") << "\n";
        }
    }
    txt << "\n";
    txt.close();

    std::ofstream jf(dir / (prefix + "_report.json"), std::ios::binary);
    jf << doc.dump(2) << "\n";
}

void run_hopf_scan(const ScenarioConfig& cfg) {
    cfg.validate();
    if (!cfg.scan.present || cfg.scan.parameter != "alpha") {
        throw InvariantViolation("hopf-scan requires a scan over alpha");
    }
    const auto grid_values = cfg.scan.grid();
    if (grid_values.size() < 2) {
        throw InvariantViolation("hopf-scan needs at least two grid points");
    }
    const fs::path dir = ensure_output_dir(cfg);

    const double lo = grid_values.front();
    const double hi = grid_values.back();
    const HopfScan scan = hopf_scan(cfg.params, lo, hi, grid_values.size());

    CsvWriter grid_csv((dir / "psi_grid.csv").string());
    write_echo(grid_csv, cfg);
    grid_csv.comment("signed Hurwitz determinant along the interior branch");
    grid_csv.header({"alpha", "has_coexistence", "psi", "max_real_eig", "X", "S", "I", "A"});
    for (const HopfGridSample& g : scan.grid) {
        grid_csv.row({g.alpha, g.has_coexistence ? 1.0 : 0.0, g.psi, g.max_real_eig,
                      g.equilibrium.X, g.equilibrium.S, g.equilibrium.I, g.equilibrium.A});
    }
    grid_csv.close();

    CsvWriter pts((dir / "hopf_points.csv").string());
    write_echo(pts, cfg);
    for (const auto& [a, b] : scan.skipped_segments) {
        pts.comment("no coexistence branch on alpha in [" + fmt17(a) + ", " + fmt17(b) + "]");
    }
    pts.header({"alpha_star", "psi_at_star", "omega0", "omega0_sq_ratio", "transversality",
                "predicted_re_slope", "fd_re_slope", "eigen_crossing_verified", "X", "S", "I",
                "A"});
    for (const HopfScanResult& h : scan.points) {
        pts.row({h.alpha_star, h.psi_at_star, h.imag_part_omega0, h.omega0_sq_ratio,
                 h.transversality_value, h.predicted_re_slope, h.fd_re_slope,
                 h.eigen_crossing_verified ? 1.0 : 0.0, h.equilibrium.X, h.equilibrium.S,
                 h.equilibrium.I, h.equilibrium.A});
    }
    pts.close();

    write_gnuplot(dir / "hopf.gp",
                  "set xlabel 'alpha'\nset ylabel 'psi'\nset terminal pngcairo size 900,600\n"
                  "set output 'hopf.png'\nplot 'psi_grid.csv' using 1:3 with linespoints "
                  "title 'psi', 0 with lines dashtype 2 title ''\n");
}

void run_bifurcation(const ScenarioConfig& cfg, unsigned threads) {
    cfg.validate();
    if (!cfg.scan.present || cfg.scan.parameter != "alpha") {
        throw InvariantViolation("bifurcation requires a scan over alpha");
    }
    const auto alphas = cfg.scan.grid();
    const fs::path dir = ensure_output_dir(cfg);
    const TimeGrid grid = cfg.grid(false);

    struct Point {
        double alpha = 0.0;
        bool has_estar = false;
        State estar;
        std::string verdict = "none";
        Vec4 attr_min = Vec4::Zero();
        Vec4 attr_max = Vec4::Zero();
    };
    std::vector<Point> points(alphas.size());

    // Sequential continuation pass keeps the branch coherent across the grid.
    std::optional<State> seed;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        points[i].alpha = alphas[i];
        const auto s = track_interior_equilibrium(cfg.params, alphas[i], seed);
        if (s) {
            points[i].has_estar = true;
            points[i].estar = *s;
            seed = s;
        } else {
            seed.reset();
        }
    }

    // Heavy per-point work is data-parallel; results land in index slots.
    parallel_for(points.size(), threads, [&](std::size_t i) {
        Point& pt = points[i];
        ModelParams q = cfg.params;
        q.alpha = pt.alpha;
        if (pt.has_estar) {
            Equilibrium e;
            e.kind = EquilibriumKind::Coexistence;
            e.state = pt.estar;
            pt.verdict = to_string(classify_Estar(q, e).verdict);
        }
        const Trajectory traj = integrate_forward(q, cfg.initial_state, grid);
        const std::size_t start = traj.values.size() / 2;  // discard transient half
        Vec4 mn = traj.values[start], mx = traj.values[start];
        for (std::size_t k = start; k < traj.values.size(); ++k) {
            mn = mn.cwiseMin(traj.values[k]);
            mx = mx.cwiseMax(traj.values[k]);
        }
        pt.attr_min = mn;
        pt.attr_max = mx;
    });

    // Hopf candidates over the same range.
    HopfScan hopf;
    if (alphas.size() >= 2) {
        hopf = hopf_scan(cfg.params, alphas.front(), alphas.back(), alphas.size());
    }

    CsvWriter csv((dir / "bifurcation.csv").string());
    write_echo(csv, cfg);
    csv.comment("attractor ranges from the tail half of a " + short_num(grid.tf - grid.t0) +
                "-day run");
    for (const HopfScanResult& h : hopf.points) {
        csv.comment("hopf_candidate alpha_star=" + fmt17(h.alpha_star) +
                    " omega0=" + fmt17(h.imag_part_omega0) +
                    " transversality=" + fmt17(h.transversality_value) +
                    " crossing_verified=" + (h.eigen_crossing_verified ? "true" : "false"));
    }
    csv.header({"alpha", "has_estar", "X_star", "S_star", "I_star", "A_star", "verdict",
                "attr_min_X", "attr_max_X", "attr_min_S", "attr_max_S", "attr_min_I",
                "attr_max_I", "attr_min_A", "attr_max_A"});
    for (const Point& pt : points) {
        std::vector<std::string> cells;
        cells.push_back(fmt17(pt.alpha));
        cells.push_back(pt.has_estar ? "1" : "0");
        if (pt.has_estar) {
            cells.push_back(fmt17(pt.estar.X));
            cells.push_back(fmt17(pt.estar.S));
            cells.push_back(fmt17(pt.estar.I));
            cells.push_back(fmt17(pt.estar.A));
        } else {
            cells.insert(cells.end(), {"", "", "", ""});
        }
        cells.push_back(pt.verdict);
        for (int c = 0; c < 4; ++c) {
            cells.push_back(fmt17(pt.attr_min[c]));
            cells.push_back(fmt17(pt.attr_max[c]));
        }
        csv.raw_row(cells);
    }
    csv.close();

    write_gnuplot(dir / "bifurcation.gp",
                  "set xlabel 'alpha'\nset terminal pngcairo size 1200,900\n"
                  "set output 'bifurcation.png'\nset multiplot layout 2,2\n"
                  "set ylabel 'X'\nplot 'bifurcation.csv' using 1:8 with lines title 'attractor min', "
                  "'' using 1:9 with lines title 'attractor max', '' using 1:3 with points pt 7 ps "
                  "0.3 title 'E*'\n"
                  "set ylabel 'S'\nplot 'bifurcation.csv' using 1:10 with lines title 'attractor "
                  "min', '' using 1:11 with lines title 'attractor max', '' using 1:4 with points "
                  "pt 7 ps 0.3 title 'E*'\n"
                  "set ylabel 'I'\nplot 'bifurcation.csv' using 1:12 with lines title 'attractor "
                  "min', '' using 1:13 with lines title 'attractor max', '' using 1:5 with points "
                  "pt 7 ps 0.3 title 'E*'\n"
                  "set ylabel 'A'\nplot 'bifurcation.csv' using 1:14 with lines title 'attractor "
                  "min', '' using 1:15 with lines title 'attractor max', '' using 1:6 with points "
                  "pt 7 ps 0.3 title 'E*'\n"
                  "unset multiplot\n");
}

bool run_optimal_control(const ScenarioConfig& cfg) {
    cfg.validate();
    const fs::path dir = ensure_output_dir(cfg);
    const TimeGrid grid = cfg.grid(true);

    const SweepResult sweep =
        fbsm(cfg.params, cfg.weights, cfg.initial_state, grid, cfg.relaxation, cfg.tol,
             cfg.max_iter);

    const auto zero = ControlSchedule::constant(grid, ControlTriple{});
    const Trajectory baseline = integrate_forward(cfg.params, cfg.initial_state, grid, &zero);
    const double baseline_objective = objective(cfg.params, cfg.weights, baseline, zero);

    auto annotate = [&](CsvWriter& csv) {
        write_echo(csv, cfg);
        csv.comment(std::string("converged=") + (sweep.converged ? "true" : "false") +
                    " iterations=" + std::to_string(sweep.iterations));
        csv.comment("objective=" + fmt17(sweep.objective) +
                    " baseline_objective=" + fmt17(baseline_objective));
    };

    {
        CsvWriter csv((dir / "oc_state.csv").string());
        annotate(csv);
        csv.header({"t", "X", "S", "I", "A"});
        for (std::size_t k = 0; k < sweep.state.values.size(); ++k) {
            csv.row(trajectory_row(grid, k, sweep.state.values[k]));
        }
        csv.close();
    }
    {
        CsvWriter csv((dir / "oc_control.csv").string());
        annotate(csv);
        csv.header({"t", "u1", "u2", "u3"});
        for (std::size_t k = 0; k < sweep.control.values.size(); ++k) {
            const ControlTriple& u = sweep.control.values[k];
            csv.row({grid.node(k), u.u1, u.u2, u.u3});
        }
        csv.close();
    }
    {
        CsvWriter csv((dir / "oc_adjoint.csv").string());
        annotate(csv);
        csv.header({"t", "lambda1", "lambda2", "lambda3", "lambda4"});
        for (std::size_t k = 0; k < sweep.adjoint.values.size(); ++k) {
            csv.row(trajectory_row(grid, k, sweep.adjoint.values[k]));
        }
        csv.close();
    }
    {
        CsvWriter csv((dir / "oc_baseline_state.csv").string());
        annotate(csv);
        csv.comment("zero-control baseline");
        csv.header({"t", "X", "S", "I", "A"});
        for (std::size_t k = 0; k < baseline.values.size(); ++k) {
            csv.row(trajectory_row(grid, k, baseline.values[k]));
        }
        csv.close();
    }
    {
        CsvWriter csv((dir / "oc_iterations.csv").string());
        annotate(csv);
        csv.header({"iteration", "max_control_change", "objective"});
        for (std::size_t i = 0; i < sweep.history.size(); ++i) {
            csv.row({static_cast<double>(i + 1), sweep.history[i].max_control_change,
                     sweep.history[i].objective});
        }
        csv.close();
    }

    write_gnuplot(dir / "oc.gp",
                  "set xlabel 'time (days)'\nset terminal pngcairo size 1200,900\n"
                  "set output 'oc.png'\nset multiplot layout 2,2\n"
                  "set ylabel 'controls'\nset yrange [-0.05:1.05]\n"
                  "plot 'oc_control.csv' using 1:2 with lines title 'u1', '' using 1:3 with lines "
                  "title 'u2', '' using 1:4 with lines title 'u3'\n"
                  "set yrange [*:*]\n"
                  "set ylabel 'S'\nplot 'oc_state.csv' using 1:3 with lines title 'optimal', "
                  "'oc_baseline_state.csv' using 1:3 with lines title 'no control'\n"
                  "set ylabel 'X'\nplot 'oc_state.csv' using 1:2 with lines title 'optimal', "
                  "'oc_baseline_state.csv' using 1:2 with lines title 'no control'\n"
                  "set ylabel 'A'\nplot 'oc_state.csv' using 1:5 with lines title 'optimal', "
                  "'oc_baseline_state.csv' using 1:5 with lines title 'no control'\n"
                  "unset multiplot\n");

    return sweep.converged;
}

}  // namespace pestctl
