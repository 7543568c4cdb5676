#include "pencilrange/runner.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "pencilrange/approx.hpp"
#include "pencilrange/enclosures.hpp"
#include "pencilrange/matkernel.hpp"
#include "pencilrange/ranges.hpp"
#include "pencilrange/svg.hpp"

namespace pencilrange {

namespace {

namespace fs = std::filesystem;

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

void write_artifact(const fs::path& path, const std::string& content, RunResult& result) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    result.artifacts.push_back(path.string());
}

const std::vector<std::string> kPalette{"#1f6fb2", "#c03a2b", "#2a8f4e", "#8e44ad",
                                        "#d08714", "#148f8f", "#5d4037"};

SweepOptions sweep_options(const ExperimentConfig& cfg) {
    SweepOptions opts;
    opts.real_window = cfg.window;
    opts.fallback_box = cfg.box;
    return opts;
}

std::string classification_name(ClusterLabel label) {
    switch (label) {
        case ClusterLabel::Converged: return "converged";
        case ClusterLabel::SpuriousCandidate: return "spurious-candidate";
        case ClusterLabel::Unresolved: return "unresolved";
    }
    return "?";
}

void run_sweep_experiment(const ExperimentConfig& cfg, const fs::path& dir, RunResult& result) {
    const PencilFamily fam = build_family(*cfg.family);
    SpectralRun run = run_sweep(fam, cfg.truncations, sweep_options(cfg));
    std::optional<Raster> reference;
    if (cfg.use_ess_reference && !cfg.tail_depths.empty()) {
        reference = ess_range_tail(fam, cfg.box, cfg.nx, cfg.ny, cfg.tail_depths,
                                   cfg.section_size, cfg.angles);
        const Raster* ref = &*reference;
        run.reference = [ref](cplx z) { return ref->contains(z); };
    }
    classify(run, cfg.tol_drift, cfg.min_persistence);

    write_artifact(dir / "sweep.json", run.to_json(), result);
    write_artifact(dir / "sweep.csv", run.to_csv(), result);
    if (reference) write_artifact(dir / "reference.json", reference->to_json(), result);

    // eigenvalue trails colored by classification
    std::vector<SvgLayer> layers;
    if (reference) layers.push_back(SvgLayer::fill(*reference, "#f2e3c8"));
    std::vector<cplx> conv, spur, unres;
    for (const auto& c : run.clusters)
        for (const cplx z : c.track) {
            if (std::isnan(z.real())) continue;
            (c.label == ClusterLabel::Converged
                 ? conv
                 : c.label == ClusterLabel::SpuriousCandidate ? spur : unres)
                .push_back(z);
        }
    layers.push_back(SvgLayer::points(unres, "#9a9a9a", 2.0));
    layers.push_back(SvgLayer::points(conv, "#2a8f4e", 2.5));
    layers.push_back(SvgLayer::points(spur, "#c03a2b", 2.5));
    write_artifact(dir / "sweep.svg", emit_svg(layers, cfg.box), result);

    std::string md = "# Sweep report: " + run.family + "\n\n";
    md += "levels: " + std::to_string(run.levels.size()) + "\n\n";
    if (run.degenerate_b) md += "warning: nearly degenerate B detected\n\n";
    for (const auto& lev : run.levels)
        if (!lev.error.empty()) {
            md += "- level n=" + std::to_string(lev.spec.n) + " failed: " + lev.error + "\n";
            result.exit_code = 3;
        }
    md += "\n| location | persistence | drift | classification |\n|---|---|---|---|\n";
    for (const auto& c : run.clusters) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "| %.6g%+.6gi | %zu | %.3g | %s |\n",
                      c.location.real(), c.location.imag(), c.persistence, c.drift,
                      classification_name(c.label).c_str());
        md += buf;
    }
    result.summary += md;
    write_artifact(dir / "report.md", md, result);
}

void run_range_experiment(const ExperimentConfig& cfg, const fs::path& dir, RunResult& result) {
    CMatrix m;
    if (cfg.matrix) {
        m = *cfg.matrix;
    } else if (cfg.family && !cfg.truncations.empty()) {
        m = section(build_family(*cfg.family), cfg.truncations.front()).A;
    } else {
        throw ConfigError("range experiment needs 'matrix' or family+truncations");
    }
    const SupportFn s = nrange(m, cfg.angles);
    write_artifact(dir / "support.json", support_to_json(s), result);
    const Raster r = raster_of_support(s, cfg.box, cfg.nx, cfg.ny, 0.0);
    std::vector<SvgLayer> layers{SvgLayer::fill(r, "#cfe0f0"),
                                 SvgLayer::points(nrange_boundary(m, 180), "#1f6fb2", 1.5)};
    write_artifact(dir / "range.svg", emit_svg(layers, cfg.box), result);
    result.summary += "# Numerical range\n\nangles: " + std::to_string(s.values.size()) + "\n";
    write_artifact(dir / "report.md", result.summary, result);
}

void run_pencil_range_experiment(const ExperimentConfig& cfg, const fs::path& dir,
                                 RunResult& result) {
    if (!cfg.family || cfg.truncations.empty())
        throw ConfigError("pencil-range experiment needs family and truncations");
    const PencilSection p = section(build_family(*cfg.family), cfg.truncations.front());
    const Raster r = pencil_range(p, cfg.box, cfg.nx, cfg.ny, cfg.angles);
    write_artifact(dir / "pencil_range.json", r.to_json(), result);
    write_artifact(dir / "pencil_range.svg",
                   emit_svg({SvgLayer::fill(r, "#cfe0f0")}, cfg.box), result);
    result.summary += "# Pencil range\n\nmember cells: " + std::to_string(r.count()) + "\n";
    write_artifact(dir / "report.md", result.summary, result);
}

void run_ess_range_experiment(const ExperimentConfig& cfg, const fs::path& dir,
                              RunResult& result) {
    if (!cfg.family || cfg.tail_depths.empty())
        throw ConfigError("ess-range experiment needs family and tail_depths");
    const Raster r = ess_range_tail(build_family(*cfg.family), cfg.box, cfg.nx, cfg.ny,
                                    cfg.tail_depths, cfg.section_size, cfg.angles);
    write_artifact(dir / "ess_range.json", r.to_json(), result);
    write_artifact(dir / "ess_range.svg", emit_svg({SvgLayer::fill(r, "#e8d3b9")}, cfg.box),
                   result);
    result.summary += "# Essential-range estimate\n\nmember cells: " +
                      std::to_string(r.count()) + "\n";
    write_artifact(dir / "report.md", result.summary, result);
}

void run_inject_experiment(const ExperimentConfig& cfg, const fs::path& dir, RunResult& result) {
    if (!cfg.family) throw ConfigError("inject experiment needs a diagonal family");
    const PencilFamily fam = build_family(*cfg.family);
    const Injection inj = inject_pollution(fam, cfg.base_n, cfg.targets, cfg.search_depth);
    const auto eigs = generalized_eig(inj.section.A, inj.section.B);

    nlohmann::json j;
    j["base_n"] = cfg.base_n;
    j["noop"] = inj.noop;
    auto& pairs = j["pairs"] = nlohmann::json::array();
    for (auto [a, b] : inj.pairs) pairs.push_back({a, b});
    auto& ev = j["eigenvalues"] = nlohmann::json::array();
    for (const cplx z : eigs) ev.push_back({z.real(), z.imag()});
    write_artifact(dir / "inject.json", j.dump(2), result);

    std::string md = "# Pollution injection\n\n";
    for (std::size_t t = 0; t < cfg.targets.size(); ++t) {
        double best = 1e300;
        for (const cplx z : eigs) best = std::min(best, std::abs(z - cfg.targets[t]));
        char buf[160];
        std::snprintf(buf, sizeof(buf), "- target %.6g%+.6gi: nearest eigenvalue at %.3e%s\n",
                      cfg.targets[t].real(), cfg.targets[t].imag(), best,
                      inj.target_noop[t] ? " (no-op)" : "");
        md += buf;
    }
    result.summary += md;
    write_artifact(dir / "report.md", md, result);
}

void run_enclosure_experiment(const ExperimentConfig& cfg, const fs::path& dir,
                              RunResult& result) {
    if (cfg.matrix) {
        std::vector<CMatrix> mults{CMatrix::identity(cfg.matrix->rows())};
        for (const cplx shift : cfg.polar_shifts)
            mults.push_back(polar_multiplier(*cfg.matrix, shift));
        const Raster est =
            multiplier_spectrum_estimate(*cfg.matrix, mults, cfg.box, cfg.nx, cfg.ny, cfg.angles);
        write_artifact(dir / "estimate.json", est.to_json(), result);
        std::vector<cplx> eigs = general_eig(*cfg.matrix);
        write_artifact(dir / "estimate.svg",
                       emit_svg({SvgLayer::fill(est, "#cfe0f0"),
                                 SvgLayer::points(eigs, "#c03a2b", 3.0)},
                                cfg.box),
                       result);
        result.summary += "# Multiplier spectrum estimate\n\nmultipliers: " +
                          std::to_string(mults.size()) + "\n";
    }
    if (cfg.enclosure) {
        Raster r(cfg.box, cfg.nx, cfg.ny);
        if (cfg.enclosure->kind == EnclosureSpec::Kind::Stokes) {
            r = stokes_region(*cfg.enclosure, cfg.box, cfg.nx, cfg.ny);
        } else {
            for (std::size_t iy = 0; iy < cfg.ny; ++iy)
                for (std::size_t ix = 0; ix < cfg.nx; ++ix)
                    r.set(ix, iy, cfg.enclosure->contains(r.center(ix, iy), 0.5 * r.cell_diag()));
        }
        write_artifact(dir / "enclosure.json", r.to_json(), result);
        write_artifact(dir / "enclosure.svg", emit_svg({SvgLayer::fill(r, "#e8d3b9")}, cfg.box),
                       result);
        result.summary += "# Enclosure\n\nmember cells: " + std::to_string(r.count()) + "\n";
    }
    if (!cfg.matrix && !cfg.enclosure)
        throw ConfigError("enclosure experiment needs 'matrix' or 'enclosure'");
    write_artifact(dir / "report.md", result.summary, result);
}

// --- figure presets -------------------------------------------------------------

void figure_stokes_const(const fs::path& dir, std::size_t threads, RunResult& result) {
    const cplx u0(-1, 1);
    const EnclosureSpec spec = EnclosureSpec::stokes(EssRan::from_points({u0}));
    const Box box{-4, 8, -6, 6};
    const std::size_t nx = 800, ny = 801;
    Raster r(box, nx, ny);
    parallel_for(ny, threads, [&](std::size_t iy) {
        for (std::size_t ix = 0; ix < nx; ++ix)
            r.set(ix, iy, stokes_region_contains(spec.essran, r.center(ix, iy), 0.0));
    });
    std::vector<SvgLayer> layers{SvgLayer::fill(r, "#d8d8d8")};
    for (int j = 0; j <= 6; ++j) {
        const cplx gd = std::polar(1.0, M_PI * j / 6.0);
        std::vector<cplx> pts;
        for (int k = 0; k < 2000; ++k) {
            const double kk = -3.2 + 6.4 * k / 1999.0;
            const auto [z1, z2] = stokes_symbol(u0, gd, kk);
            pts.push_back(z1);
            pts.push_back(z2);
        }
        layers.push_back(SvgLayer::points(pts, kPalette[j % kPalette.size()], 1.2));
    }
    write_artifact(dir / "stokes_const.svg", emit_svg(layers, box), result);
    write_artifact(dir / "stokes_const.json", r.to_json(), result);
    result.summary += "stokes-const: enclosure with symbol curves for 7 phases\n";
}

void figure_stokes_circles(const fs::path& dir, std::size_t threads, RunResult& result) {
    for (const double radius : {1.0, 3.0, 10.0}) {
        const EnclosureSpec spec = EnclosureSpec::stokes(EssRan::circle(cplx(0, 0), radius));
        const double reach = radius + 2.5;
        const Box box{-reach, reach, -reach, reach};
        const std::size_t nx = 640, ny = 641;
        Raster r(box, nx, ny);
        parallel_for(ny, threads, [&](std::size_t iy) {
            for (std::size_t ix = 0; ix < nx; ++ix)
                r.set(ix, iy, stokes_region_contains(spec.essran, r.center(ix, iy), 0.0));
        });
        const std::string stem = "stokes_circle_r" + std::to_string(int(radius));
        write_artifact(dir / (stem + ".svg"), emit_svg({SvgLayer::fill(r, "#d8d8d8")}, box),
                       result);
        write_artifact(dir / (stem + ".json"), r.to_json(), result);
    }
    result.summary += "stokes-circles: R in {1, 3, 10}\n";
}

void figure_dirac_sigma(const fs::path& dir, std::size_t threads, RunResult& result) {
    const EssRan hull = EssRan::polygon({cplx(-0.3, 0), cplx(0.3, 0.4)});
    const EnclosureSpec spec = EnclosureSpec::dirac(hull);
    const Box box{-3.5, 3.5, -2.5, 2.5};
    const std::size_t nx = 420, ny = 301;
    Raster sigma(box, nx, ny);
    parallel_for(ny, threads, [&](std::size_t iy) {
        for (std::size_t ix = 0; ix < nx; ++ix)
            sigma.set(ix, iy, !dirac_excluded(spec, sigma.center(ix, iy), 128).excluded);
    });
    write_artifact(dir / "dirac_sigma.json", sigma.to_json(), result);
    write_artifact(dir / "dirac_sigma.svg",
                   emit_svg({SvgLayer::fill(sigma, "#efd98a")}, box), result);
    result.summary += "dirac-sigma: complement of the admissible sectors\n";
}

void figure_jt_sweep(const fs::path& dir, std::uint64_t seed, RunResult& result) {
    ExperimentConfig cfg;
    cfg.experiment = "sweep";
    cfg.family = FamilyConfig{};
    cfg.family->kind = "jt_pencil";
    cfg.truncations = {TruncationSpec::diag(20), TruncationSpec::diag(40),
                       TruncationSpec::diag(60)};
    cfg.box = Box{-12, 12, -2, 2};
    cfg.nx = 480;
    cfg.ny = 81;
    cfg.tol_drift = 1e-8;
    cfg.out_dir = (dir / "jt").string();
    cfg.seed = seed;
    RunResult sub = run_experiment(cfg);
    result.artifacts.insert(result.artifacts.end(), sub.artifacts.begin(), sub.artifacts.end());
    result.exit_code = std::max(result.exit_code, sub.exit_code);
    result.summary += "jt-sweep: pencil-form eigenvalue trails\n";
}

}  // namespace

RunResult run_figure_preset(const std::string& preset, const std::string& out_dir,
                            std::size_t threads, std::uint64_t seed) {
    RunResult result;
    const fs::path dir(out_dir);
    try {
        if (preset == "stokes-const")
            figure_stokes_const(dir, threads, result);
        else if (preset == "stokes-circles")
            figure_stokes_circles(dir, threads, result);
        else if (preset == "dirac-sigma")
            figure_dirac_sigma(dir, threads, result);
        else if (preset == "jt-sweep")
            figure_jt_sweep(dir, seed, result);
        else
            throw ConfigError("unknown figure preset '" + preset + "'");
    } catch (const ConfigError& e) {
        result.exit_code = 2;
        result.summary += std::string("error: ") + e.what() + "\n";
        return result;
    } catch (const std::exception& e) {
        result.exit_code = 3;
        result.summary += std::string("error: ") + e.what() + "\n";
        return result;
    }
    return result;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    RunResult result;
    const fs::path dir(cfg.out_dir);
    try {
        fs::create_directories(dir);
        if (cfg.experiment == "sweep")
            run_sweep_experiment(cfg, dir, result);
        else if (cfg.experiment == "range")
            run_range_experiment(cfg, dir, result);
        else if (cfg.experiment == "pencil-range")
            run_pencil_range_experiment(cfg, dir, result);
        else if (cfg.experiment == "ess-range")
            run_ess_range_experiment(cfg, dir, result);
        else if (cfg.experiment == "inject")
            run_inject_experiment(cfg, dir, result);
        else if (cfg.experiment == "enclosure")
            run_enclosure_experiment(cfg, dir, result);
        else if (cfg.experiment == "figure")
            return run_figure_preset(cfg.figure_preset, cfg.out_dir, cfg.threads, cfg.seed);
        else
            throw ConfigError("unknown experiment kind '" + cfg.experiment + "'");
    } catch (const ConfigError& e) {
        result.exit_code = 2;
        result.summary += std::string("error: ") + e.what() + "\n";
    } catch (const IoError& e) {
        result.exit_code = 2;
        result.summary += std::string("error: ") + e.what() + "\n";
    } catch (const std::exception& e) {
        result.exit_code = 3;
        result.summary += std::string("error: ") + e.what() + "\n";
    }
    return result;
}

}  // namespace pencilrange
