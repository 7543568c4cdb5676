#include "pencilrange/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "pencilrange/matkernel.hpp"

namespace pencilrange {

namespace {

struct TriPencil {
    RealSymTridiag a;
    std::vector<double> b;
};

// real-symmetric-tridiagonal A against real diagonal B
std::optional<TriPencil> tri_pencil_form(const PencilSection& p) {
    const std::size_t n = p.A.rows();
    const double tiny = 1e-14 * std::max({p.A.max_abs(), p.B.max_abs(), 1e-300});
    if (p.A.offtridiagonal_max() > tiny || !p.B.is_diagonal_within(tiny)) return std::nullopt;
    TriPencil t;
    t.a.diag.resize(n);
    t.a.off.resize(n > 0 ? n - 1 : 0);
    t.b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(p.A(i, i).imag()) > tiny || std::abs(p.B(i, i).imag()) > tiny)
            return std::nullopt;
        t.a.diag[i] = p.A(i, i).real();
        t.b[i] = p.B(i, i).real();
        if (i + 1 < n) {
            if (std::abs(p.A(i, i + 1).imag()) > tiny ||
                std::abs(p.A(i, i + 1) - p.A(i + 1, i)) > tiny)
                return std::nullopt;
            t.a.off[i] = p.A(i, i + 1).real();
        }
    }
    return t;
}

int inertia_below_zero(const TriPencil& t, double lambda) {
    const std::size_t n = t.a.diag.size();
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double off2 = (i > 0) ? t.a.off[i - 1] * t.a.off[i - 1] : 0.0;
        q = (t.a.diag[i] - lambda * t.b[i]) - (i > 0 ? off2 / q : 0.0);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

void refine_jumps(const TriPencil& t, double lo, double hi, int nu_lo, int nu_hi,
                  std::vector<double>& roots, int depth) {
    if (nu_lo == nu_hi) return;
    const double width = hi - lo;
    const double scale = std::max(std::abs(lo), std::abs(hi)) + 1.0;
    if (width <= 1e-13 * scale || depth > 60) {
        const double loc = 0.5 * (lo + hi);
        for (int k = 0; k < std::abs(nu_hi - nu_lo); ++k) roots.push_back(loc);
        return;
    }
    const double mid = 0.5 * (lo + hi);
    const int nu_mid = inertia_below_zero(t, mid);
    refine_jumps(t, lo, mid, nu_lo, nu_mid, roots, depth + 1);
    refine_jumps(t, mid, hi, nu_mid, nu_hi, roots, depth + 1);
}

std::vector<cplx> fallback_grid_eigs(const PencilSection& p, const SweepOptions& opts) {
    // coarse sigma_min grid over the fallback box, then local descent on
    // minima below threshold
    const std::size_t g = opts.fallback_grid;
    const Box& box = opts.fallback_box;
    const double dx = (box.re_max - box.re_min) / double(g);
    const double dy = (box.im_max - box.im_min) / double(g);
    const double scale = std::max(p.A.max_abs(), p.B.max_abs());
    const auto [bl, bh] = hermitian_extremes(p.B.adjoint() * p.B);
    (void)bl;
    const double bnorm = std::sqrt(std::max(bh, 0.0));
    // a root one cell away raises sigma_min by at most cell_diag * ||B||
    const double candidate_cut =
        std::max(0.05 * scale, 2.0 * std::hypot(dx, dy) * std::max(bnorm, 1e-12));

    auto smin_at = [&](cplx lam) {
        CMatrix m = p.A;
        m -= lam * p.B;
        return smallest_singular(m);
    };

    std::vector<cplx> found;
    std::vector<std::vector<double>> grid(g, std::vector<double>(g));
    for (std::size_t iy = 0; iy < g; ++iy)
        for (std::size_t ix = 0; ix < g; ++ix)
            grid[iy][ix] = smin_at({box.re_min + (double(ix) + 0.5) * dx,
                                    box.im_min + (double(iy) + 0.5) * dy});
    for (std::size_t iy = 0; iy < g; ++iy)
        for (std::size_t ix = 0; ix < g; ++ix) {
            const double v = grid[iy][ix];
            bool local_min = true;
            for (int a = -1; a <= 1 && local_min; ++a)
                for (int b = -1; b <= 1; ++b) {
                    const long jx = long(ix) + a, jy = long(iy) + b;
                    if (jx < 0 || jy < 0 || jx >= long(g) || jy >= long(g)) continue;
                    if (grid[jy][jx] < v) {
                        local_min = false;
                        break;
                    }
                }
            if (!local_min || v > candidate_cut) continue;
            // coordinate descent refinement
            cplx lam(box.re_min + (double(ix) + 0.5) * dx, box.im_min + (double(iy) + 0.5) * dy);
            double step = std::max(dx, dy);
            double best = v;
            for (int it = 0; it < 60 && step > 1e-12 * (1.0 + std::abs(lam)); ++it) {
                bool improved = false;
                for (const cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
                    const cplx cand = lam + step * dir;
                    const double sv = smin_at(cand);
                    if (sv < best) {
                        best = sv;
                        lam = cand;
                        improved = true;
                    }
                }
                if (!improved) step *= 0.5;
            }
            if (best <= 1e-6 * scale) found.push_back(lam);
        }
    // dedupe
    std::vector<cplx> unique;
    for (const cplx z : found) {
        bool fresh = true;
        for (const cplx u : unique)
            if (std::abs(z - u) <= 1e-6 * (1.0 + std::abs(u))) fresh = false;
        if (fresh) unique.push_back(z);
    }
    return unique;
}

}  // namespace

std::vector<double> real_window_eigs(const PencilSection& p, double lo, double hi,
                                     double scan_step) {
    const auto t = tri_pencil_form(p);
    if (!t) throw UnsupportedFamily("real_window_eigs: section is not tridiagonal-real");
    std::vector<double> roots;
    const double width = hi - lo;
    const std::size_t steps = std::max<std::size_t>(8, std::size_t(width / scan_step));
    double prev = lo;
    int nu_prev = inertia_below_zero(*t, prev);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double cur = lo + width * double(k) / double(steps);
        const int nu_cur = inertia_below_zero(*t, cur);
        if (nu_cur != nu_prev) refine_jumps(*t, prev, cur, nu_prev, nu_cur, roots, 0);
        prev = cur;
        nu_prev = nu_cur;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

SpectralRun run_sweep(const PencilFamily& f, const std::vector<TruncationSpec>& specs,
                      const SweepOptions& opts) {
    if (specs.size() < 3) throw InvalidSpec("run_sweep: need at least 3 truncation levels");
    for (std::size_t k = 1; k < specs.size(); ++k) {
        const bool n_ok = specs[k].n >= specs[k - 1].n;
        const bool l_ok = specs[k].half_length >= specs[k - 1].half_length;
        const bool strict =
            specs[k].n > specs[k - 1].n || specs[k].half_length > specs[k - 1].half_length;
        if (!n_ok || !l_ok || !strict)
            throw InvalidSpec("run_sweep: resolutions must strictly increase");
    }

    SpectralRun run;
    run.family = f.name();
    for (const auto& spec : specs) {
        SweepLevel level;
        level.spec = spec;
        try {
            const PencilSection p = section(f, spec);
            // degenerate-B diagnostic (strict positivity is not enough for
            // spectral inclusion when inf sigma(B) -> 0)
            if (p.B.is_hermitian(1e-10)) {
                const auto [bmin, bmax] = hermitian_extremes(p.B);
                const double lo = std::min(std::abs(bmin), std::abs(bmax));
                const double hi = std::max(std::abs(bmin), std::abs(bmax));
                if (hi > 0.0 && lo / hi <= 0.05) run.degenerate_b = true;
            }
            if (opts.real_window && tri_pencil_form(p)) {
                for (const double x :
                     real_window_eigs(p, opts.real_window->first, opts.real_window->second))
                    level.eigenvalues.push_back({x, 0.0});
                level.targeted = true;
            } else {
                try {
                    level.eigenvalues = generalized_eig(p.A, p.B);
                } catch (const SingularB&) {
                    level.eigenvalues = fallback_grid_eigs(p, opts);
                    level.fallback = true;
                }
            }
        } catch (const std::exception& e) {
            level.error = e.what();
        }
        run.levels.push_back(std::move(level));
    }
    return run;
}

void classify(SpectralRun& run, double tol_drift, std::size_t min_persistence) {
    const double radius = 10.0 * tol_drift;
    const std::size_t nlev = run.levels.size();
    run.clusters.clear();

    struct Chain {
        std::vector<cplx> track;  // per level; NaN when absent
        cplx current;
        bool active = false;
    };
    std::vector<Chain> chains;
    const cplx absent(std::numeric_limits<double>::quiet_NaN(), 0.0);

    for (std::size_t lev = 0; lev < nlev; ++lev) {
        const auto& eigs = run.levels[lev].eigenvalues;
        std::vector<bool> used(eigs.size(), false);
        // match active chains to the nearest unused eigenvalue within radius
        for (auto& ch : chains) {
            if (!ch.active) {
                ch.track.push_back(absent);
                continue;
            }
            std::size_t best = eigs.size();
            double bestd = radius;
            for (std::size_t i = 0; i < eigs.size(); ++i) {
                if (used[i]) continue;
                const double d = std::abs(eigs[i] - ch.current);
                if (d <= bestd) {
                    bestd = d;
                    best = i;
                }
            }
            if (best < eigs.size()) {
                used[best] = true;
                ch.current = eigs[best];
                ch.track.push_back(eigs[best]);
            } else {
                ch.active = false;
                ch.track.push_back(absent);
            }
        }
        for (std::size_t i = 0; i < eigs.size(); ++i) {
            if (used[i]) continue;
            Chain ch;
            ch.track.assign(lev, absent);
            ch.track.push_back(eigs[i]);
            ch.current = eigs[i];
            ch.active = true;
            chains.push_back(std::move(ch));
        }
    }

    for (const auto& ch : chains) {
        Cluster c;
        c.track = ch.track;
        // trailing consecutive presence
        std::size_t persist = 0;
        for (std::size_t lev = nlev; lev-- > 0;) {
            if (std::isnan(ch.track[lev].real())) break;
            ++persist;
        }
        c.persistence = persist;
        if (persist == 0) {
            // died before the last level: judge at its final appearance
            std::size_t last = nlev;
            for (std::size_t lev = nlev; lev-- > 0;)
                if (!std::isnan(ch.track[lev].real())) {
                    last = lev;
                    break;
                }
            c.location = (last < nlev) ? ch.track[last] : absent;
        } else {
            c.location = ch.track[nlev - 1];
        }
        double drift = 0.0;
        for (std::size_t lev = nlev - persist; lev + 1 < nlev; ++lev)
            drift = std::max(drift, std::abs(ch.track[lev + 1] - ch.track[lev]));
        c.drift = drift;

        if (run.reference && (*run.reference)(c.location))
            c.label = ClusterLabel::SpuriousCandidate;
        else if (persist >= min_persistence && drift <= tol_drift)
            c.label = ClusterLabel::Converged;
        else
            c.label = ClusterLabel::Unresolved;
        run.clusters.push_back(std::move(c));
    }
}

Injection inject_pollution(const PencilFamily& f, std::size_t base_n,
                           const std::vector<cplx>& targets, std::size_t search_depth) {
    if (!f.is_diagonal())
        throw UnsupportedFamily("inject_pollution: diagonal families only");

    Injection out;
    std::vector<cplx> adiag(base_n), bdiag(base_n);
    for (std::size_t i = 0; i < base_n; ++i) {
        adiag[i] = f.diag_a(i + 1);
        bdiag[i] = f.diag_b(i + 1);
    }

    std::vector<bool> used(search_depth + 1, false);
    std::vector<cplx> extra_a, extra_b;
    out.target_noop.assign(targets.size(), false);

    double scale = 0.0;
    for (std::size_t i = 0; i < base_n; ++i)
        scale = std::max({scale, std::abs(adiag[i]), std::abs(bdiag[i])});

    for (std::size_t tgt = 0; tgt < targets.size(); ++tgt) {
        const cplx mu = targets[tgt];
        // no-op when mu is already an eigenvalue of the base compression
        bool already = false;
        for (std::size_t i = 0; i < base_n; ++i) {
            if (std::abs(bdiag[i]) > 0.0 &&
                std::abs(adiag[i] / bdiag[i] - mu) <= 1e-12 * (1.0 + std::abs(mu))) {
                already = true;
                break;
            }
        }
        if (already) {
            out.target_noop[tgt] = true;
            continue;
        }

        bool placed = false;
        for (std::size_t jo = 1; jo <= search_depth && !placed; ++jo) {
            if (used[jo]) continue;
            const std::size_t j = base_n + jo;
            const cplx zj = f.diag_a(j) - mu * f.diag_b(j);
            if (std::abs(zj) == 0.0) continue;
            for (std::size_t ko = jo + 1; ko <= search_depth && !placed; ++ko) {
                if (used[ko]) continue;
                const std::size_t k = base_n + ko;
                const cplx zk = f.diag_a(k) - mu * f.diag_b(k);
                if (std::abs(zk) == 0.0) continue;
                // zero on the segment [zj, zk]: antiparallel with opposite signs
                const cplx cross = zj * std::conj(zk);
                if (std::abs(cross.imag()) > 1e-9 * std::abs(zj) * std::abs(zk)) continue;
                if (cross.real() >= 0.0) continue;
                const double t = std::abs(zk) / (std::abs(zj) + std::abs(zk));
                const double zero = std::abs(t * zj + (1.0 - t) * zk);
                const double pair_scale =
                    std::max({std::abs(f.diag_a(j)), std::abs(f.diag_a(k)),
                              std::abs(mu) * std::abs(f.diag_b(j)),
                              std::abs(mu) * std::abs(f.diag_b(k)), 1.0});
                if (zero > 1e-9 * pair_scale) continue;
                used[jo] = used[ko] = true;
                out.pairs.push_back({j, k});
                // <A x, x> with x = sqrt(t) e_j + sqrt(1-t) e_k
                extra_a.push_back(t * f.diag_a(j) + (1.0 - t) * f.diag_a(k));
                extra_b.push_back(t * f.diag_b(j) + (1.0 - t) * f.diag_b(k));
                placed = true;
            }
        }
        if (!placed)
            throw NoOppositePair("inject_pollution: no admissible tail pair within depth");
    }

    out.noop = std::all_of(out.target_noop.begin(), out.target_noop.end(),
                           [](bool b) { return b; });
    std::vector<cplx> a_all = adiag, b_all = bdiag;
    a_all.insert(a_all.end(), extra_a.begin(), extra_a.end());
    b_all.insert(b_all.end(), extra_b.begin(), extra_b.end());
    out.section = {CMatrix::diagonal(a_all), CMatrix::diagonal(b_all)};
    (void)scale;
    return out;
}

// --- serialization --------------------------------------------------------------

std::string SpectralRun::to_json() const {
    nlohmann::json j;
    j["family"] = family;
    j["degenerate_b"] = degenerate_b;
    auto& levels_json = j["levels"] = nlohmann::json::array();
    for (const auto& lev : levels) {
        nlohmann::json lj;
        lj["spec"] = {{"n", lev.spec.n}, {"half_length", lev.spec.half_length}};
        auto& ev = lj["eigenvalues"] = nlohmann::json::array();
        for (const cplx z : lev.eigenvalues) ev.push_back({z.real(), z.imag()});
        lj["fallback"] = lev.fallback;
        lj["targeted"] = lev.targeted;
        if (!lev.error.empty()) lj["error"] = lev.error;
        levels_json.push_back(std::move(lj));
    }
    auto& cj = j["clusters"] = nlohmann::json::array();
    for (const auto& c : clusters) {
        const char* label = c.label == ClusterLabel::Converged          ? "converged"
                            : c.label == ClusterLabel::SpuriousCandidate ? "spurious-candidate"
                                                                         : "unresolved";
        cj.push_back({{"location", {c.location.real(), c.location.imag()}},
                      {"persistence", c.persistence},
                      {"drift", c.drift},
                      {"classification", label}});
    }
    return j.dump(2);
}

std::string SpectralRun::to_csv() const {
    std::string csv = "level,n,half_length,re,im\n";
    for (std::size_t lev = 0; lev < levels.size(); ++lev) {
        for (const cplx z : levels[lev].eigenvalues) {
            csv += std::to_string(lev) + "," + std::to_string(levels[lev].spec.n) + "," +
                   std::to_string(levels[lev].spec.half_length) + "," +
                   std::to_string(z.real()) + "," + std::to_string(z.imag()) + "\n";
        }
    }
    return csv;
}

}  // namespace pencilrange
