#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pencilrange/gallery.hpp"
#include "pencilrange/ranges.hpp"

namespace pencilrange {

struct SweepLevel {
    TruncationSpec spec;
    std::vector<cplx> eigenvalues;
    bool fallback = false;   // lambda-grid sigma_min location used
    bool targeted = false;   // real-window inertia scan used
    std::string error;       // kernel failure recorded, sweep continued
};

enum class ClusterLabel { Converged, SpuriousCandidate, Unresolved };

struct Cluster {
    cplx location;              // value at the last persistent level
    std::size_t persistence = 0;  // consecutive trailing levels present
    double drift = 0.0;         // max step between consecutive matched levels
    ClusterLabel label = ClusterLabel::Unresolved;
    std::vector<cplx> track;    // matched value per level (absent = NaN)
};

using RegionPredicate = std::function<bool(cplx)>;

struct SpectralRun {
    std::string family;
    std::vector<SweepLevel> levels;
    std::optional<RegionPredicate> reference;  // admissible pollution zone
    std::vector<Cluster> clusters;
    bool degenerate_b = false;

    std::string to_json() const;
    std::string to_csv() const;
};

struct SweepOptions {
    /// When set (and the sections are real-symmetric-tridiagonal against a
    /// real diagonal B), eigenvalues are located inside this real interval by
    /// an inertia-count scan instead of the dense solver.
    std::optional<std::pair<double, double>> real_window;
    /// lambda-grid for the SingularB fallback.
    Box fallback_box{-10.0, 10.0, -10.0, 10.0};
    std::size_t fallback_grid = 60;
};

/// Eigenvalues per truncation level via generalized_eig, with the documented
/// fallbacks.  Requires >= 3 specs of strictly increasing resolution.
SpectralRun run_sweep(const PencilFamily& f, const std::vector<TruncationSpec>& specs,
                      const SweepOptions& opts = {});

/// Cluster the run across levels (single-linkage within 10 * tol_drift) and
/// label: inside the reference region -> spurious candidate; persistent with
/// small drift -> converged; otherwise unresolved.
void classify(SpectralRun& run, double tol_drift, std::size_t min_persistence);

/// Real eigenvalues of (A, B) in [lo, hi] for real-symmetric-tridiagonal A
/// and real-diagonal B, by scanning the inertia count of A - lambda B.
std::vector<double> real_window_eigs(const PencilSection& p, double lo, double hi,
                                     double scan_step = 1e-3);

struct Injection {
    PencilSection section;  // augmented compression
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // tail index pairs
    std::vector<bool> target_noop;  // target was already a base eigenvalue
    bool noop = false;              // all targets were no-ops
};

/// Constructive pollution filling for diagonal families: for each target mu,
/// append a unit vector x = alpha e_j + beta e_k supported on a fresh tail
/// pair with <(A - mu B)x, x> = 0, so mu becomes an eigenvalue of the
/// augmented compression while the base eigenvalues are untouched.
Injection inject_pollution(const PencilFamily& f, std::size_t base_n,
                           const std::vector<cplx>& targets, std::size_t search_depth);

}  // namespace pencilrange
