#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pencilrange/enclosures.hpp"
#include "pencilrange/gallery.hpp"

namespace pencilrange {

/// Declarative family description; coefficient functions are expression
/// strings over x (the basis index n for diagonal kinds).
struct FamilyConfig {
    std::string kind;                            // matches PencilFamily kinds + "sl_indefinite"
    std::map<std::string, std::string> exprs;    // a, b, v, q, w, u, c11, ...
    double m_minus = 0.0, m_plus = 0.0;          // sl_indefinite
    double a = 0.0, b = 0.0;                     // sl_indefinite sign-change interval
    cplx gamma{0, 0}, delta{0, 0};               // stokes1d
    std::optional<EssRan> essran;
    std::optional<CMatrix> lit_a, lit_b;         // literal
    std::shared_ptr<FamilyConfig> base;          // multiplied
    std::string mult_kind;                       // scalar | block_phase | hl_resolvent | sl_rotation
    std::string mult_fn;
    double mult_theta = 0.0, mult_phi = 0.0, mult_a = 0.0, mult_b = 0.0, mult_eps = 1.0;
    cplx mult_lambda{0, 0};
};

PencilFamily build_family(const FamilyConfig& cfg);

struct ExperimentConfig {
    std::string experiment;  // range | pencil-range | ess-range | sweep | inject | enclosure | figure
    std::optional<FamilyConfig> family;
    std::vector<TruncationSpec> truncations;
    Box box{-3, 3, -3, 3};
    std::size_t nx = 800, ny = 800;
    std::size_t angles = 720;
    std::vector<double> tail_depths;
    std::size_t section_size = 100;
    std::vector<cplx> targets;
    std::size_t base_n = 20, search_depth = 60;
    std::vector<cplx> polar_shifts;   // extra polar multipliers for the estimate
    std::optional<CMatrix> matrix;    // literal operator for range / estimate
    std::optional<EnclosureSpec> enclosure;
    double tol_drift = 1e-3;
    std::size_t min_persistence = 2;
    std::optional<std::pair<double, double>> window;
    bool use_ess_reference = false;
    std::string figure_preset;
    std::uint64_t seed = 1;
    std::size_t threads = 0;  // 0 = hardware concurrency
    std::string out_dir = "out";

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_json_text() const;
};

CMatrix cmatrix_from_json(const std::string& text);

}  // namespace pencilrange
