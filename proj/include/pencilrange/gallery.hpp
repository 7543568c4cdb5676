#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pencilrange/matkernel.hpp"
#include "pencilrange/ranges.hpp"

namespace pencilrange {

/// Coefficient over the spatial variable x (differential kinds) or the basis
/// index n >= 1 (diagonal kinds).
using ScalarFn = std::function<cplx(double)>;

/// Essential-range descriptor for coefficient functions: enclosure formulas
/// need essran(.), which cannot be inferred from a closure.
struct EssRan {
    enum class Kind { Points, Polygon, Circle };
    Kind kind = Kind::Points;
    std::vector<cplx> points;  // finite set, or polygon vertices in convex position
    cplx center{0.0, 0.0};     // circle
    double radius = 0.0;

    static EssRan from_points(std::vector<cplx> pts);
    static EssRan polygon(std::vector<cplx> vertices);
    static EssRan circle(cplx center, double radius);

    bool empty() const;
    /// Exact distance to the described set (polygon = distance to the hull).
    double distance(cplx z) const;
    std::vector<cplx> hull_vertices() const;  // points / vertices; circle sampled
};

struct TruncationSpec {
    std::size_t n = 0;        // diagonal kinds: section size; differential: interior points
    double half_length = 0.0; // differential kinds only

    static TruncationSpec diag(std::size_t n) { return {n, 0.0}; }
    static TruncationSpec interval(double half_length, std::size_t n) {
        return {n, half_length};
    }
};

struct Multiplier {
    enum class Kind { Scalar, BlockPhase, HlResolvent };
    Kind kind = Kind::Scalar;
    ScalarFn fn;            // Scalar: left-multiplication by fn sampled on the grid
    double theta = 0.0;     // BlockPhase: diag(e^{-i theta} I, e^{i theta} I)
    cplx hl_lambda{0, 0};   // HlResolvent: diag(I, eps (U - lambda)^{-1})
    double hl_eps = 1.0;

    static Multiplier scalar(ScalarFn f);
    static Multiplier block_phase(double theta);
    static Multiplier hl_resolvent(cplx lambda, double eps);
};

/// Immutable truncation-family recipe; section() produces matched (A, B).
class PencilFamily {
public:
    enum class Kind {
        Diagonal,
        Schrodinger1d,
        SturmLiouvilleIndefinite,
        Dirac1d,
        Stokes1d,
        HainLust,
        Block2x2,
        Literal,
        Multiplied,
    };

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    bool is_diagonal() const { return kind_ == Kind::Diagonal; }
    bool is_differential() const;

    /// Diagonal families: coefficient values at index n >= 1.
    cplx diag_a(std::size_t n) const;
    cplx diag_b(std::size_t n) const;

    const EssRan& essran_u() const { return essran_u_; }
    double hain_lust_b_fit() const { return hl_b_fit_; }
    double hain_lust_theta_fit() const { return hl_theta_fit_; }

    const PencilFamily* base() const { return base_.get(); }
    const Multiplier* multiplier() const { return mult_ ? &*mult_ : nullptr; }

    // factories
    static PencilFamily diagonal(ScalarFn a, ScalarFn b, std::string name = "diagonal");
    static PencilFamily schrodinger1d(ScalarFn v, std::string name = "schrodinger1d");
    static PencilFamily sturm_liouville(ScalarFn v, ScalarFn j,
                                        std::string name = "sturm_liouville");
    static PencilFamily dirac1d(ScalarFn v, EssRan essran_v, std::string name = "dirac1d");
    static PencilFamily stokes1d(cplx gamma, cplx delta, ScalarFn u, EssRan essran_u,
                                 std::string name = "stokes1d");
    static PencilFamily hain_lust(ScalarFn q, ScalarFn w, ScalarFn v, ScalarFn u,
                                  EssRan essran_u, std::string name = "hain_lust");
    static PencilFamily block2x2_diag(ScalarFn c11, ScalarFn c12, ScalarFn c21, ScalarFn c22,
                                      ScalarFn b11, ScalarFn b22,
                                      std::string name = "block2x2");
    static PencilFamily literal(CMatrix a, CMatrix b, std::string name = "literal");
    static PencilFamily multiplied(PencilFamily base, Multiplier m,
                                   std::string name = "multiplied");

    friend PencilSection section(const PencilFamily& f, const TruncationSpec& t);
    friend std::optional<std::vector<PencilSection>> family_window(const PencilFamily& f,
                                                                   double depth,
                                                                   std::size_t size);
    friend struct FamilyAccess;

private:
    PencilFamily() = default;

    Kind kind_ = Kind::Literal;
    std::string name_;
    std::vector<std::string> warnings_;

    ScalarFn a_, b_;                      // diagonal
    ScalarFn v_;                          // schrodinger / SL / dirac potential
    ScalarFn q_, w_, u_;                  // hain-lust (v_ doubles as its V)
    cplx gamma_{0, 0}, delta_{0, 0};      // stokes
    ScalarFn c11_, c12_, c21_, c22_, b11_, b22_;  // block2x2
    CMatrix lit_a_, lit_b_;               // literal
    EssRan essran_u_;                     // dirac (essran V) / stokes / hain-lust
    double hl_b_fit_ = 0.0;
    double hl_theta_fit_ = 0.0;
    std::shared_ptr<const PencilFamily> base_;  // multiplied
    std::optional<Multiplier> mult_;
};

/// Matched truncation matrices.  Differential kinds discretize on
/// [-L, L] with h = 2L/(N+1), Dirichlet rows eliminated; -d2/dx2 uses the
/// 3-point stencil, d/dx the centered stencil; multiplication operators are
/// diagonal samples at the grid nodes.  Throws InvalidSpec.
PencilSection section(const PencilFamily& f, const TruncationSpec& t);

/// Coordinate-window compressions used by ess_range_tail; nullopt when the
/// family has no coordinate structure (Literal).
std::optional<std::vector<PencilSection>> family_window(const PencilFamily& f, double depth,
                                                        std::size_t size);

/// Indefinite Sturm-Liouville family: tau f = -f'' + V f with V -> m+- at
/// +-infinity plus a compactly supported well, B = multiplication by J
/// (J = -1 left of a, +1 right of b).
PencilFamily sl_indefinite(double mminus, double mplus, ScalarFn well, double a, double b);

/// The paper-style interval rotation multiplier: e^{i phi} left of a, 1 right
/// of b, interpolating phase in between.
Multiplier sl_rotation_multiplier(double phi, double a, double b);

/// JT example, pencil form: section (diag(1..k, 1..k), diag(I_k, -I_k)) of
/// size 2k.
PencilFamily jt_pencil_family();
/// JT example, operator form: JT as one diagonal family with interleaved
/// entries (1, -1, 2, -2, ...), B = I.
PencilFamily jt_operator_family();

/// Symbol eigenvalues (k^2+U)/2 +- sqrt(((k^2-U)/2)^2 - gd k^2) of the
/// Stokes-type block symbol; gd = gamma*delta on the unit circle.
std::pair<cplx, cplx> stokes_symbol(cplx u0, cplx gd, double k);

/// Grid of a differential truncation: x_i = -L + i h, i = 1..N.
std::vector<double> section_grid(const TruncationSpec& t);

}  // namespace pencilrange
