#include "pencilrange/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pencilrange/expr.hpp"

namespace pencilrange {

using nlohmann::json;

namespace {

[[noreturn]] void field_fail(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

cplx cplx_of(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    field_fail(path, "expected number or [re, im]");
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

CMatrix matrix_of(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) field_fail(path, "expected non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    CMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) field_fail(path, "ragged rows");
        for (std::size_t k = 0; k < cols; ++k)
            m(i, k) = cplx_of(j[i][k], path + "[" + std::to_string(i) + "]");
    }
    return m;
}

json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(cplx_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

EssRan essran_of(const json& j, const std::string& path) {
    if (j.contains("circle")) {
        const auto& c = j.at("circle");
        return EssRan::circle(cplx_of(c.at("center"), path + ".circle.center"),
                              c.at("radius").get<double>());
    }
    std::vector<cplx> pts;
    const bool poly = j.contains("polygon");
    const json& arr = poly ? j.at("polygon") : j.at("points");
    for (std::size_t i = 0; i < arr.size(); ++i)
        pts.push_back(cplx_of(arr[i], path + (poly ? ".polygon" : ".points")));
    return poly ? EssRan::polygon(std::move(pts)) : EssRan::from_points(std::move(pts));
}

json essran_json(const EssRan& e) {
    json j;
    if (e.kind == EssRan::Kind::Circle) {
        j["circle"] = {{"center", cplx_json(e.center)}, {"radius", e.radius}};
        return j;
    }
    json arr = json::array();
    for (const cplx p : e.points) arr.push_back(cplx_json(p));
    j[e.kind == EssRan::Kind::Polygon ? "polygon" : "points"] = std::move(arr);
    return j;
}

FamilyConfig family_of(const json& j, const std::string& path) {
    FamilyConfig f;
    if (!j.contains("kind")) field_fail(path + ".kind", "missing");
    f.kind = j.at("kind").get<std::string>();
    for (const char* key : {"a", "b", "v", "q", "w", "u", "c11", "c12", "c21", "c22", "b11",
                            "b22", "well"})
        if (j.contains(key)) f.exprs[key] = j.at(key).get<std::string>();
    f.m_minus = j.value("m_minus", 0.0);
    f.m_plus = j.value("m_plus", 0.0);
    f.a = j.value("sign_a", 0.0);
    f.b = j.value("sign_b", 0.0);
    if (j.contains("gamma")) f.gamma = cplx_of(j.at("gamma"), path + ".gamma");
    if (j.contains("delta")) f.delta = cplx_of(j.at("delta"), path + ".delta");
    if (j.contains("essran")) f.essran = essran_of(j.at("essran"), path + ".essran");
    if (j.contains("matrix_a")) f.lit_a = matrix_of(j.at("matrix_a"), path + ".matrix_a");
    if (j.contains("matrix_b")) f.lit_b = matrix_of(j.at("matrix_b"), path + ".matrix_b");
    if (j.contains("base"))
        f.base = std::make_shared<FamilyConfig>(family_of(j.at("base"), path + ".base"));
    if (j.contains("multiplier")) {
        const auto& m = j.at("multiplier");
        f.mult_kind = m.at("kind").get<std::string>();
        f.mult_fn = m.value("fn", "");
        f.mult_theta = m.value("theta", 0.0);
        f.mult_phi = m.value("phi", 0.0);
        f.mult_a = m.value("a", 0.0);
        f.mult_b = m.value("b", 0.0);
        f.mult_eps = m.value("eps", 1.0);
        if (m.contains("lambda")) f.mult_lambda = cplx_of(m.at("lambda"), path + ".multiplier.lambda");
    }
    return f;
}

json family_json(const FamilyConfig& f) {
    json j;
    j["kind"] = f.kind;
    for (const auto& [k, v] : f.exprs) j[k] = v;
    if (f.kind == "sl_indefinite") {
        j["m_minus"] = f.m_minus;
        j["m_plus"] = f.m_plus;
        j["sign_a"] = f.a;
        j["sign_b"] = f.b;
    }
    if (f.kind == "stokes1d") {
        j["gamma"] = cplx_json(f.gamma);
        j["delta"] = cplx_json(f.delta);
    }
    if (f.essran) j["essran"] = essran_json(*f.essran);
    if (f.lit_a) j["matrix_a"] = matrix_json(*f.lit_a);
    if (f.lit_b) j["matrix_b"] = matrix_json(*f.lit_b);
    if (f.base) j["base"] = family_json(*f.base);
    if (!f.mult_kind.empty()) {
        json m;
        m["kind"] = f.mult_kind;
        if (!f.mult_fn.empty()) m["fn"] = f.mult_fn;
        if (f.mult_kind == "block_phase") m["theta"] = f.mult_theta;
        if (f.mult_kind == "sl_rotation") {
            m["phi"] = f.mult_phi;
            m["a"] = f.mult_a;
            m["b"] = f.mult_b;
        }
        if (f.mult_kind == "hl_resolvent") {
            m["lambda"] = cplx_json(f.mult_lambda);
            m["eps"] = f.mult_eps;
        }
        j["multiplier"] = std::move(m);
    }
    return j;
}

ScalarFn expr_or(const FamilyConfig& f, const std::string& key, cplx fallback) {
    const auto it = f.exprs.find(key);
    if (it == f.exprs.end()) return [fallback](double) { return fallback; };
    return parse_expression(it->second);
}

ScalarFn expr_required(const FamilyConfig& f, const std::string& key) {
    const auto it = f.exprs.find(key);
    if (it == f.exprs.end()) field_fail("family." + key, "missing for kind " + f.kind);
    return parse_expression(it->second);
}

}  // namespace

PencilFamily build_family(const FamilyConfig& cfg) {
    if (cfg.kind == "diagonal")
        return PencilFamily::diagonal(expr_required(cfg, "a"), expr_required(cfg, "b"));
    if (cfg.kind == "jt_pencil") return jt_pencil_family();
    if (cfg.kind == "jt_operator") return jt_operator_family();
    if (cfg.kind == "schrodinger1d")
        return PencilFamily::schrodinger1d(expr_required(cfg, "v"));
    if (cfg.kind == "sturm_liouville_indefinite" || cfg.kind == "sl_indefinite") {
        ScalarFn well = cfg.exprs.count("well") ? parse_expression(cfg.exprs.at("well"))
                                                : ScalarFn();
        return sl_indefinite(cfg.m_minus, cfg.m_plus, well, cfg.a, cfg.b);
    }
    if (cfg.kind == "dirac1d") {
        if (!cfg.essran) field_fail("family.essran", "dirac1d needs an essran descriptor");
        return PencilFamily::dirac1d(expr_required(cfg, "v"), *cfg.essran);
    }
    if (cfg.kind == "stokes1d") {
        if (!cfg.essran) field_fail("family.essran", "stokes1d needs an essran descriptor");
        return PencilFamily::stokes1d(cfg.gamma, cfg.delta, expr_required(cfg, "u"),
                                      *cfg.essran);
    }
    if (cfg.kind == "hain_lust") {
        if (!cfg.essran) field_fail("family.essran", "hain_lust needs an essran descriptor");
        return PencilFamily::hain_lust(expr_required(cfg, "q"), expr_required(cfg, "w"),
                                       expr_required(cfg, "v"), expr_required(cfg, "u"),
                                       *cfg.essran);
    }
    if (cfg.kind == "block2x2")
        return PencilFamily::block2x2_diag(
            expr_required(cfg, "c11"), expr_or(cfg, "c12", {0, 0}), expr_or(cfg, "c21", {0, 0}),
            expr_required(cfg, "c22"), expr_or(cfg, "b11", {1, 0}), expr_or(cfg, "b22", {1, 0}));
    if (cfg.kind == "literal") {
        if (!cfg.lit_a) field_fail("family.matrix_a", "literal family needs matrix_a");
        const CMatrix b = cfg.lit_b ? *cfg.lit_b : CMatrix::identity(cfg.lit_a->rows());
        return PencilFamily::literal(*cfg.lit_a, b);
    }
    if (cfg.kind == "multiplied") {
        if (!cfg.base) field_fail("family.base", "multiplied family needs a base");
        PencilFamily base = build_family(*cfg.base);
        Multiplier m = Multiplier::block_phase(0.0);
        if (cfg.mult_kind == "scalar")
            m = Multiplier::scalar(parse_expression(cfg.mult_fn));
        else if (cfg.mult_kind == "block_phase")
            m = Multiplier::block_phase(cfg.mult_theta);
        else if (cfg.mult_kind == "sl_rotation")
            m = sl_rotation_multiplier(cfg.mult_phi, cfg.mult_a, cfg.mult_b);
        else if (cfg.mult_kind == "hl_resolvent")
            m = Multiplier::hl_resolvent(cfg.mult_lambda, cfg.mult_eps);
        else
            field_fail("family.multiplier.kind", "unknown multiplier '" + cfg.mult_kind + "'");
        return PencilFamily::multiplied(std::move(base), std::move(m));
    }
    field_fail("family.kind", "unknown family kind '" + cfg.kind + "'");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    ExperimentConfig c;
    if (!j.contains("experiment")) field_fail("experiment", "missing");
    c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("family")) c.family = family_of(j.at("family"), "family");
    if (j.contains("truncations")) {
        for (const auto& t : j.at("truncations"))
            c.truncations.push_back(
                TruncationSpec{t.at("n").get<std::size_t>(), t.value("half_length", 0.0)});
    }
    if (j.contains("box")) {
        const auto& b = j.at("box");
        c.box = Box{b.at("re_min").get<double>(), b.at("re_max").get<double>(),
                    b.at("im_min").get<double>(), b.at("im_max").get<double>()};
    }
    c.nx = j.value("nx", std::size_t(800));
    c.ny = j.value("ny", std::size_t(800));
    c.angles = j.value("angles", std::size_t(720));
    if (j.contains("tail_depths"))
        c.tail_depths = j.at("tail_depths").get<std::vector<double>>();
    c.section_size = j.value("section_size", std::size_t(100));
    if (j.contains("targets"))
        for (const auto& t : j.at("targets")) c.targets.push_back(cplx_of(t, "targets"));
    c.base_n = j.value("base_n", std::size_t(20));
    c.search_depth = j.value("search_depth", std::size_t(60));
    if (j.contains("polar_shifts"))
        for (const auto& t : j.at("polar_shifts"))
            c.polar_shifts.push_back(cplx_of(t, "polar_shifts"));
    if (j.contains("matrix")) c.matrix = matrix_of(j.at("matrix"), "matrix");
    if (j.contains("enclosure"))
        c.enclosure = EnclosureSpec::from_json(j.at("enclosure").dump());
    c.tol_drift = j.value("tol_drift", 1e-3);
    c.min_persistence = j.value("min_persistence", std::size_t(2));
    if (j.contains("window")) {
        const auto& w = j.at("window");
        c.window = std::make_pair(w[0].get<double>(), w[1].get<double>());
    }
    c.use_ess_reference = j.value("use_ess_reference", false);
    c.figure_preset = j.value("figure_preset", std::string());
    c.seed = j.value("seed", std::uint64_t(1));
    c.threads = j.value("threads", std::size_t(0));
    c.out_dir = j.value("out_dir", std::string("out"));

    static const std::vector<std::string> kinds{
        "range", "pencil-range", "ess-range", "sweep", "inject", "enclosure", "figure"};
    if (std::find(kinds.begin(), kinds.end(), c.experiment) == kinds.end())
        field_fail("experiment", "unknown experiment kind '" + c.experiment + "'");
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["experiment"] = experiment;
    if (family) j["family"] = family_json(*family);
    if (!truncations.empty()) {
        json arr = json::array();
        for (const auto& t : truncations)
            arr.push_back({{"n", t.n}, {"half_length", t.half_length}});
        j["truncations"] = std::move(arr);
    }
    j["box"] = {{"re_min", box.re_min},
                {"re_max", box.re_max},
                {"im_min", box.im_min},
                {"im_max", box.im_max}};
    j["nx"] = nx;
    j["ny"] = ny;
    j["angles"] = angles;
    if (!tail_depths.empty()) j["tail_depths"] = tail_depths;
    j["section_size"] = section_size;
    if (!targets.empty()) {
        json arr = json::array();
        for (const cplx t : targets) arr.push_back(cplx_json(t));
        j["targets"] = std::move(arr);
    }
    j["base_n"] = base_n;
    j["search_depth"] = search_depth;
    if (!polar_shifts.empty()) {
        json arr = json::array();
        for (const cplx t : polar_shifts) arr.push_back(cplx_json(t));
        j["polar_shifts"] = std::move(arr);
    }
    if (matrix) j["matrix"] = matrix_json(*matrix);
    if (enclosure) j["enclosure"] = json::parse(enclosure->to_json());
    j["tol_drift"] = tol_drift;
    j["min_persistence"] = min_persistence;
    if (window) j["window"] = {window->first, window->second};
    j["use_ess_reference"] = use_ess_reference;
    if (!figure_preset.empty()) j["figure_preset"] = figure_preset;
    j["seed"] = seed;
    j["threads"] = threads;
    j["out_dir"] = out_dir;
    return j.dump(2);
}

CMatrix cmatrix_from_json(const std::string& text) {
    return matrix_of(json::parse(text), "matrix");
}

}  // namespace pencilrange
