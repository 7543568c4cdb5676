#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pencilrange/config.hpp"
#include "pencilrange/expr.hpp"
#include "pencilrange/runner.hpp"
#include "pencilrange/svg.hpp"

using namespace pencilrange;

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace

TEST_CASE("expression parser evaluates the coefficient grammar") {
    auto f = parse_expression("x^2 + 1");
    CHECK(std::abs(f(3.0) - cplx(10, 0)) <= 1e-14);

    auto g = parse_expression("i*x^3");
    CHECK(std::abs(g(2.0) - cplx(0, 8)) <= 1e-14);

    auto h = parse_expression("exp(-x^2) * cos(x) - 2*step(-1, 1)");
    const double x = 0.5;
    CHECK(std::abs(h(x) - cplx(std::exp(-0.25) * std::cos(0.5) - 2.0, 0)) <= 1e-14);
    CHECK(std::abs(h(3.0) - cplx(std::exp(-9.0) * std::cos(3.0), 0)) <= 1e-14);

    auto s = parse_expression("sign(x - 2)");
    CHECK(std::abs(s(5.0) - cplx(1, 0)) <= 1e-14);
    CHECK(std::abs(s(0.0) - cplx(-1, 0)) <= 1e-14);

    auto p = parse_expression("2^x");
    CHECK(std::abs(p(3.0) - cplx(8, 0)) <= 1e-12);
    // right associativity: 2^(3^2)
    auto q = parse_expression("2^3^2");
    CHECK(std::abs(q(0.0) - cplx(512, 0)) <= 1e-9);

    CHECK_THROWS_AS((void)parse_expression("x +"), ConfigError);
    CHECK_THROWS_AS((void)parse_expression("frob(x)"), ConfigError);
    CHECK_THROWS_AS((void)parse_expression("step(1)"), ConfigError);
}

TEST_CASE("svg layers render deterministically") {
    const Box box{-1, 1, -1, 1};
    Raster empty(box, 8, 8);
    const std::string svg1 = emit_svg({SvgLayer::fill(empty, "#dddddd")}, box);
    CHECK(svg1.find("<svg") != std::string::npos);
    CHECK(count_occurrences(svg1, "<line") == 2);  // both axes visible

    const std::string pts =
        emit_svg({SvgLayer::points({cplx(0, 0), cplx(0.5, 0.5), cplx(-0.25, 0.3)}, "#c03a2b")},
                 box);
    CHECK(count_occurrences(pts, "<circle") == 3);

    const std::string again =
        emit_svg({SvgLayer::points({cplx(0, 0), cplx(0.5, 0.5), cplx(-0.25, 0.3)}, "#c03a2b")},
                 box);
    CHECK(pts == again);
}

TEST_CASE("config parses, validates and round-trips") {
    const std::string text = R"({
        "experiment": "sweep",
        "family": {"kind": "diagonal", "a": "x^2+x", "b": "x^2"},
        "truncations": [{"n": 10}, {"n": 20}, {"n": 40}],
        "box": {"re_min": -1, "re_max": 3, "im_min": -1, "im_max": 1},
        "nx": 100, "ny": 41, "tol_drift": 1e-6, "seed": 7,
        "out_dir": "out_test"
    })";
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(text);
    CHECK(cfg.experiment == "sweep");
    CHECK(cfg.truncations.size() == 3);
    CHECK(cfg.family->kind == "diagonal");
    CHECK(cfg.seed == 7);

    const std::string out = cfg.to_json_text();
    const ExperimentConfig cfg2 = ExperimentConfig::from_json_text(out);
    CHECK(cfg2.to_json_text() == out);  // fixed point
    CHECK(cfg2.truncations.size() == cfg.truncations.size());
    CHECK(cfg2.family->exprs.at("a") == "x^2+x");

    CHECK_THROWS_AS((void)ExperimentConfig::from_json_text("{\"experiment\": \"nope\"}"),
                    ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_text("not json"), ConfigError);
}

TEST_CASE("built families from config match direct construction") {
    FamilyConfig fc;
    fc.kind = "diagonal";
    fc.exprs["a"] = "x^2+x";
    fc.exprs["b"] = "x^2";
    const PencilFamily fam = build_family(fc);
    const PencilSection s = section(fam, TruncationSpec::diag(3));
    CHECK(s.A(2, 2) == cplx(12, 0));
    CHECK(s.B(2, 2) == cplx(9, 0));

    FamilyConfig sl;
    sl.kind = "sl_indefinite";
    sl.m_minus = 1.0;
    sl.m_plus = 1.0;
    sl.exprs["well"] = "-2*exp(-x^2)";
    const PencilFamily slf = build_family(sl);
    const PencilSection ss = section(slf, TruncationSpec::interval(5.0, 49));
    CHECK(ss.B(0, 0) == cplx(-1, 0));
}

TEST_CASE("runner writes deterministic artifacts and honors exit codes") {
    const fs::path dir = fs::temp_directory_path() / "pencilrange_test_run";
    fs::remove_all(dir);

    ExperimentConfig cfg;
    cfg.experiment = "sweep";
    cfg.family = FamilyConfig{};
    cfg.family->kind = "jt_pencil";
    cfg.truncations = {TruncationSpec::diag(6), TruncationSpec::diag(10),
                       TruncationSpec::diag(14)};
    cfg.box = Box{-8, 8, -1, 1};
    cfg.nx = 120;
    cfg.ny = 31;
    cfg.tol_drift = 1e-8;
    cfg.out_dir = (dir / "a").string();

    const RunResult r1 = run_experiment(cfg);
    CHECK(r1.exit_code == 0);
    REQUIRE_FALSE(r1.artifacts.empty());

    cfg.out_dir = (dir / "b").string();
    const RunResult r2 = run_experiment(cfg);
    CHECK(r2.exit_code == 0);

    // identical config + seed => byte-identical outputs
    CHECK(slurp((dir / "a" / "sweep.json").string()) ==
          slurp((dir / "b" / "sweep.json").string()));
    CHECK(slurp((dir / "a" / "sweep.csv").string()) == slurp((dir / "b" / "sweep.csv").string()));
    CHECK(slurp((dir / "a" / "sweep.svg").string()) == slurp((dir / "b" / "sweep.svg").string()));

    // validation failure: exit 2
    ExperimentConfig bad = cfg;
    bad.experiment = "pencil-range";
    bad.family.reset();
    bad.out_dir = (dir / "c").string();
    CHECK(run_experiment(bad).exit_code == 2);
    fs::remove_all(dir);
}

TEST_CASE("minimal range config produces support JSON and SVG") {
    const fs::path dir = fs::temp_directory_path() / "pencilrange_test_range";
    fs::remove_all(dir);
    ExperimentConfig cfg;
    cfg.experiment = "range";
    cfg.matrix = CMatrix::from_rows(2, 2, {cplx(0, 0), cplx(1, 0), cplx(0, 0), cplx(0, 0)});
    cfg.box = Box{-1, 1, -1, 1};
    cfg.nx = 50;
    cfg.ny = 50;
    cfg.angles = 128;
    cfg.out_dir = dir.string();
    const RunResult r = run_experiment(cfg);
    CHECK(r.exit_code == 0);
    const std::string support = slurp((dir / "support.json").string());
    CHECK(support.find("\"angles_count\":128") != std::string::npos);
    const std::string svg = slurp((dir / "range.svg").string());
    CHECK(svg.find("<svg") != std::string::npos);
    fs::remove_all(dir);
}
