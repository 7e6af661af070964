#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mechcluster/mechcluster.hpp"

using mechcluster::ConfigError;
using mechcluster::ConfigMap;
using mechcluster::ConfigValue;
using mechcluster::GraphKind;
using mechcluster::RowStatus;
using mechcluster::ScenarioConfig;
using mechcluster::SweepAxis;
using mechcluster::SystemParams;
using mechcluster::constants::two_pi;

namespace {

ConfigMap parse(const std::string& text) {
    std::istringstream in(text);
    return mechcluster::parse_config(in);
}

int error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        const auto pos = what.find("line ");
        REQUIRE(pos != std::string::npos);
        return std::atoi(what.c_str() + pos + 5);
    }
    FAIL("expected ConfigError");
    return -1;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("config parser handles the value grammar") {
    const ConfigMap map = parse(
        "# leading comment\n"
        "[scenario]\n"
        "graph_kind = \"linear\"  # trailing comment\n"
        "graph_n = 6\n"
        "squeezing = 1.5e0\n"
        "omega_mech_hz = [1e7, 2e7, 3e7]\n"
        "\n"
        "[sweep]\n"
        "axis = \"gamma\"\n"
        "values = [1e-6, 1e-4]\n"
        "\n"
        "[curve.a]\n"
        "graph_kind = \"complete\"\n");
    CHECK(map.at("scenario.graph_kind").text == "linear");
    CHECK(map.at("scenario.graph_n").number == 6.0);
    CHECK(map.at("scenario.squeezing").number == 1.5);
    CHECK(map.at("scenario.omega_mech_hz").numbers == std::vector<double>({1e7, 2e7, 3e7}));
    CHECK(map.at("sweep.axis").text == "gamma");
    CHECK(map.at("curve.a.graph_kind").text == "complete");
    CHECK(map.at("scenario.graph_n").line == 4);

    const ConfigMap hash = parse("[scenario]\ngraph_file = \"with#hash.txt\"\n");
    CHECK(hash.at("scenario.graph_file").text == "with#hash.txt");
}

TEST_CASE("config parser reports the offending line") {
    CHECK(error_line("[scenario]\ngraph_n = \n") == 2);
    CHECK(error_line("[scenario]\n\n\nbad line without equals\n") == 4);
    CHECK(error_line("[mystery]\n") == 1);
    CHECK(error_line("key = 1\n") == 1);
    CHECK(error_line("[scenario]\ngraph_n = 4\ngraph_n = 5\n") == 3);
    CHECK(error_line("[scenario]\nx = [1, \"a\"]\n") == 2);
    CHECK(error_line("[scenario]\nx = [1, 2\n") == 2);
    CHECK(error_line("[scenario]\nx = \"unterminated\n") == 2);
    CHECK(error_line("[scenario\n") == 1);
    CHECK(error_line("[curve]\n") == 1);
    CHECK(error_line("[curve.bad label]\n") == 1);
    CHECK(error_line("[scenario]\nnum = 1.2.3\n") == 2);
    CHECK_THROWS_AS(mechcluster::parse_config_file("missing_config.toml"), ConfigError);
}

TEST_CASE("scenario extraction applies defaults and rejects unknowns") {
    const ScenarioConfig cfg = mechcluster::scenario_from_config(parse(
        "[scenario]\n"
        "squeezing = 1.0\n"
        "temperature_k = 0.02\n"));
    CHECK(cfg.graph_kind == "linear");
    CHECK(cfg.graph_n == 4);
    CHECK(cfg.squeezing == 1.0);
    CHECK(cfg.temperature_k == 0.02);
    CHECK(cfg.kappa_over_omega_base == 0.02);
    CHECK(cfg.gamma_over_kappa == 5.0e-6);
    CHECK(cfg.gtilde_over_kappa == 0.16);
    CHECK(cfg.rwa_safety == 5.0);

    CHECK_THROWS_AS(mechcluster::scenario_from_config(parse("[scenario]\nbogus_key = 1\n")),
                    ConfigError);
    CHECK_THROWS_AS(mechcluster::scenario_from_config(parse("[scenario]\ngraph_n = \"four\"\n")),
                    ConfigError);
    CHECK_THROWS_AS(mechcluster::scenario_from_config(parse("[scenario]\ngraph_n = 4.5\n")),
                    ConfigError);
}

TEST_CASE("parameter resolution expands ratios against the ladder") {
    ScenarioConfig cfg;  // defaults: linear n=4 ladder at 10 MHz
    const Eigen::MatrixXd a = mechcluster::resolve_graph(cfg);
    REQUIRE(a.rows() == 4);
    const SystemParams p = mechcluster::resolve_params(cfg, a);
    const double obar = two_pi * 1.0e7;
    for (int j = 0; j < 4; ++j) CHECK(p.omega_m(j) == Catch::Approx((j + 1) * obar).epsilon(1e-15));
    CHECK(p.kappa(0) == Catch::Approx(0.02 * obar).epsilon(1e-15));
    CHECK(p.gamma(0) == Catch::Approx(5e-6 * 0.02 * obar).epsilon(1e-15));
    CHECK(p.g_tilde(0) == Catch::Approx(0.16 * 0.02 * obar).epsilon(1e-15));
    CHECK(p.squeezing == 2.0);
    CHECK(p.temperature == 0.010);
    CHECK(p.g_single.size() == 0);
    CHECK(p.delta.size() == 0);
    CHECK(p.omega_c.size() == 0);
}

TEST_CASE("parameter resolution honors explicit overrides") {
    ScenarioConfig cfg;
    cfg.graph_kind = "complete";
    cfg.graph_n = 3;
    cfg.omega_mech_hz = {1.0e7, 2.3e7, 3.1e7};
    cfg.kappa_hz = {2.0e5};        // scalar broadcast
    cfg.gamma_hz = {1.0, 2.0, 3.0};
    cfg.gtilde_hz = {3.0e4};
    cfg.delta_hz = {100.0};
    cfg.omega_cav_hz = {5.0e14, 5.1e14, 5.2e14};
    cfg.g_single_uniform = 120.0;
    const Eigen::MatrixXd a = mechcluster::resolve_graph(cfg);
    const SystemParams p = mechcluster::resolve_params(cfg, a);
    CHECK(p.omega_m(1) == Catch::Approx(two_pi * 2.3e7).epsilon(1e-15));
    CHECK(p.kappa(2) == Catch::Approx(two_pi * 2.0e5).epsilon(1e-15));
    CHECK(p.gamma(1) == Catch::Approx(two_pi * 2.0).epsilon(1e-15));
    CHECK(p.g_tilde(0) == Catch::Approx(two_pi * 3.0e4).epsilon(1e-15));
    CHECK(p.delta(2) == Catch::Approx(two_pi * 100.0).epsilon(1e-15));
    CHECK(p.omega_c(0) == Catch::Approx(two_pi * 5.0e14).epsilon(1e-15));
    CHECK(p.g_single(1, 2) == 120.0);

    // The kappa ratio is taken against the minimum spacing for explicit
    // frequency sets.
    ScenarioConfig ratio = cfg;
    ratio.kappa_hz.clear();
    const SystemParams pr = mechcluster::resolve_params(ratio, a);
    CHECK(pr.kappa(0) == Catch::Approx(0.02 * two_pi * 0.8e7).epsilon(1e-12));

    ScenarioConfig bad = cfg;
    bad.gamma_hz = {1.0, 2.0};
    CHECK_THROWS_AS(mechcluster::resolve_params(bad, a), ConfigError);
    bad = cfg;
    bad.omega_mech_hz = {1.0e7, 1.0e7, 2.0e7};
    CHECK_THROWS_AS(mechcluster::resolve_params(bad, a), ConfigError);
    bad = cfg;
    bad.g_single_uniform = -2.0;
    CHECK_THROWS_AS(mechcluster::resolve_params(bad, a), ConfigError);
}

TEST_CASE("graph and coupling files are loaded") {
    const std::string gpath = "exp_graph.txt";
    const std::string cpath = "exp_gsingle.txt";
    mechcluster::save_adjacency_file(gpath, mechcluster::make_graph(GraphKind::rectangular, 4));
    {
        std::ofstream out(cpath);
        Eigen::MatrixXd g = Eigen::MatrixXd::Constant(4, 4, 55.0);
        mechcluster::save_square_matrix(out, g);
    }
    ScenarioConfig cfg;
    cfg.graph_file = gpath;
    cfg.g_single_file = cpath;
    const Eigen::MatrixXd a = mechcluster::resolve_graph(cfg);
    CHECK(a == mechcluster::make_graph(GraphKind::rectangular, 4));
    const SystemParams p = mechcluster::resolve_params(cfg, a);
    CHECK(p.g_single(3, 3) == 55.0);

    ScenarioConfig missing;
    missing.graph_file = "exp_missing_graph.txt";
    CHECK_THROWS_AS(mechcluster::resolve_graph(missing), ConfigError);
    ScenarioConfig unknown;
    unknown.graph_kind = "ring";
    CHECK_THROWS_AS(mechcluster::resolve_graph(unknown), ConfigError);
    ScenarioConfig odd;
    odd.graph_kind = "rectangular";
    odd.graph_n = 5;
    CHECK_THROWS_AS(mechcluster::resolve_graph(odd), ConfigError);
    std::remove(gpath.c_str());
    std::remove(cpath.c_str());
}

TEST_CASE("sweep axes apply to the right knob") {
    ScenarioConfig cfg;
    cfg.gamma_hz = {3.0};
    mechcluster::apply_axis(cfg, SweepAxis::gamma, 1e-4);
    CHECK(cfg.gamma_hz.empty());
    CHECK(cfg.gamma_over_kappa == 1e-4);

    mechcluster::apply_axis(cfg, SweepAxis::temperature, 0.3);
    CHECK(cfg.temperature_k == 0.3);

    mechcluster::apply_axis(cfg, SweepAxis::modes, 8.0);
    CHECK(cfg.graph_n == 8);
    CHECK_THROWS_AS(mechcluster::apply_axis(cfg, SweepAxis::modes, 2.5), ConfigError);
    CHECK_THROWS_AS(mechcluster::apply_axis(cfg, SweepAxis::modes, 0.0), ConfigError);

    mechcluster::apply_axis(cfg, SweepAxis::squeezing, 3.25);
    CHECK(cfg.squeezing == 3.25);

    cfg.gtilde_hz = {5.0};
    mechcluster::apply_axis(cfg, SweepAxis::gtilde, 0.4);
    CHECK(cfg.gtilde_hz.empty());
    CHECK(cfg.gtilde_over_kappa == 0.4);

    CHECK(std::string(mechcluster::to_string(SweepAxis::modes)) == "n");
    CHECK(mechcluster::sweep_axis_from_string("r") == SweepAxis::squeezing);
    CHECK_THROWS_AS(mechcluster::sweep_axis_from_string("kappa"), ConfigError);
}

TEST_CASE("sweep specs are built from config") {
    SECTION("explicit values") {
        const auto spec = mechcluster::sweep_from_config(parse(
            "[scenario]\ngraph_n = 2\n[sweep]\naxis = \"gamma\"\nvalues = [1e-6, 1e-5, 1e-4]\n"));
        CHECK(spec.axis == SweepAxis::gamma);
        CHECK(spec.grid == std::vector<double>({1e-6, 1e-5, 1e-4}));
        REQUIRE(spec.curves.size() == 1);
        CHECK(spec.curves[0].label.empty());
        CHECK(spec.curves[0].scenario.graph_n == 2);
    }
    SECTION("log range") {
        const auto spec = mechcluster::sweep_from_config(
            parse("[scenario]\n[sweep]\naxis = \"gamma\"\nmin = 1e-8\nmax = 1e-4\npoints = 5\n"));
        REQUIRE(spec.grid.size() == 5);
        CHECK(spec.grid.front() == Catch::Approx(1e-8).epsilon(1e-12));
        CHECK(spec.grid[2] == Catch::Approx(1e-6).epsilon(1e-12));
        CHECK(spec.grid.back() == Catch::Approx(1e-4).epsilon(1e-12));
    }
    SECTION("linear range") {
        const auto spec = mechcluster::sweep_from_config(
            parse("[scenario]\n[sweep]\naxis = \"r\"\nmin = 0\nmax = 4\npoints = 5\n"));
        CHECK(spec.grid == std::vector<double>({0.0, 1.0, 2.0, 3.0, 4.0}));
    }
    SECTION("curves inherit the base scenario") {
        const auto spec = mechcluster::sweep_from_config(parse(
            "[scenario]\nsqueezing = 1.25\ngraph_n = 6\n"
            "[sweep]\naxis = \"temperature\"\nvalues = [0.01, 0.1]\n"
            "[curve.b]\ngraph_kind = \"complete\"\n"
            "[curve.a]\ngraph_kind = \"linear\"\n"));
        REQUIRE(spec.curves.size() == 2);
        CHECK(spec.curves[0].label == "a");
        CHECK(spec.curves[1].label == "b");
        CHECK(spec.curves[0].scenario.squeezing == 1.25);
        CHECK(spec.curves[1].scenario.squeezing == 1.25);
        CHECK(spec.curves[1].scenario.graph_kind == "complete");
        CHECK(spec.curves[1].scenario.graph_n == 6);
    }
    SECTION("rejects bad ranges") {
        CHECK_THROWS_AS(mechcluster::sweep_from_config(parse("[scenario]\n")), ConfigError);
        CHECK_THROWS_AS(mechcluster::sweep_from_config(
                            parse("[sweep]\naxis = \"gamma\"\nmin = 1e-8\nmax = 1e-4\npoints = 1\n")),
                        ConfigError);
        CHECK_THROWS_AS(mechcluster::sweep_from_config(
                            parse("[sweep]\naxis = \"gamma\"\nmin = 1e-4\nmax = 1e-8\npoints = 3\n")),
                        ConfigError);
        CHECK_THROWS_AS(mechcluster::sweep_from_config(
                            parse("[sweep]\naxis = \"gamma\"\nmin = 0\nmax = 1\npoints = 3\n")),
                        ConfigError);
        CHECK_THROWS_AS(mechcluster::sweep_from_config(
                            parse("[sweep]\naxis = \"gamma\"\nvalues = [1e-3]\nbogus = 1\n")),
                        ConfigError);
        CHECK_THROWS_AS(
            mechcluster::sweep_from_config(parse(
                "[scenario]\ngraph_file = \"g.txt\"\n[sweep]\naxis = \"n\"\nvalues = [4, 6]\n")),
            ConfigError);
    }
}

TEST_CASE("point evaluation fills the quality metrics") {
    ScenarioConfig cfg;  // default operating point
    const auto row = mechcluster::run_point(cfg);
    REQUIRE(row.status == RowStatus::ok);
    CHECK(row.fidelity == Catch::Approx(0.86392681801107585).epsilon(1e-9));
    REQUIRE(row.nullifier_variance.size() == 4);
    CHECK(row.null_db_min <= row.null_db_max);
    CHECK(row.null_db_min == Catch::Approx(10.0 * std::log10(0.019626129620831989)).epsilon(1e-7));
    CHECK(row.xi_star == Catch::Approx(7452.699294966619).epsilon(1e-10));
    CHECK(row.coop_min > 0.0);
    CHECK(row.rwa_ratio == Catch::Approx(0.02).epsilon(1e-12));  // cavity sideband ratio dominates
    CHECK(row.rwa_pass_first_order);
    CHECK_FALSE(row.rwa_pass_full);  // harmonic ladder: resonant mediated channels
    CHECK(row.stability == Catch::Approx(-72770.783696513055).epsilon(1e-9));
    CHECK(row.physicality >= -1e-9);
}

TEST_CASE("point evaluation reports failure classes") {
    ScenarioConfig bad;
    bad.graph_kind = "ring";
    const auto cfg_row = mechcluster::run_point(bad);
    CHECK(cfg_row.status == RowStatus::config_error);
    CHECK_FALSE(cfg_row.error.empty());

    ScenarioConfig unstable;
    unstable.kappa_hz = {0.0};
    unstable.gamma_hz = {0.0};
    const auto phys_row = mechcluster::run_point(unstable);
    CHECK(phys_row.status == RowStatus::physics_error);
    CHECK(phys_row.error.find("Hurwitz") != std::string::npos);

    ScenarioConfig strict;  // default point passes at safety 5 but not at 1e6
    strict.rwa_safety = 1.0e6;
    CHECK(mechcluster::run_point(strict, false).status == RowStatus::ok);
    const auto strict_row = mechcluster::run_point(strict, true);
    CHECK(strict_row.status == RowStatus::physics_error);
    CHECK(strict_row.error.find("rwa margin") != std::string::npos);
}

TEST_CASE("presets build the documented studies") {
    CHECK(mechcluster::preset_names().size() == 8);
    CHECK_THROWS_AS(mechcluster::make_preset("fig1"), ConfigError);

    const auto fig2 = mechcluster::make_preset("fig2");
    CHECK(fig2.axis == SweepAxis::gamma);
    REQUIRE(fig2.grid.size() == 61);
    CHECK(fig2.grid.front() == Catch::Approx(1e-8).epsilon(1e-12));
    CHECK(fig2.grid.back() == Catch::Approx(1e-1).epsilon(1e-12));
    REQUIRE(fig2.curves.size() == 6);
    CHECK(fig2.curves[0].label == "complete_n10");
    CHECK(fig2.curves[5].label == "rectangular_n4");
    for (const auto& curve : fig2.curves) {
        CHECK(curve.scenario.squeezing == 2.0);
        CHECK(curve.scenario.temperature_k == 0.010);
        CHECK(curve.scenario.rwa_safety == 5.0);
    }

    const auto fig4 = mechcluster::make_preset("fig4");
    CHECK(fig4.axis == SweepAxis::temperature);
    CHECK(fig4.grid.size() == 61);
    CHECK(fig4.grid.front() == Catch::Approx(1e-3).epsilon(1e-12));
    CHECK(fig4.grid.back() == Catch::Approx(1.0).epsilon(1e-12));

    const auto fig6 = mechcluster::make_preset("fig6");
    CHECK(fig6.axis == SweepAxis::modes);
    CHECK(fig6.grid == std::vector<double>({4, 6, 8, 10, 12, 14, 16, 18, 20}));
    REQUIRE(fig6.curves.size() == 3);
    CHECK(fig6.curves[0].label == "complete");

    const auto fig7 = mechcluster::make_preset("fig7");
    CHECK(fig7.axis == SweepAxis::squeezing);
    REQUIRE(fig7.grid.size() == 41);
    CHECK(fig7.grid.front() == 0.0);
    CHECK(fig7.grid.back() == 4.0);
    CHECK(fig7.grid[20] == Catch::Approx(2.0).epsilon(1e-14));

    const auto fig9 = mechcluster::make_preset("fig9");
    CHECK(fig9.axis == SweepAxis::gtilde);
    CHECK(fig9.grid.front() == Catch::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("preset operating points respect the first-order margins") {
    for (const auto& name : mechcluster::preset_names()) {
        const auto spec = mechcluster::make_preset(name);
        for (const auto& curve : spec.curves) {
            const Eigen::MatrixXd a = mechcluster::resolve_graph(curve.scenario);
            const SystemParams p = mechcluster::resolve_params(curve.scenario, a);
            const auto report = mechcluster::check_rwa(p, a, curve.scenario.rwa_safety);
            INFO(name << " curve " << curve.label);
            CHECK(report.pass_first_order);
        }
    }
    // The mediated families sit on exact ladder resonances, so the full
    // margin honestly fails at the default linewidth.
    const auto spec = mechcluster::make_preset("fig2");
    const auto& base = spec.curves[2];  // linear_n10
    const Eigen::MatrixXd a = mechcluster::resolve_graph(base.scenario);
    const SystemParams p = mechcluster::resolve_params(base.scenario, a);
    CHECK_FALSE(mechcluster::check_rwa(p, a, base.scenario.rwa_safety).pass_full);
}

TEST_CASE("quality factors of the ladder span the documented range") {
    ScenarioConfig cfg = mechcluster::make_preset("fig6").curves[1].scenario;  // linear
    cfg.graph_n = 20;
    const Eigen::MatrixXd a = mechcluster::resolve_graph(cfg);
    const SystemParams p = mechcluster::resolve_params(cfg, a);
    REQUIRE(p.n == 20);
    CHECK(p.omega_m(0) / p.gamma(0) == Catch::Approx(1.0e7).epsilon(1e-12));
    CHECK(p.omega_m(19) / p.gamma(19) == Catch::Approx(2.0e8).epsilon(1e-12));
}

TEST_CASE("sweep writes one schema-stable CSV per curve") {
    const auto spec = mechcluster::sweep_from_config(parse(
        "[scenario]\ngraph_n = 2\n"
        "[sweep]\naxis = \"gamma\"\nvalues = [1e-7, 1e-5, 1e-3]\n"
        "[curve.a]\ngraph_kind = \"linear\"\n"
        "[curve.b]\ngraph_kind = \"complete\"\n"));
    mechcluster::SweepOptions options;
    options.out_path = "exp_sweep.csv";
    const auto outcome = mechcluster::run_sweep(spec, options);
    CHECK(outcome.points == 6);
    CHECK(outcome.failures == 0);
    REQUIRE(outcome.files == std::vector<std::string>({"exp_sweep_a.csv", "exp_sweep_b.csv"}));
    CHECK(outcome.metadata_file == "exp_sweep.csv.meta.json");
    CHECK_FALSE(std::filesystem::exists("exp_sweep_a.csv.tmp"));

    const auto lines = read_lines("exp_sweep_a.csv");
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "axis_name,axis_value,fidelity,null_var_1,null_var_2,"
                      "null_db_min,null_db_max,xi_star,coop_min,rwa_ratio,stability,error");
    double prev_f = 1.0;
    for (int i = 1; i < 4; ++i) {
        const auto cells = split(lines[i], ',');
        REQUIRE(cells.size() == 12);
        CHECK(cells[0] == "gamma");
        CHECK(std::stod(cells[1]) == Catch::Approx(spec.grid[i - 1]).epsilon(1e-15));
        const double f = std::stod(cells[2]);
        CHECK(f < prev_f);
        prev_f = f;
        CHECK(cells[11].empty());
    }

    // Sidecar metadata is valid JSON and carries the balance linewidth for
    // damping sweeps.
    const auto meta = nlohmann::json::parse(read_file("exp_sweep.csv.meta.json"));
    CHECK(meta["tool"] == "mechcluster");
    CHECK(meta["axis"] == "gamma");
    CHECK(meta["grid"].size() == 3);
    CHECK(meta["strict_rwa"] == false);
    REQUIRE(meta["curves"].size() == 2);
    CHECK(meta["curves"][0]["label"] == "a");
    CHECK(meta["curves"][0]["points"] == 3);
    CHECK(meta["curves"][0]["failures"] == 0);
    CHECK(meta["curves"][0]["n"] == 2);
    CHECK(meta["curves"][0].contains("gamma_star_over_kappa"));
}

TEST_CASE("sidecar balance linewidth matches the frozen value") {
    auto spec = mechcluster::make_preset("fig2");
    // Keep only the complete_n4 curve and two points to stay fast.
    spec.curves = {spec.curves[1]};
    REQUIRE(spec.curves[0].label == "complete_n4");
    spec.grid = {1e-6, 1e-5};
    mechcluster::SweepOptions options;
    options.out_path = "exp_gstar.csv";
    mechcluster::run_sweep(spec, options);
    const auto meta = nlohmann::json::parse(read_file("exp_gstar.csv.meta.json"));
    CHECK(meta["curves"][0]["gamma_star_over_kappa"].get<double>()
          == Catch::Approx(8.633089166628875e-05).epsilon(1e-12));
}

TEST_CASE("sweep rows survive bad points") {
    const auto spec = mechcluster::sweep_from_config(parse(
        "[scenario]\ngraph_n = 2\n"
        "[sweep]\naxis = \"gamma\"\nvalues = [1e-6, -1.0, 1e-2]\n"));
    mechcluster::SweepOptions options;
    options.out_path = "exp_partial.csv";
    const auto outcome = mechcluster::run_sweep(spec, options);
    CHECK(outcome.points == 3);
    CHECK(outcome.failures == 1);
    const auto lines = read_lines("exp_partial.csv");
    REQUIRE(lines.size() == 4);
    const auto good = split(lines[1], ',');
    const auto bad = split(lines[2], ',');
    REQUIRE(good.size() == bad.size());
    CHECK(std::stod(bad[1]) == -1.0);
    for (size_t i = 2; i + 1 < bad.size(); ++i) CHECK(bad[i].empty());
    CHECK_FALSE(bad.back().empty());
    CHECK(bad.back().find(',') == std::string::npos);
}

TEST_CASE("sweep output is independent of the thread count") {
    const std::string config =
        "[scenario]\ngraph_n = 2\n"
        "[sweep]\naxis = \"r\"\nmin = 0\nmax = 2\npoints = 5\n"
        "[curve.a]\ngraph_kind = \"linear\"\n"
        "[curve.b]\ngraph_kind = \"complete\"\n";
    const auto spec = mechcluster::sweep_from_config(parse(config));

    mechcluster::SweepOptions serial;
    serial.out_path = "exp_serial.csv";
    serial.jobs = 1;
    mechcluster::run_sweep(spec, serial);

    mechcluster::SweepOptions parallel;
    parallel.out_path = "exp_parallel.csv";
    parallel.jobs = 4;
    mechcluster::run_sweep(spec, parallel);

    CHECK(read_file("exp_serial_a.csv") == read_file("exp_parallel_a.csv"));
    CHECK(read_file("exp_serial_b.csv") == read_file("exp_parallel_b.csv"));
    // Sidecars differ only in the embedded file names.
    auto meta_s = nlohmann::json::parse(read_file("exp_serial.csv.meta.json"));
    auto meta_p = nlohmann::json::parse(read_file("exp_parallel.csv.meta.json"));
    for (auto* m : {&meta_s, &meta_p})
        for (auto& curve : (*m)["curves"]) curve.erase("file");
    CHECK(meta_s == meta_p);
}

TEST_CASE("sweep rejects colliding or missing outputs") {
    auto spec = mechcluster::sweep_from_config(parse(
        "[scenario]\n[sweep]\naxis = \"gamma\"\nvalues = [1e-6, 1e-5]\n"
        "[curve.a]\ngraph_n = 4\n[curve.b]\ngraph_n = 4\n"));
    REQUIRE(spec.curves.size() == 2);
    mechcluster::SweepOptions options;
    CHECK_THROWS_AS(mechcluster::run_sweep(spec, options), ConfigError);  // no out_path
    options.out_path = "exp_x.csv";
    options.jobs = 0;
    CHECK_THROWS_AS(mechcluster::run_sweep(spec, options), ConfigError);
    options.jobs = 1;
    spec.curves[1].label = "a";  // same file name twice
    CHECK_THROWS_AS(mechcluster::run_sweep(spec, options), ConfigError);
}

TEST_CASE("emitted config reproduces the sweep") {
    const auto spec = mechcluster::make_preset("fig2");
    const std::string text = mechcluster::emit_config(spec);
    const auto back = mechcluster::sweep_from_config(parse(text));
    CHECK(back.axis == spec.axis);
    REQUIRE(back.grid.size() == spec.grid.size());
    for (size_t i = 0; i < spec.grid.size(); ++i) CHECK(back.grid[i] == spec.grid[i]);
    REQUIRE(back.curves.size() == spec.curves.size());
    for (size_t i = 0; i < spec.curves.size(); ++i) {
        CHECK(back.curves[i].label == spec.curves[i].label);
        const auto& a = back.curves[i].scenario;
        const auto& b = spec.curves[i].scenario;
        CHECK(a.graph_kind == b.graph_kind);
        CHECK(a.graph_n == b.graph_n);
        CHECK(a.squeezing == b.squeezing);
        CHECK(a.temperature_k == b.temperature_k);
        CHECK(a.omega_base_hz == b.omega_base_hz);
        CHECK(a.kappa_over_omega_base == b.kappa_over_omega_base);
        CHECK(a.gamma_over_kappa == b.gamma_over_kappa);
        CHECK(a.gtilde_over_kappa == b.gtilde_over_kappa);
        CHECK(a.rwa_safety == b.rwa_safety);
    }

    mechcluster::SweepSpec unlabeled;
    unlabeled.axis = SweepAxis::gamma;
    unlabeled.grid = {1e-6};
    unlabeled.curves = {{"", ScenarioConfig()}, {"b", ScenarioConfig()}};
    CHECK_THROWS_AS(mechcluster::emit_config(unlabeled), ConfigError);
}

TEST_CASE("mode-count sweeps pad the nullifier columns") {
    const auto spec = mechcluster::sweep_from_config(parse(
        "[scenario]\ngraph_kind = \"linear\"\n[sweep]\naxis = \"n\"\nvalues = [2, 4]\n"));
    mechcluster::SweepOptions options;
    options.out_path = "exp_modes.csv";
    const auto outcome = mechcluster::run_sweep(spec, options);
    CHECK(outcome.failures == 0);
    const auto lines = read_lines("exp_modes.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].find("null_var_4") != std::string::npos);
    const auto small = split(lines[1], ',');
    const auto large = split(lines[2], ',');
    REQUIRE(small.size() == large.size());
    CHECK(small[3].empty() == false);  // null_var_1 present for n=2
    CHECK(small[5].empty());           // null_var_3 padded for n=2
    CHECK(small[6].empty());           // null_var_4 padded for n=2
    CHECK_FALSE(large[6].empty());
}
