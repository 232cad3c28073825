#include <mest/io.hpp>

#include <nlohmann/json.hpp>

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace mest;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mest_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("csv loading with header auto-detection") {
    TempDir dir;
    const std::string path = dir.file("data.csv");
    write(path, "x1,x2,y\n1,2,3\n4,5,6\n");
    const Matrix m = io::load_csv_matrix(path);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 2) == 6.0);

    write(dir.file("noheader.csv"), "1.5,2\n-3e2,0.25\n");
    const Matrix m2 = io::load_csv_matrix(dir.file("noheader.csv"));
    CHECK(m2(1, 0) == -300.0);
    CHECK(m2(1, 1) == 0.25);
}

TEST_CASE("csv parse errors carry line numbers") {
    TempDir dir;
    const std::string path = dir.file("bad.csv");
    write(path, "1,2\n3,oops\n");
    CHECK_THROWS_WITH_AS(io::load_csv_matrix(path), doctest::Contains(":2:"), IoError);

    write(dir.file("ragged.csv"), "1,2\n3\n");
    CHECK_THROWS_WITH_AS(io::load_csv_matrix(dir.file("ragged.csv")), doctest::Contains(":2:"),
                         IoError);

    write(dir.file("empty.csv"), "\n\n");
    CHECK_THROWS_AS(io::load_csv_matrix(dir.file("empty.csv")), IoError);
    CHECK_THROWS_AS(io::load_csv_matrix(dir.file("missing.csv")), IoError);
}

TEST_CASE("atomic writes leave no staging file") {
    TempDir dir;
    const std::string path = dir.file("out.txt");
    io::write_file_atomic(path, "payload");
    CHECK(fs::exists(path));
    CHECK_FALSE(fs::exists(path + ".tmp"));
    std::ifstream in(path);
    std::string content;
    std::getline(in, content);
    CHECK(content == "payload");
}

TEST_CASE("records csv schema") {
    ConvergenceRecord r;
    r.n = 100;
    r.rep = 3;
    r.error_norm = 0.25;
    r.d_n = 0.02;
    r.converged = true;
    r.wall_ms = 1.5;
    const std::string csv = io::records_to_csv({r});
    CHECK(csv.find("n,rep,error_norm,d_n,converged,wall_ms") == 0);
    CHECK(csv.find("100,3,0.25,0.02,1,1.5") != std::string::npos);
}

TEST_CASE("loss specs parse per the documented schema") {
    CHECK(io::parse_loss(io::json::parse(R"({"kind":"huber","c":1.345})")).kind() ==
          LossKind::huber);
    CHECK(io::parse_loss(io::json::parse(R"({"kind":"power","q":1.5})")).param() == 1.5);
    CHECK(io::parse_loss(io::json::parse(R"({"kind":"quantile","alpha":0.5})")).kind() ==
          LossKind::quantile);
    CHECK_THROWS_AS(io::parse_loss(io::json::parse(R"({"kind":"tukey"})")), ConfigError);
    CHECK_THROWS_AS(io::parse_loss(io::json::parse(R"("huber")")), ConfigError);

    const ConvexLoss loss = ConvexLoss::huber(2.0);
    CHECK(io::parse_loss(io::loss_to_json(loss)).param() == 2.0);
}

TEST_CASE("distribution specs parse per the documented schema") {
    CHECK(io::parse_distribution(io::json::parse(R"({"kind":"cauchy","scale":1.0})")).kind() ==
          DistKind::cauchy);
    const auto lp =
        io::parse_distribution(io::json::parse(R"({"kind":"logpareto","x0":2.718281828459045})"));
    CHECK(lp.kind() == DistKind::log_pareto);
    CHECK(io::parse_distribution(io::json::parse(R"({"kind":"student_t","nu":2.5})")).param() ==
          2.5);
    CHECK_THROWS_AS(io::parse_distribution(io::json::parse(R"({"kind":"uniform"})")), ConfigError);
}

TEST_CASE("experiment config parsing") {
    const auto spec = io::json::parse(R"({
        "label": "demo",
        "loss": {"kind":"huber","c":1.345},
        "dist": {"kind":"cauchy","scale":1.0},
        "design": {"kind":"orthogonal_blocks","p":2},
        "beta0": [1,-2],
        "n_grid": [100, 200],
        "reps": 3,
        "seed": 99
    })");
    const ExperimentConfig config = io::parse_experiment(spec);
    CHECK(config.label == "demo");
    CHECK(config.design.p == 2);
    CHECK(config.beta0[1] == -2.0);
    CHECK(config.n_grid.size() == 2);
    CHECK(config.seed == 99);

    auto missing = spec;
    missing.erase("loss");
    CHECK_THROWS_AS(io::parse_experiment(missing), ConfigError);

    // beta0 defaults to the documented pattern
    auto no_beta = spec;
    no_beta.erase("beta0");
    CHECK(io::parse_experiment(no_beta).beta0[0] == 1.0);
}

TEST_CASE("solver opts parsing with defaults") {
    const auto opts = io::parse_solver_opts(io::json::parse(R"({"grad_tol":1e-6,"max_iter":50})"));
    CHECK(opts.grad_tol == 1e-6);
    CHECK(opts.max_iter == 50);
    CHECK(opts.obj_tol == 1e-9);
    CHECK(opts.smooth_init == 1e-2);
    CHECK(opts.smooth_final == 1e-8);
}

TEST_CASE("weight specs") {
    CHECK(io::parse_weights(io::json::parse(R"({"kind":"one_over_n"})")).kind ==
          WeightSpec::Kind::one_over_n);
    const auto w = io::parse_weights(io::json::parse(
        R"({"kind":"design_column","column":1,"design":{"kind":"orthogonal_blocks","p":2}})"));
    CHECK(w.column == 1);
    CHECK_THROWS_AS(io::parse_weights(io::json::parse(R"({"kind":"bogus"})")), ConfigError);
}

TEST_CASE("design spec parsing") {
    const auto d = io::parse_design(io::json::parse(R"({"kind":"decay","p":3,"delta":0.5})"));
    CHECK(d.kind == DesignGenSpec::Kind::decay);
    CHECK(d.delta == 0.5);
    CHECK_THROWS_AS(io::parse_design(io::json::parse(R"({"kind":"decay","p":3})")), ConfigError);
}
