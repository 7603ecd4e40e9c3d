#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

#include "cli.hpp"
#include "flatmaj/config.hpp"
#include "flatmaj/dense.hpp"
#include "flatmaj/errors.hpp"
#include "flatmaj/json_io.hpp"
#include "flatmaj/sampling.hpp"
#include "flatmaj/version.hpp"

using namespace flatmaj;
using testutil::make_pair;
using testutil::single;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("flatmaj");
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() / "flatmaj_cli_tests";
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
    const std::filesystem::path path = scratch_dir() / name;
    std::ofstream f(path);
    f << text;
    return path.string();
}

std::string pair_file(const std::string& name, const FlatPair& p) {
    return write_scratch(name, stable_dump(pair_to_json(p)));
}

const FlatPair kTwoBlock = make_pair({Block(0.3, 0.5, 0.7), Block(0.7, 0.5, 0.2)});

}  // namespace

TEST_SUITE_BEGIN("io_cli");

TEST_CASE("pair wire format round trips with labels and one-sided rows") {
    FlatPair fp = make_pair({Block(0.5, 0.25, 0.81), Block(0.2, 0.75, 0.64), Block(0.3, 0.0)});
    fp.label = "demo";
    const nlohmann::json j = pair_to_json(fp);
    CHECK(j.at("label") == "demo");
    REQUIRE(j.at("blocks").size() == 3);
    CHECK(j["blocks"][0]["F"].get<double>() == 0.81);
    CHECK(j["blocks"][2]["F"].is_null());

    const FlatPair back = pair_from_json(nlohmann::json::parse(stable_dump(j)));
    CHECK(back.label == "demo");
    CHECK(approx_equal(fp, back, 1e-15));
}

TEST_CASE("matrix and channel wire formats round trip exactly") {
    auto gen = testutil::rng(8101);
    const Matrix m = random_density(3, gen);
    const Matrix back = matrix_from_json(nlohmann::json::parse(stable_dump(matrix_to_json(m))));
    REQUIRE(back.rows() == 3);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

    const ChannelRep ch = random_channel(3, 2, 4, gen);
    const ChannelRep rt = channel_from_json(channel_to_json(ch));
    CHECK(rt.dim_in() == 3);
    CHECK(rt.dim_out() == 2);
    REQUIRE(rt.kraus.size() == ch.kraus.size());
    for (std::size_t k = 0; k < ch.kraus.size(); ++k)
        CHECK((rt.kraus[k] - ch.kraus[k]).cwiseAbs().maxCoeff() == 0.0);
    const Matrix rho = random_density(3, gen);
    CHECK((rt.apply(rho) - ch.apply(rho)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("wire formats reject malformed payloads") {
    CHECK_THROWS_AS(pair_from_json(nlohmann::json::array()), MalformedInput);
    CHECK_THROWS_AS(pair_from_json(nlohmann::json::parse(R"({"blocks": 5})")), MalformedInput);
    CHECK_THROWS_AS(pair_from_json(nlohmann::json::parse(R"({"blocks": [{"p": 0.5}]})")),
                    MalformedInput);
    CHECK_THROWS_AS(
        pair_from_json(nlohmann::json::parse(R"({"blocks": [{"p": "x", "q": 1.0}]})")),
        MalformedInput);

    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"dim": 2, "data": [[1, 0]]})")),
                    MalformedInput);
    CHECK_THROWS_AS(
        matrix_from_json(nlohmann::json::parse(R"({"dim": 1, "data": [[1, 0, 0]]})")),
        MalformedInput);

    auto gen = testutil::rng(8102);
    nlohmann::json bad = channel_to_json(random_channel(2, 3, 2, gen));
    bad["dim_out"] = 5;
    CHECK_THROWS_AS(channel_from_json(bad), MalformedInput);
}

TEST_CASE("json numbers drop non finite values") {
    CHECK(json_number(1.5).get<double>() == 1.5);
    CHECK(json_number(std::numeric_limits<double>::infinity()).is_null());
    CHECK(json_number(std::numeric_limits<double>::quiet_NaN()).is_null());
}

TEST_CASE("stable dump sorts keys and is byte identical for equal values") {
    nlohmann::json a;
    a["beta"] = 1;
    a["alpha"] = true;
    nlohmann::json b;
    b["alpha"] = true;
    b["beta"] = 1;
    CHECK(stable_dump(a) == stable_dump(b));
    CHECK(stable_dump(a) == "{\n  \"alpha\": true,\n  \"beta\": 1\n}\n");
}

TEST_CASE("report envelope carries schema, config and anchor keys") {
    nlohmann::json payload;
    payload["value"] = 7;
    const nlohmann::json rep = make_report("thm:LS", RunConfig{}.to_json(), payload);
    CHECK(rep.at("schema") == kReportSchema);
    CHECK(rep.at("paper_anchor") == "thm:LS");
    CHECK(rep.at("config").at("grid_size") == 64);
    CHECK(rep.at("value") == 7);
}

TEST_CASE("run configuration round trips and validates") {
    RunConfig c;
    c.grid_size = 128;
    c.tau_strict = 1e-8;
    c.boundary_collar = 1e-4;
    c.n_max = 3;
    c.seed = 42;
    c.output_path = "report.json";
    const RunConfig back = RunConfig::from_json(c.to_json());
    CHECK(back.grid_size == 128);
    CHECK(back.tau_strict == 1e-8);
    CHECK(back.boundary_collar == 1e-4);
    CHECK(back.n_max == 3);
    CHECK(back.seed == 42);
    CHECK(back.output_path == "report.json");
    CHECK(back.keep_cells == 8);

    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse(R"({"grid": 2})")),
                    MalformedInput);
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse(R"({"grid_size": 1})")),
                    MalformedInput);
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse(R"({"grid_size": "big"})")),
                    MalformedInput);
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse(R"({"boundary_collar": 0.7})")),
                    MalformedInput);
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse(R"({"n_max": 0})")),
                    MalformedInput);
}

TEST_CASE("cli entropy reports the divergence at the requested point") {
    const std::string f = pair_file("p_two_block.json", kTwoBlock);
    const CliResult r = run_cli({"entropy", "--pair", f, "--alpha", "0.3", "--z", "1.7"});
    REQUIRE(r.code == 0);
    const nlohmann::json rep = nlohmann::json::parse(r.out);
    CHECK(rep.at("schema") == kReportSchema);
    CHECK(rep.at("paper_anchor") == "eq:alphazexplicit");
    CHECK(rep.at("d_hat").get<double>() ==
          doctest::Approx(0.4852350756730282).epsilon(1e-12));
    CHECK_FALSE(rep.at("point").at("tropical").get<bool>());

    const CliResult t = run_cli({"entropy", "--pair", f, "--tropical"});
    REQUIRE(t.code == 0);
    const nlohmann::json trep = nlohmann::json::parse(t.out);
    CHECK(trep.at("d_hat").get<double>() ==
          doctest::Approx(0.3566749439387324).epsilon(1e-12));
    CHECK(trep.at("point").at("tropical").get<bool>());
    CHECK(trep.at("point").at("z").is_null());
}

TEST_CASE("cli check decides conversions and gates the asymptotic mode") {
    const std::string a = pair_file("p_half.json", single(1, 1, 0.5));
    const std::string b = pair_file("p_nine.json", single(1, 1, 0.9));
    const CliResult r = run_cli({"check", "--in", a, "--out", b, "--mode", "exact"});
    REQUIRE(r.code == 0);
    const nlohmann::json rep = nlohmann::json::parse(r.out);
    CHECK(rep.at("verdict") == "strict");
    CHECK(rep.at("paper_anchor") == "thm:LS");
    CHECK(rep.at("worst_margin").get<double>() > 0.0);

    const CliResult g = run_cli({"check", "--in", a, "--out", b, "--grid", "16"});
    REQUIRE(g.code == 0);
    CHECK(nlohmann::json::parse(g.out).at("config").at("grid_size") == 16);

    // A classical target has no non-commuting block, so the asymptotic
    // hypotheses fail.
    const std::string cl =
        pair_file("p_classical.json", make_pair({Block(0.2, 0.5, 1.0), Block(0.8, 0.5, 1.0)}));
    const CliResult asym = run_cli({"check", "--in", a, "--out", cl, "--mode", "asymptotic"});
    CHECK(asym.code == 2);
    CHECK(asym.err.find("hypothesis violation") != std::string::npos);
}

TEST_CASE("cli maps bad inputs to the malformed exit code") {
    const std::string f = pair_file("p_two_block.json", kTwoBlock);
    CHECK(run_cli({"entropy", "--pair", scratch_dir().string() + "/missing.json", "--z", "2"})
              .code == 3);
    CHECK(run_cli({"entropy", "--pair", f, "--z", "2", "--tropical"}).code == 3);
    CHECK(run_cli({"check", "--in", f, "--out", f, "--bogus"}).code == 3);
    CHECK(run_cli({}).code == 3);

    const std::string garbled = write_scratch("garbled.json", "{not json");
    CHECK(run_cli({"entropy", "--pair", garbled, "--tropical"}).code == 3);

    CHECK(run_cli({"certify", "--in", f, "--out", f, "--rate", "fast"}).code == 3);

    const std::string cfg_bad = write_scratch("cfg_bad.json", R"({"grid_size": 1})");
    CHECK(run_cli({"--config", cfg_bad, "entropy", "--pair", f, "--tropical"}).code == 3);
}

TEST_CASE("cli selftest passes") {
    const CliResult r = run_cli({"selftest"});
    CHECK(r.code == 0);
    CHECK(r.out.find("selftest passed") != std::string::npos);
}

TEST_CASE("cli output flag writes the report to a file") {
    const std::string f = pair_file("p_two_block.json", kTwoBlock);
    const std::string dest = (scratch_dir() / "entropy_report.json").string();
    const CliResult r = run_cli({"--output", dest, "entropy", "--pair", f, "--tropical"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(dest);
    REQUIRE(in.good());
    const nlohmann::json rep = nlohmann::json::parse(in);
    CHECK(rep.contains("d_hat"));
}

TEST_CASE("cli config override is reflected and runs are reproducible") {
    const std::string a = pair_file("p_quarter.json", single(1, 1, 0.25));
    const std::string b = pair_file("p_half.json", single(1, 1, 0.5));
    const std::string cfg = write_scratch("cfg32.json", R"({"grid_size": 32})");
    const CliResult r1 = run_cli({"--config", cfg, "rate", "--in", a, "--out", b});
    const CliResult r2 = run_cli({"--config", cfg, "rate", "--in", a, "--out", b});
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r2.out);
    const nlohmann::json rep = nlohmann::json::parse(r1.out);
    CHECK(rep.at("config").at("grid_size") == 32);
    CHECK(rep.at("rate").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.at("paper_anchor") == "thm:rates");
}

TEST_CASE("cli oracle reports feasibility and sets the undetermined exit code") {
    const std::string a = pair_file("p_quarter.json", single(1, 1, 0.25));
    const std::string b = pair_file("p_half.json", single(1, 1, 0.5));

    const CliResult ok = run_cli({"oracle", "--in", a, "--out", b, "--n", "1", "--m", "1"});
    REQUIRE(ok.code == 0);
    const nlohmann::json okrep = nlohmann::json::parse(ok.out);
    CHECK(okrep.at("status") == "feasible");
    CHECK(okrep.at("channel").is_null());

    const CliResult emit =
        run_cli({"oracle", "--in", a, "--out", b, "--emit-channel"});
    REQUIRE(emit.code == 0);
    CHECK(nlohmann::json::parse(emit.out).at("channel").at("dim_in") == 2);

    // Lowering a pure overlap is impossible, so the oracle stays undetermined.
    const CliResult no = run_cli({"oracle", "--in", b, "--out", a});
    CHECK(no.code == 4);
    const nlohmann::json norep = nlohmann::json::parse(no.out);
    CHECK(norep.at("status") == "undetermined");
    CHECK(norep.at("residual").get<double>() > 1e-4);
}

TEST_CASE("cli certify exit codes follow the outcome") {
    const std::string a = pair_file("p_quarter.json", single(1, 1, 0.25));
    const std::string b = pair_file("p_half.json", single(1, 1, 0.5));

    const CliResult hit = run_cli({"certify", "--in", a, "--out", b, "--rate", "1/1"});
    REQUIRE(hit.code == 0);
    const nlohmann::json hrep = nlohmann::json::parse(hit.out);
    CHECK(hrep.at("outcome") == "achieved");
    CHECK(hrep.at("n_found") == 1);

    const CliResult band = run_cli({"certify", "--in", a, "--out", b, "--rate", "2/1"});
    CHECK(band.code == 4);
    CHECK(nlohmann::json::parse(band.out).at("outcome") == "inconclusive_band");

    const CliResult refuted = run_cli({"certify", "--in", a, "--out", b, "--rate", "3/1"});
    CHECK(refuted.code == 0);
    CHECK(nlohmann::json::parse(refuted.out).at("outcome") == "refuted_by_rate");

    const CliResult capped =
        run_cli({"certify", "--in", a, "--out", b, "--rate", "1/9", "--nmax", "8"});
    CHECK(capped.code == 4);
    CHECK(nlohmann::json::parse(capped.out).at("outcome") == "not_found");
}

TEST_CASE("cli jordan decomposes the reference projections") {
    Matrix p = Matrix::Zero(4, 4);
    p(0, 0) = p(2, 2) = 1.0;
    Matrix q = Matrix::Zero(4, 4);
    q(0, 0) = q(0, 1) = q(1, 0) = q(1, 1) = 0.5;
    q(3, 3) = 1.0;
    const std::string pf = write_scratch("proj_p.json", stable_dump(matrix_to_json(p)));
    const std::string qf = write_scratch("proj_q.json", stable_dump(matrix_to_json(q)));
    const CliResult r = run_cli({"jordan", "--p", pf, "--q", qf});
    REQUIRE(r.code == 0);
    const nlohmann::json rep = nlohmann::json::parse(r.out);
    CHECK(rep.at("residual").get<double>() <= 1e-12);
    REQUIRE(rep.at("pair").at("blocks").size() == 3);
    bool found_half = false;
    for (const auto& blk : rep.at("blocks"))
        if (blk.at("subspace_dim") == 2 &&
            std::abs(blk.at("overlap_sq").get<double>() - 0.5) < 1e-9)
            found_half = true;
    CHECK(found_half);
}

TEST_CASE("cli smooth and channel subcommands") {
    const std::string half = pair_file("p_half.json", single(1, 1, 0.5));
    const CliResult sm = run_cli({"smooth", "--target", half, "--eps", "0.1"});
    REQUIRE(sm.code == 0);
    const nlohmann::json smrep = nlohmann::json::parse(sm.out);
    CHECK(smrep.at("eta").get<double>() == doctest::Approx(0.3217505543966423).epsilon(1e-12));
    CHECK(smrep.at("fidelity_bound").get<double>() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(smrep.at("pair").at("blocks")[0].at("F").get<double>() ==
          doctest::Approx(0.8).epsilon(1e-12));

    const std::string tgt = pair_file(
        "p_power_target.json", make_pair({Block(0.5, 0.25, 0.81), Block(0.5, 0.75, 0.64)}));
    const CliResult pw = run_cli({"channel", "power-universal", "--target", tgt, "--F", "0.5"});
    REQUIRE(pw.code == 0);
    const nlohmann::json pwrep = nlohmann::json::parse(pw.out);
    CHECK(pwrep.at("materialized").get<bool>());
    CHECK(pwrep.at("m") == 2);
    CHECK_FALSE(pwrep.at("channel").is_null());
    CHECK(run_cli({"channel", "power-universal", "--target", tgt, "--F", "1.5"}).code == 2);

    const CliResult uh = run_cli({"channel", "uhlmann", "--fin", "0.25", "--fout", "0.5"});
    REQUIRE(uh.code == 0);
    CHECK(nlohmann::json::parse(uh.out).at("tp_residual").get<double>() < 1e-8);
    CHECK(run_cli({"channel", "uhlmann", "--fin", "0.5", "--fout", "0.25"}).code == 2);
}

TEST_SUITE_END();
