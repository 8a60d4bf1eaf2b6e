#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "rmsup/config.hpp"

using namespace rmsup;

namespace {

std::string tmp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "rmsup_config_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    REQUIRE(out.good());
    out << content;
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Ok;
}

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("loading nothing yields the documented defaults") {
    const RunConfig cfg = RunConfig::load("", {});
    CHECK(cfg.seed == 1);
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.workers == 1);
    CHECK(cfg.stride == 4);
    CHECK(cfg.method == "kedge");
    CHECK(cfg.scene_count == 20);
    CHECK(cfg.scene.grid_n == 128);
    CHECK(cfg.eval_methods == "kedge,lbp,canny,base");
    CHECK(!cfg.realistic_guidance);
    CHECK(cfg.write_panels);
    CHECK(cfg.demo_steps == 200);
    CHECK(cfg.demo_samples == 10000);
    CHECK(cfg.demo_mu0 == 1.5);
    CHECK(cfg.demo_var0 == 0.25);
    CHECK(cfg.sr.step_rule.kind == StepRule::Kind::BacktrackingLineSearch);
}

TEST_CASE("a config file sets dotted keys with comments and blanks ignored") {
    const std::string path = tmp_path("full.conf");
    write_file(path, "# corpus setup\n"
                     "seed = 42\n"
                     "\n"
                     "  scene.count = 3\n"
                     "scene.grid_n=64\n"
                     "prop.wall_loss_db = 12.5\n"
                     "edge.lbp_threshold = 4\n"
                     "edge.k_sign_flip = true\n"
                     "sr.lambda_helm = 0.2\n"
                     "sr.step_rule = fixed\n"
                     "sr.eta = 0.25\n"
                     "loss.lambda2 = 2.5\n"
                     "eval.methods = kedge,base\n"
                     "eval.write_panels = false\n"
                     "demo.mu0 = -0.5\n"
                     "output_dir = results\n");
    const RunConfig cfg = RunConfig::load(path, {});
    CHECK(cfg.seed == 42);
    CHECK(cfg.scene_count == 3);
    CHECK(cfg.scene.grid_n == 64);
    CHECK(cfg.prop.wall_loss_db == 12.5);
    CHECK(cfg.edge.lbp_edge_threshold == 4);
    CHECK(cfg.edge.k_sign_flip);
    CHECK(cfg.sr.lambda_helm == 0.2);
    CHECK(cfg.sr.step_rule.kind == StepRule::Kind::FixedStep);
    CHECK(cfg.sr.step_rule.eta == 0.25);
    CHECK(cfg.loss_lambda2 == 2.5);
    CHECK(cfg.eval_methods == "kedge,base");
    CHECK(!cfg.write_panels);
    CHECK(cfg.demo_mu0 == -0.5);
    CHECK(cfg.output_dir == "results");
}

TEST_CASE("file errors carry the path and line number") {
    const std::string path = tmp_path("bad_key.conf");
    write_file(path, "seed = 1\nnot_a_key = 7\n");
    CHECK(code_of([&] { RunConfig::load(path, {}); }) == Errc::Config);
    const std::string msg = message_of([&] { RunConfig::load(path, {}); });
    CHECK(msg.find(path + ":2:") != std::string::npos);
    CHECK(msg.find("unknown key") != std::string::npos);

    CHECK(code_of([] { RunConfig::load(tmp_path("missing.conf"), {}); }) == Errc::Io);
}

TEST_CASE("values must parse in full") {
    RunConfig cfg;
    CHECK(code_of([&] { cfg.set("workers", "4x"); }) == Errc::Config);
    CHECK(code_of([&] { cfg.set("workers", ""); }) == Errc::Config);
    CHECK(code_of([&] { cfg.set("sr.grad_tol", "1e-3junk"); }) == Errc::Config);
    CHECK(code_of([&] { cfg.set("sr.grad_tol", "abc"); }) == Errc::Config);
    CHECK(code_of([&] { cfg.set("eval.write_panels", "yes"); }) == Errc::Config);
    CHECK(code_of([&] { cfg.set("sr.step_rule", "newton"); }) == Errc::Config);
    CHECK(code_of([&] { cfg.set("zzz", "1"); }) == Errc::Config);
    CHECK_NOTHROW(cfg.set("eval.write_panels", "1"));
    CHECK(cfg.write_panels);
    CHECK_NOTHROW(cfg.set("eval.write_panels", "false"));
    CHECK(!cfg.write_panels);
}

TEST_CASE("line parsing trims and splits on the first equals sign") {
    std::string key, value;
    CHECK(!parse_config_line("", key, value));
    CHECK(!parse_config_line("   \t ", key, value));
    CHECK(!parse_config_line("# method = lbp", key, value));

    REQUIRE(parse_config_line("  method =  lbp \r", key, value));
    CHECK(key == "method");
    CHECK(value == "lbp");

    REQUIRE(parse_config_line("in = path=with=equals", key, value));
    CHECK(key == "in");
    CHECK(value == "path=with=equals");

    REQUIRE(parse_config_line("guidance =", key, value));
    CHECK(key == "guidance");
    CHECK(value.empty());

    CHECK(code_of([&] { parse_config_line("no equals here", key, value); }) == Errc::Config);
    CHECK(code_of([&] { parse_config_line("= orphan", key, value); }) == Errc::Config);
}

TEST_CASE("layering order is file, then environment, then overrides") {
    const std::string path = tmp_path("layering.conf");
    write_file(path, "workers = 2\n");

    CHECK(RunConfig::load(path, {}).workers == 2);

    setenv("RMSUP_WORKERS", "3", 1);
    CHECK(RunConfig::load(path, {}).workers == 3);
    CHECK(RunConfig::load(path, {"workers=4"}).workers == 4);

    setenv("RMSUP_WORKERS", "abc", 1);
    CHECK(code_of([&] { RunConfig::load(path, {}); }) == Errc::Config);
    unsetenv("RMSUP_WORKERS");

    CHECK(RunConfig::load(path, {"workers=5", "stride=2"}).stride == 2);
    CHECK(code_of([&] { RunConfig::load(path, {"  "}); }) == Errc::Config);
}

TEST_CASE("validation bounds the run parameters") {
    CHECK(code_of([] { RunConfig::load("", {"workers=0"}); }) == Errc::Config);
    CHECK(code_of([] { RunConfig::load("", {"stride=0"}); }) == Errc::Config);
    CHECK(code_of([] { RunConfig::load("", {"scene.count=0"}); }) == Errc::Config);
    CHECK(code_of([] { RunConfig::load("", {"demo.steps=1"}); }) == Errc::Config);
    CHECK(code_of([] { RunConfig::load("", {"demo.samples=1"}); }) == Errc::Config);
    CHECK(code_of([] { RunConfig::load("", {"demo.var0=0"}); }) == Errc::Config);
    // Nested parameter structs keep their own validation codes.
    CHECK(code_of([] { RunConfig::load("", {"edge.epsilon=0"}); }) == Errc::InvalidArgument);
    CHECK(code_of([] { RunConfig::load("", {"sr.edge_weight_floor=1"}); }) ==
          Errc::InvalidArgument);
    CHECK(code_of([] { RunConfig::load("", {"loss.lambda1=-1"}); }) == Errc::InvalidArgument);
    CHECK(code_of([] {
              RunConfig::load("", {"loss.lambda1=0", "loss.lambda2=0", "loss.lambda3=0"});
          }) == Errc::InvalidArgument);
    CHECK(code_of([] {
              RunConfig::load("", {"edge.canny_low=0.3", "edge.canny_high=0.2"});
          }) == Errc::BadThresholds);
}

TEST_CASE("path and method keys pass through unparsed") {
    const RunConfig cfg = RunConfig::load(
        "", {"in=maps/p.rmg", "guidance=maps/k.rmg", "manifest=out/manifest.csv",
             "method=canny", "eval.methods=lbp"});
    CHECK(cfg.input_path == "maps/p.rmg");
    CHECK(cfg.guidance_path == "maps/k.rmg");
    CHECK(cfg.manifest_path == "out/manifest.csv");
    CHECK(cfg.method == "canny");
    CHECK(cfg.eval_methods == "lbp");
}

} // TEST_SUITE("config")
