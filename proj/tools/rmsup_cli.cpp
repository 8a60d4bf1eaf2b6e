// Command-line front end. All real work happens behind the C API; this file
// only parses flags, assembles config overrides, and maps statuses to exit
// codes.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rmsup/rmsup.h"

namespace {

struct CmdArgs {
    std::string config_path;
    std::vector<std::string> overrides;

    void add(const std::string& key, const std::string& value) {
        overrides.push_back(key + "=" + value);
    }
};

// Binds the shared flags to a subcommand; each flag that the user actually
// passes becomes a config override (so config-file values still apply
// otherwise). method_key differs between commands: the single-method
// commands take `method`, the corpus commands take `eval.methods`.
void bind_common(CLI::App* cmd, CmdArgs& args, const char* method_key) {
    cmd->add_option("--config", args.config_path, "config file of key = value lines");

    auto bind = [cmd, &args](const char* flag, const std::string& key, const char* help) {
        cmd->add_option_function<std::string>(
               flag, [&args, key](const std::string& v) { args.add(key, v); }, help)
            ->expected(1);
    };
    bind("--seed", "seed", "base RNG seed");
    bind("--out", "output_dir", "output directory");
    bind("--workers", "workers", "worker thread count");
    bind("--stride", "stride", "downsampling stride s");
    if (method_key)
        cmd->add_option_function<std::string>(
               "--method",
               [&args, key = std::string(method_key)](const std::string& v) {
                   args.add(key, v);
               },
               "guidance method: kedge, lbp, canny, base")
            ->expected(1);
}

int run_command(const char* name, const CmdArgs& args,
                rmsup_status (*fn)(const char*, const char* const*, int)) {
    std::vector<const char*> ov;
    ov.reserve(args.overrides.size());
    for (const std::string& s : args.overrides) ov.push_back(s.c_str());
    const rmsup_status status = fn(args.config_path.empty() ? nullptr : args.config_path.c_str(),
                                   ov.data(), int(ov.size()));
    if (status != RMSUP_OK) {
        std::fprintf(stderr, "%s: %s (%s)\n", name, rmsup_last_error(),
                     rmsup_status_str(status));
        return 1;
    }
    return 0;
}

int run_report_command(const char* name, const CmdArgs& args,
                       rmsup_status (*fn)(const char*, const char* const*, int, int*)) {
    std::vector<const char*> ov;
    ov.reserve(args.overrides.size());
    for (const std::string& s : args.overrides) ov.push_back(s.c_str());
    int n_failed = 0;
    const rmsup_status status = fn(args.config_path.empty() ? nullptr : args.config_path.c_str(),
                                   ov.data(), int(ov.size()), &n_failed);
    if (status != RMSUP_OK) {
        std::fprintf(stderr, "%s: %s (%s)\n", name, rmsup_last_error(),
                     rmsup_status_str(status));
        return 1;
    }
    if (n_failed > 0) {
        std::fprintf(stderr, "%s: %d scene evaluation(s) failed\n", name, n_failed);
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radio-map super-resolution toolkit"};
    app.require_subcommand(1);

    CmdArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a scene corpus with ground truth");
    bind_common(gen, gen_args, nullptr);

    CmdArgs edge_args;
    CLI::App* edge = app.add_subcommand("edge", "extract an edge map from a power grid");
    bind_common(edge, edge_args, "method");
    edge->add_option_function<std::string>(
            "input", [&edge_args](const std::string& v) { edge_args.add("in", v); },
            "input .rmg power grid")
        ->required();

    CmdArgs down_args;
    CLI::App* down = app.add_subcommand("down", "build the low-resolution input pair");
    bind_common(down, down_args, nullptr);
    down->add_option_function<std::string>(
            "input", [&down_args](const std::string& v) { down_args.add("in", v); },
            "input .rmg power grid")
        ->required();
    down->add_option_function<std::string>(
        "guidance", [&down_args](const std::string& v) { down_args.add("guidance", v); },
        "optional edge-map .rmg to downsample alongside");

    CmdArgs sr_args;
    CLI::App* sr = app.add_subcommand("sr", "reconstruct a high-resolution map");
    bind_common(sr, sr_args, "method");
    sr->add_option_function<std::string>(
          "input", [&sr_args](const std::string& v) { sr_args.add("in", v); },
          "low-resolution .rmg power grid")
        ->required();
    sr->add_option_function<std::string>(
        "guidance", [&sr_args](const std::string& v) { sr_args.add("guidance", v); },
        "optional edge-map .rmg guidance");
    sr->add_option_function<std::string>(
        "--lambda-data",
        [&sr_args](const std::string& v) { sr_args.add("sr.lambda_data", v); },
        "data-fidelity weight");
    sr->add_option_function<std::string>(
        "--lambda-smooth",
        [&sr_args](const std::string& v) { sr_args.add("sr.lambda_smooth", v); },
        "smoothness weight");
    sr->add_option_function<std::string>(
        "--lambda-helm",
        [&sr_args](const std::string& v) { sr_args.add("sr.lambda_helm", v); },
        "Helmholtz-residual weight");

    CmdArgs demo_args;
    CLI::App* demo = app.add_subcommand(
        "ddm-demo", "run the analytic-denoiser reverse-diffusion demo");
    bind_common(demo, demo_args, nullptr);

    CmdArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a generated corpus");
    bind_common(eval, eval_args, "eval.methods");
    eval->add_option_function<std::string>(
        "manifest", [&eval_args](const std::string& v) { eval_args.add("manifest", v); },
        "manifest.csv of the corpus (default: <out>/manifest.csv)");

    CmdArgs pipe_args;
    CLI::App* pipe = app.add_subcommand("pipeline", "generate, reconstruct, and evaluate");
    bind_common(pipe, pipe_args, "eval.methods");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) return run_command("gen", gen_args, rmsup_cmd_gen);
    if (edge->parsed()) return run_command("edge", edge_args, rmsup_cmd_edge);
    if (down->parsed()) return run_command("down", down_args, rmsup_cmd_down);
    if (sr->parsed()) return run_command("sr", sr_args, rmsup_cmd_sr);
    if (demo->parsed()) return run_command("ddm-demo", demo_args, rmsup_cmd_ddm_demo);
    if (eval->parsed()) return run_report_command("eval", eval_args, rmsup_cmd_eval);
    if (pipe->parsed()) return run_report_command("pipeline", pipe_args, rmsup_cmd_pipeline);
    return 1;
}
