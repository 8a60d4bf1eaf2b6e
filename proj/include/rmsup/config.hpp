#pragma once

// Run configuration: a flat `key = value` text format with dotted section
// prefixes (e.g. `scene.count = 50`). Unknown keys are hard errors. Values
// layer in order: built-in defaults, then the config file, then the
// RMSUP_WORKERS environment variable, then explicit overrides (CLI flags).

#include <cstdint>
#include <string>
#include <vector>

#include "rmsup/helm_edge.hpp"
#include "rmsup/recon.hpp"
#include "rmsup/scenegen.hpp"

namespace rmsup {

struct RunConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    int workers = 1;
    int stride = 4;

    // Per-invocation file arguments (usually set by CLI positionals).
    std::string input_path;     // key: in
    std::string guidance_path;  // key: guidance
    std::string manifest_path;  // key: manifest
    std::string method = "kedge";

    int scene_count = 20;
    SceneConfig scene;
    PropagationParams prop;
    EdgeParams edge;
    SrConfig sr;

    double loss_lambda1 = 1.0;
    double loss_lambda2 = 1.0;
    double loss_lambda3 = 1.0;

    std::string eval_methods = "kedge,lbp,canny,base";
    bool realistic_guidance = false;
    bool write_panels = true;

    int demo_steps = 200;
    int demo_samples = 10000;
    double demo_mu0 = 1.5;
    double demo_var0 = 0.25;

    // Applies one key/value pair; unknown keys and malformed values throw
    // Errc::Config.
    void set(const std::string& key, const std::string& value);

    // defaults -> config file (optional) -> RMSUP_WORKERS -> overrides.
    // Overrides are "key=value" strings.
    static RunConfig load(const std::string& config_path,
                          const std::vector<std::string>& overrides);

    void validate() const;
};

// Parses one config line into (key, value). Returns false for blank and
// comment (leading '#') lines.
bool parse_config_line(const std::string& line, std::string& key, std::string& value);

} // namespace rmsup
