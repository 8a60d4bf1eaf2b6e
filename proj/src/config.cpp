#include "rmsup/config.hpp"

#include <cstdlib>
#include <fstream>

#include "rmsup/diffusion.hpp"

namespace rmsup {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        fail(Errc::Config, "config: bad number for '" + key + "': '" + value + "'");
    }
    if (pos != value.size())
        fail(Errc::Config, "config: trailing characters for '" + key + "': '" + value + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &pos);
    } catch (const std::exception&) {
        fail(Errc::Config, "config: bad integer for '" + key + "': '" + value + "'");
    }
    if (pos != value.size())
        fail(Errc::Config, "config: trailing characters for '" + key + "': '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        fail(Errc::Config, "config: bad unsigned integer for '" + key + "': '" + value + "'");
    }
    if (pos != value.size())
        fail(Errc::Config, "config: trailing characters for '" + key + "': '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(Errc::Config, "config: bad boolean for '" + key + "': '" + value + "'");
}

} // namespace

bool parse_config_line(const std::string& line, std::string& key, std::string& value) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') return false;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
        fail(Errc::Config, "config: missing '=' in line '" + line + "'");
    key = trim(t.substr(0, eq));
    value = trim(t.substr(eq + 1));
    if (key.empty())
        fail(Errc::Config, "config: empty key in line '" + line + "'");
    return true;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "seed") seed = parse_u64(key, value);
    else if (key == "output_dir") output_dir = value;
    else if (key == "workers") workers = int(parse_int(key, value));
    else if (key == "stride") stride = int(parse_int(key, value));
    else if (key == "in") input_path = value;
    else if (key == "guidance") guidance_path = value;
    else if (key == "manifest") manifest_path = value;
    else if (key == "method") method = value;

    else if (key == "scene.count") scene_count = int(parse_int(key, value));
    else if (key == "scene.grid_n") scene.grid_n = int(parse_int(key, value));
    else if (key == "scene.extent_m") scene.extent_m = parse_double(key, value);
    else if (key == "scene.buildings_min") scene.buildings_min = int(parse_int(key, value));
    else if (key == "scene.buildings_max") scene.buildings_max = int(parse_int(key, value));
    else if (key == "scene.size_min_m") scene.size_min_m = parse_double(key, value);
    else if (key == "scene.size_max_m") scene.size_max_m = parse_double(key, value);

    else if (key == "prop.tx_power_dbm") prop.tx_power_dbm = parse_double(key, value);
    else if (key == "prop.freq_hz") prop.freq_hz = parse_double(key, value);
    else if (key == "prop.wall_loss_db") prop.wall_loss_db = parse_double(key, value);
    else if (key == "prop.floor_dbm") prop.floor_dbm = parse_double(key, value);
    else if (key == "prop.interior_dbm") prop.interior_dbm = parse_double(key, value);

    else if (key == "edge.epsilon") edge.epsilon = parse_double(key, value);
    else if (key == "edge.canny_sigma") edge.canny_sigma = parse_double(key, value);
    else if (key == "edge.canny_low") edge.canny_low = parse_double(key, value);
    else if (key == "edge.canny_high") edge.canny_high = parse_double(key, value);
    else if (key == "edge.lbp_threshold") edge.lbp_edge_threshold = int(parse_int(key, value));
    else if (key == "edge.k_sign_flip") edge.k_sign_flip = parse_bool(key, value);

    else if (key == "sr.lambda_data") sr.lambda_data = parse_double(key, value);
    else if (key == "sr.lambda_smooth") sr.lambda_smooth = parse_double(key, value);
    else if (key == "sr.lambda_helm") sr.lambda_helm = parse_double(key, value);
    else if (key == "sr.k_eff") sr.k_eff = parse_double(key, value);
    else if (key == "sr.edge_weight_floor") sr.edge_weight_floor = parse_double(key, value);
    else if (key == "sr.max_iters") sr.max_iters = int(parse_int(key, value));
    else if (key == "sr.grad_tol") sr.grad_tol = parse_double(key, value);
    else if (key == "sr.eta") sr.step_rule.eta = parse_double(key, value);
    else if (key == "sr.step_rule") {
        if (value == "backtracking") sr.step_rule.kind = StepRule::Kind::BacktrackingLineSearch;
        else if (value == "fixed") sr.step_rule.kind = StepRule::Kind::FixedStep;
        else fail(Errc::Config, "config: sr.step_rule must be 'backtracking' or 'fixed'");
    }

    else if (key == "loss.lambda1") loss_lambda1 = parse_double(key, value);
    else if (key == "loss.lambda2") loss_lambda2 = parse_double(key, value);
    else if (key == "loss.lambda3") loss_lambda3 = parse_double(key, value);

    else if (key == "eval.methods") eval_methods = value;
    else if (key == "eval.realistic_guidance") realistic_guidance = parse_bool(key, value);
    else if (key == "eval.write_panels") write_panels = parse_bool(key, value);

    else if (key == "demo.steps") demo_steps = int(parse_int(key, value));
    else if (key == "demo.samples") demo_samples = int(parse_int(key, value));
    else if (key == "demo.mu0") demo_mu0 = parse_double(key, value);
    else if (key == "demo.var0") demo_var0 = parse_double(key, value);

    else
        fail(Errc::Config, "config: unknown key '" + key + "'");
}

RunConfig RunConfig::load(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
    RunConfig cfg;

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            fail(Errc::Io, "config: cannot open " + config_path);
        std::string line, key, value;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            try {
                if (parse_config_line(line, key, value)) cfg.set(key, value);
            } catch (const Error& e) {
                fail(e.code(), config_path + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }

    if (const char* env = std::getenv("RMSUP_WORKERS"); env && *env)
        cfg.set("workers", env);

    for (const std::string& ov : overrides) {
        std::string key, value;
        if (!parse_config_line(ov, key, value))
            fail(Errc::Config, "config: blank override '" + ov + "'");
        cfg.set(key, value);
    }

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (workers < 1)
        fail(Errc::Config, "config: workers must be >= 1");
    if (stride < 1)
        fail(Errc::Config, "config: stride must be >= 1");
    if (scene_count < 1)
        fail(Errc::Config, "config: scene.count must be >= 1");
    if (demo_steps < 2)
        fail(Errc::Config, "config: demo.steps must be >= 2");
    if (demo_samples < 2)
        fail(Errc::Config, "config: demo.samples must be >= 2");
    if (!(demo_var0 > 0.0))
        fail(Errc::Config, "config: demo.var0 must be positive");
    edge.validate();
    sr.validate();
    LossWeights{loss_lambda1, loss_lambda2, loss_lambda3}.validate();
}

} // namespace rmsup
