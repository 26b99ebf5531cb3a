#include "ldedq/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "ldedq/errors.hpp"

namespace ldedq {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"material", {"t0_k", "t_liq_k", "cp", "rho", "diffusivity", "sigma_l_mm", "absorptivity"}},
        {"grid", {"n", "p_min_w", "p_max_w", "v_min_mmpm", "v_max_mmpm"}},
        {"reward", {"delta_opt_mm", "tol_r_mm", "tol_delta_mm", "denom_floor_mm", "variant"}},
        {"qlearn", {"alpha", "gamma", "epsilon", "episodes", "n_epochs", "seed"}},
        {"sweep", {"param", "values", "replicates", "base_seed"}},
        {"output", {"dir"}},
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ValidationError(key + ": expected a number (got '" + text + "')");
    }
    return value;
}

// Rescales a decimal literal by 10^shift in the text itself, so "0.459" with
// shift -3 parses to the same double as the literal 0.459e-3.
std::string shift_exponent(const std::string& text, int shift) {
    const auto e = text.find_first_of("eE");
    if (e == std::string::npos) return text + "e" + std::to_string(shift);
    int exponent = 0;
    const char* begin = text.data() + e + 1;
    const char* end = text.data() + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, exponent);
    if (ec != std::errc() || ptr != end) return text;  // left for parse_number to reject
    return text.substr(0, e) + "e" + std::to_string(exponent + shift);
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    template <typename T>
    void number(const char* section, const char* name, T& out, int decimal_shift = 0) {
        if (const auto raw = find(section, name)) {
            const std::string key = std::string(section) + "." + name;
            if constexpr (std::is_floating_point_v<T>) {
                if (decimal_shift != 0) {
                    parse_number<T>(key, *raw);
                    out = parse_number<T>(key, shift_exponent(*raw, decimal_shift));
                    return;
                }
            }
            out = parse_number<T>(key, *raw);
        }
    }

    std::optional<std::string> find(const char* section, const char* name) const {
        const auto sec = tree_.get_child_optional(section);
        if (!sec) return std::nullopt;
        const auto value = sec->get_optional<std::string>(pt::ptree::path_type(name, '\0'));
        if (!value) return std::nullopt;
        return trim(*value);
    }

private:
    const pt::ptree& tree_;
};

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// Metres written as millimetres without a lossy multiplication.
std::string format_mm(double metres) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", metres);
    const std::string mm = shift_exponent(buf, 3);
    // Prefer the short form when it reads back to the same value.
    std::ostringstream os;
    os << std::setprecision(15) << metres * 1e3;
    const std::string shortest = os.str();
    double via = 0.0;
    const std::string scaled = shift_exponent(shortest, -3);
    std::from_chars(scaled.data(), scaled.data() + scaled.size(), via);
    return via == metres ? shortest : mm;
}

}  // namespace

void RunConfig::validate() const {
    material.validate("material");
    grid.validate("grid");
    reward.validate("reward");
    qlearn.validate("qlearn");
    if (sweep) sweep->validate("sweep");
    if (output_dir.empty()) throw ValidationError("output.dir: must not be empty");
}

ExperimentBase RunConfig::experiment() const {
    return {material, grid, reward, qlearn, DepthOptions{}};
}

RunConfig parse_config(std::string_view text, std::string_view origin) {
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        std::ostringstream os;
        os << origin << "(" << e.line() << "): " << e.message();
        throw ValidationError(os.str());
    }

    const auto& keys = known_keys();
    for (const auto& [section, body] : tree) {
        const auto it = keys.find(section);
        if (it == keys.end()) {
            if (body.empty()) throw ValidationError(std::string(origin) + ": key '" + section + "' outside a section");
            throw ValidationError(std::string(origin) + ": unknown section [" + section + "]");
        }
        for (const auto& [name, value] : body) {
            if (!it->second.contains(name)) {
                throw ValidationError(section + "." + name + ": unknown key");
            }
        }
    }

    RunConfig cfg;
    Reader r(tree);
    r.number("material", "t0_k", cfg.material.t0_k);
    r.number("material", "t_liq_k", cfg.material.t_liq_k);
    r.number("material", "cp", cfg.material.cp);
    r.number("material", "rho", cfg.material.rho);
    r.number("material", "diffusivity", cfg.material.diffusivity);
    r.number("material", "sigma_l_mm", cfg.material.sigma_l, -3);
    r.number("material", "absorptivity", cfg.material.absorptivity);

    r.number("grid", "n", cfg.grid.n);
    r.number("grid", "p_min_w", cfg.grid.p_min_w);
    r.number("grid", "p_max_w", cfg.grid.p_max_w);
    r.number("grid", "v_min_mmpm", cfg.grid.v_min_mmpm);
    r.number("grid", "v_max_mmpm", cfg.grid.v_max_mmpm);

    r.number("reward", "delta_opt_mm", cfg.reward.delta_opt_mm);
    r.number("reward", "tol_r_mm", cfg.reward.tol_r_mm);
    r.number("reward", "tol_delta_mm", cfg.reward.tol_delta_mm);
    r.number("reward", "denom_floor_mm", cfg.reward.denom_floor_mm);
    if (const auto v = r.find("reward", "variant")) cfg.reward.variant = parse_reward_variant(*v);

    r.number("qlearn", "alpha", cfg.qlearn.alpha);
    r.number("qlearn", "gamma", cfg.qlearn.gamma);
    r.number("qlearn", "epsilon", cfg.qlearn.epsilon);
    r.number("qlearn", "episodes", cfg.qlearn.episodes);
    r.number("qlearn", "n_epochs", cfg.qlearn.n_epochs);
    r.number("qlearn", "seed", cfg.qlearn.seed);

    if (tree.get_child_optional("sweep")) {
        SweepSpec spec;
        if (const auto p = r.find("sweep", "param")) {
            spec.param = parse_sweep_param(*p);
            spec.values = default_sweep_values(spec.param);
        }
        if (const auto v = r.find("sweep", "values")) spec.values = parse_list("sweep.values", *v);
        r.number("sweep", "replicates", spec.replicates);
        r.number("sweep", "base_seed", spec.base_seed);
        cfg.sweep = spec;
    }
    if (const auto d = r.find("output", "dir")) cfg.output_dir = *d;

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string to_ini(const RunConfig& cfg) {
    std::ostringstream os;
    auto kv = [&](const char* key, const std::string& value) { os << key << " = " << value << "\n"; };
    auto num = [&](const char* key, double value) { kv(key, format_double(value)); };

    os << "[material]\n";
    num("t0_k", cfg.material.t0_k);
    num("t_liq_k", cfg.material.t_liq_k);
    num("cp", cfg.material.cp);
    num("rho", cfg.material.rho);
    num("diffusivity", cfg.material.diffusivity);
    kv("sigma_l_mm", format_mm(cfg.material.sigma_l));
    num("absorptivity", cfg.material.absorptivity);

    os << "\n[grid]\n";
    kv("n", std::to_string(cfg.grid.n));
    num("p_min_w", cfg.grid.p_min_w);
    num("p_max_w", cfg.grid.p_max_w);
    num("v_min_mmpm", cfg.grid.v_min_mmpm);
    num("v_max_mmpm", cfg.grid.v_max_mmpm);

    os << "\n[reward]\n";
    num("delta_opt_mm", cfg.reward.delta_opt_mm);
    num("tol_r_mm", cfg.reward.tol_r_mm);
    num("tol_delta_mm", cfg.reward.tol_delta_mm);
    num("denom_floor_mm", cfg.reward.denom_floor_mm);
    kv("variant", std::string(to_string(cfg.reward.variant)));

    os << "\n[qlearn]\n";
    num("alpha", cfg.qlearn.alpha);
    num("gamma", cfg.qlearn.gamma);
    num("epsilon", cfg.qlearn.epsilon);
    kv("episodes", std::to_string(cfg.qlearn.episodes));
    kv("n_epochs", std::to_string(cfg.qlearn.n_epochs));
    kv("seed", std::to_string(cfg.qlearn.seed));

    if (cfg.sweep) {
        os << "\n[sweep]\n";
        kv("param", std::string(to_string(cfg.sweep->param)));
        std::string values;
        for (std::size_t k = 0; k < cfg.sweep->values.size(); ++k) {
            if (k) values += ", ";
            values += format_double(cfg.sweep->values[k]);
        }
        kv("values", values);
        kv("replicates", std::to_string(cfg.sweep->replicates));
        kv("base_seed", std::to_string(cfg.sweep->base_seed));
    }

    os << "\n[output]\n";
    kv("dir", cfg.output_dir);
    return os.str();
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["material"] = {{"t0_k", cfg.material.t0_k},
                     {"t_liq_k", cfg.material.t_liq_k},
                     {"cp", cfg.material.cp},
                     {"rho", cfg.material.rho},
                     {"diffusivity", cfg.material.diffusivity},
                     {"sigma_l_mm", cfg.material.sigma_l * 1e3},
                     {"absorptivity", cfg.material.absorptivity}};
    j["grid"] = {{"n", cfg.grid.n},
                 {"p_min_w", cfg.grid.p_min_w},
                 {"p_max_w", cfg.grid.p_max_w},
                 {"v_min_mmpm", cfg.grid.v_min_mmpm},
                 {"v_max_mmpm", cfg.grid.v_max_mmpm}};
    j["reward"] = {{"delta_opt_mm", cfg.reward.delta_opt_mm},
                   {"tol_r_mm", cfg.reward.tol_r_mm},
                   {"tol_delta_mm", cfg.reward.tol_delta_mm},
                   {"denom_floor_mm", cfg.reward.denom_floor_mm},
                   {"variant", std::string(to_string(cfg.reward.variant))}};
    j["qlearn"] = {{"alpha", cfg.qlearn.alpha},
                   {"gamma", cfg.qlearn.gamma},
                   {"epsilon", cfg.qlearn.epsilon},
                   {"episodes", cfg.qlearn.episodes},
                   {"n_epochs", cfg.qlearn.n_epochs},
                   {"seed", cfg.qlearn.seed}};
    if (cfg.sweep) {
        j["sweep"] = {{"param", std::string(to_string(cfg.sweep->param))},
                      {"values", cfg.sweep->values},
                      {"replicates", cfg.sweep->replicates},
                      {"base_seed", cfg.sweep->base_seed}};
    }
    j["output"] = {{"dir", cfg.output_dir}};
    return j;
}

}  // namespace ldedq
