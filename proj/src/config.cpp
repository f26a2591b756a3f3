#include "rsq/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "rsq/blocks.hpp"

namespace rsq {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream is(value);
    T out;
    is >> out;
    if (is.fail() || !is.eof())
        throw std::invalid_argument("config: key '" + key + "' has invalid value '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("config: key '" + key + "' expects a boolean, got '" + value + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
    std::vector<T> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number<T>(key, item));
    }
    if (out.empty())
        throw std::invalid_argument("config: key '" + key + "' expects a comma-separated list");
    return out;
}

} // namespace

KeyValueMap read_key_value_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open '" + path + "'");
    KeyValueMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: '" + path + "' line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("config: '" + path + "' line " + std::to_string(line_no) +
                                     ": empty key or value");
        map[key] = value;
    }
    return map;
}

void apply_keys(RunConfig& cfg, const KeyValueMap& keys) {
    std::string family = cfg.model.name();
    int two_s = cfg.model.two_s;
    double q_min = std::numeric_limits<double>::quiet_NaN();
    double q_max = std::numeric_limits<double>::quiet_NaN();
    int q_count = 11;

    for (const auto& [key, value] : keys) {
        if (key == "model") family = value;
        else if (key == "two_s") two_s = parse_number<int>(key, value);
        else if (key == "sites") cfg.sites = parse_number<std::uint32_t>(key, value);
        else if (key == "configs") cfg.configurations = parse_number<std::uint32_t>(key, value);
        else if (key == "seed") cfg.disorder.master_seed = parse_number<std::uint64_t>(key, value);
        else if (key == "workers") cfg.workers = parse_number<unsigned>(key, value);
        else if (key == "out") cfg.out_dir = value;
        else if (key == "checkpoint.every") cfg.checkpoint_every = parse_number<std::uint64_t>(key, value);
        else if (key == "disorder.alpha") cfg.disorder.exponent_alpha = parse_number<double>(key, value);
        else if (key == "disorder.support_max") cfg.disorder.support_max = parse_number<double>(key, value);
        else if (key == "blocks.sizes") {
            cfg.block_sizes = parse_list<std::uint32_t>(key, value);
            cfg.blocks_auto = false;
        }
        else if (key == "blocks.auto") cfg.blocks_auto = parse_bool(key, value);
        else if (key == "blocks.anchor") cfg.block_anchor = parse_number<std::uint32_t>(key, value);
        else if (key == "blocks.anchors") cfg.block_anchors = parse_number<std::uint32_t>(key, value);
        else if (key == "q.values") cfg.q_values = parse_list<double>(key, value);
        else if (key == "q.min") q_min = parse_number<double>(key, value);
        else if (key == "q.max") q_max = parse_number<double>(key, value);
        else if (key == "q.count") q_count = parse_number<int>(key, value);
        else if (key == "sdrg.kappa_left") cfg.kappa_left = parse_number<double>(key, value);
        else if (key == "sdrg.kappa_right") cfg.kappa_right = parse_number<double>(key, value);
        else if (key == "scaling.qwin_min") cfg.analysis.q_window_min = parse_number<double>(key, value);
        else if (key == "scaling.qwin_max") cfg.analysis.q_window_max = parse_number<double>(key, value);
        else if (key == "scaling.fit_lmin") cfg.analysis.fit_block_min = parse_number<double>(key, value);
        else if (key == "scaling.fit_lmax") cfg.analysis.fit_block_max = parse_number<double>(key, value);
        else if (key == "scaling.dgamma_policy") cfg.analysis.dgamma_policy = value;
        else if (key == "scaling.weighted") cfg.analysis.weighted_quadratic = parse_bool(key, value);
        else if (key == "scaling.scan_pad") cfg.analysis.scan_pad = parse_number<double>(key, value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }

    cfg.model = parse_model(family, two_s);
    if (!std::isnan(q_min) || !std::isnan(q_max)) {
        if (std::isnan(q_min) || std::isnan(q_max) || !(q_min < q_max) || q_count < 2)
            throw std::invalid_argument("config: q.min/q.max/q.count must define a nonempty grid");
        cfg.q_values.clear();
        for (int i = 0; i < q_count; ++i)
            cfg.q_values.push_back(q_min + (q_max - q_min) * i / (q_count - 1));
    }
}

void finalize(RunConfig& cfg) {
    validate(cfg.model);
    validate(cfg.disorder);
    if (cfg.configurations < 1)
        throw std::invalid_argument("config: configs must be >= 1");
    if (cfg.sites < 4 || cfg.sites % 2 != 0)
        throw std::invalid_argument("config: sites must be even and >= 4");
    if (cfg.q_values.empty()) cfg.q_values = default_q_grid(cfg.model);
    if (cfg.block_sizes.empty()) {
        if (!cfg.blocks_auto)
            throw std::invalid_argument("config: blocks.auto = false requires blocks.sizes");
        cfg.block_sizes = default_ladder_sizes(cfg.sites);
    }
    BlockLadder ladder{cfg.block_sizes, cfg.block_anchor, cfg.sites, cfg.block_anchors};
    validate(ladder); // rejects empty or out-of-range ladders
    if (!(cfg.kappa_left > 0.0) || !(cfg.kappa_right > 0.0))
        throw std::invalid_argument("config: kappa coefficients must be positive");
    if (cfg.analysis.dgamma_policy != "median" && cfg.analysis.dgamma_policy != "max")
        throw std::invalid_argument("config: scaling.dgamma_policy must be median or max");
}

namespace {

nlohmann::ordered_json echo_json(const RunConfig& cfg, bool result_affecting_only) {
    nlohmann::ordered_json j;
    j["model"] = cfg.model.name();
    j["two_s"] = cfg.model.two_s;
    j["sites"] = cfg.sites;
    j["configurations"] = cfg.configurations;
    j["seed"] = cfg.disorder.master_seed;
    j["disorder"] = {{"alpha", cfg.disorder.exponent_alpha},
                     {"support_max", cfg.disorder.support_max}};
    j["blocks"] = {{"sizes", cfg.block_sizes},
                   {"anchor", cfg.block_anchor},
                   {"anchors", cfg.block_anchors}};
    j["q_values"] = cfg.q_values;
    j["sdrg"] = {{"kappa_left", cfg.kappa_left}, {"kappa_right", cfg.kappa_right}};
    if (!result_affecting_only) {
        nlohmann::ordered_json scaling;
        if (!std::isnan(cfg.analysis.q_window_min)) scaling["qwin_min"] = cfg.analysis.q_window_min;
        if (!std::isnan(cfg.analysis.q_window_max)) scaling["qwin_max"] = cfg.analysis.q_window_max;
        scaling["fit_lmin"] = cfg.analysis.fit_block_min;
        scaling["fit_lmax"] = cfg.analysis.fit_block_max;
        scaling["dgamma_policy"] = cfg.analysis.dgamma_policy;
        scaling["weighted"] = cfg.analysis.weighted_quadratic;
        scaling["scan_pad"] = cfg.analysis.scan_pad;
        j["scaling"] = scaling;
        j["workers"] = cfg.workers;
        j["checkpoint_every"] = cfg.checkpoint_every;
    }
    return j;
}

} // namespace

std::string config_echo(const RunConfig& cfg) { return echo_json(cfg, false).dump(); }

std::uint64_t config_hash(const RunConfig& cfg) {
    return std::hash<std::string>{}(echo_json(cfg, true).dump());
}

} // namespace rsq
