#include "persuasion/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace persuasion {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

void fail(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config key '" + key + "': " + why);
}

}  // namespace

void RunConfig::validate() const {
    if (grid_points < 3 || grid_points % 2 == 0)
        throw std::invalid_argument(
            "config: grid_points must be an odd integer >= 3");
    if (!(deviation_step > 0.0 && deviation_step <= 0.5))
        throw std::invalid_argument("config: deviation_step must lie in (0, 0.5]");
    if (!(profit_threshold > 0.0))
        throw std::invalid_argument("config: profit_threshold must be positive");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected 'key = value', got '" + t +
                                        "'");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        auto to_long = [&](const std::string& v) {
            try {
                std::size_t pos = 0;
                long x = std::stol(v, &pos);
                if (pos != v.size()) throw std::runtime_error("trailing junk");
                return x;
            } catch (const std::exception&) {
                fail(key, "malformed integer '" + v + "'");
                return 0L;
            }
        };
        auto to_double = [&](const std::string& v) {
            try {
                std::size_t pos = 0;
                double x = std::stod(v, &pos);
                if (pos != v.size()) throw std::runtime_error("trailing junk");
                return x;
            } catch (const std::exception&) {
                fail(key, "malformed number '" + v + "'");
                return 0.0;
            }
        };
        if (key == "grid_points") cfg.grid_points = static_cast<int>(to_long(val));
        else if (key == "deviation_step") cfg.deviation_step = to_double(val);
        else if (key == "profit_threshold") cfg.profit_threshold = to_double(val);
        else if (key == "seed") cfg.seed = to_long(val);
        else if (key == "parallel") {
            if (val == "true" || val == "1") cfg.parallel = true;
            else if (val == "false" || val == "0") cfg.parallel = false;
            else fail(key, "expected true/false");
        } else if (key == "tie_rule") {
            if (val == "first") cfg.tie_rule = TieRule::FirstVisited;
            else if (val == "second") cfg.tie_rule = TieRule::SecondVisited;
            else if (val == "split") cfg.tie_rule = TieRule::SplitEven;
            else fail(key, "expected first/second/split");
        } else if (key == "output_format") {
            if (val == "csv") cfg.output_format = OutputFormat::Csv;
            else if (val == "json") cfg.output_format = OutputFormat::Json;
            else fail(key, "expected csv/json");
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace persuasion
