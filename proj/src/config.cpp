#include "fracture/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fracture/density.hpp"

namespace fracture {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;  // "" = top level
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": empty key");
        cfg.values_[section][key] = value;
        cfg.lines_[section + "." + key] = lineno;
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    return s != values_.end() && s->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const auto s = values_.find(section);
    if (s == values_.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    if (!has(section, key)) return fallback;
    return std::stod(get_string(section, key));
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    return std::stoi(get_string(section, key));
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key) const {
    if (!has(section, key)) return {};
    return parse_number_list(get_string(section, key));
}

std::string Config::require_string(const std::string& section, const std::string& key) const {
    if (!has(section, key))
        throw std::invalid_argument(origin_ + ": missing required key [" + section + "] " + key);
    return get_string(section, key);
}

double Config::require_double(const std::string& section, const std::string& key) const {
    return std::stod(require_string(section, key));
}

std::vector<double> Config::require_list(const std::string& section, const std::string& key) const {
    return parse_number_list(require_string(section, key));
}

int Config::line_of(const std::string& section, const std::string& key) const {
    const auto it = lines_.find(section + "." + key);
    return it == lines_.end() ? 0 : it->second;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(std::stod(item));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw std::invalid_argument("number list: range needs start:step:stop, got " + item);
        const double start = std::stod(item.substr(0, c1));
        const double step = std::stod(item.substr(c1 + 1, c2 - c1 - 1));
        const double stop = std::stod(item.substr(c2 + 1));
        if (step == 0.0) throw std::invalid_argument("number list: zero step");
        const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (int i = 0; i < n; ++i) out.push_back(start + i * step);
    }
    return out;
}

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"", {"experiment", "seed", "out_root"}},
    {"mesh", {"l", "nx", "ny", "collar_cols"}},
    {"density", {"id", "box_m"}},
    {"cleavage", {"a_grid", "eps_grid", "mode"}},
    {"gamma", {"triple", "eps_grid", "xi", "sigma_grid"}},
    {"rigidity", {"eps_grid", "alpha_x", "alpha_y", "cstar", "tail"}},
    {"loads", {"lambda", "eps_grid"}},
    {"partition-demo", {}},
};

const std::set<std::string> kExperiments = {"cleavage", "gamma", "rigidity", "loads",
                                            "partition-demo"};

}  // namespace

std::vector<ConfigProblem> validate_config(const Config& cfg) {
    std::vector<ConfigProblem> problems;
    auto add = [&](const std::string& section, const std::string& key, const std::string& msg) {
        problems.push_back({section.empty() ? key : section + "." + key,
                            cfg.line_of(section, key), msg});
    };

    for (const auto& [section, kv] : cfg.sections()) {
        const auto schema = kSchema.find(section);
        if (schema == kSchema.end()) {
            problems.push_back({section, 0, "unknown section"});
            continue;
        }
        for (const auto& [key, value] : kv)
            if (!schema->second.count(key)) add(section, key, "unknown key");
    }

    const std::string experiment = cfg.get_string("", "experiment");
    if (experiment.empty()) {
        add("", "experiment", "missing experiment name");
        return problems;
    }
    if (!kExperiments.count(experiment)) {
        add("", "experiment", "unknown experiment '" + experiment + "'");
        return problems;
    }

    const std::string density_id = cfg.get_string("density", "id", "dist2");
    if (density_id != "dist2" && density_id != "stvk")
        add("density", "id", "unknown density '" + density_id + "'");
    const double box_m = cfg.get_double("density", "box_m", kDefaultBoxBound);

    auto check_eps_grid = [&](const std::string& section) {
        if (!cfg.has(section, "eps_grid")) return std::vector<double>{};
        std::vector<double> eps;
        try {
            eps = cfg.get_list(section, "eps_grid");
        } catch (const std::exception& e) {
            add(section, "eps_grid", e.what());
            return std::vector<double>{};
        }
        for (double v : eps)
            if (!(v > 0.0)) add(section, "eps_grid", "eps values must be positive");
        for (size_t i = 1; i < eps.size(); ++i)
            if (eps[i] >= eps[i - 1]) add(section, "eps_grid", "eps grid must be decreasing");
        return eps;
    };

    if (experiment == "cleavage") {
        std::vector<double> a_grid;
        try {
            a_grid = cfg.get_list("cleavage", "a_grid");
        } catch (const std::exception& e) {
            add("cleavage", "a_grid", e.what());
        }
        if (a_grid.empty()) add("cleavage", "a_grid", "empty a grid");
        for (double a : a_grid)
            if (!std::isfinite(a)) add("cleavage", "a_grid", "a grid must be finite");
        const auto eps = check_eps_grid("cleavage");
        if (eps.empty() && !cfg.has("cleavage", "eps_grid"))
            add("cleavage", "eps_grid", "missing eps grid");
        // Largest boundary strain must leave room inside the M box.
        double worst = 0.0;
        for (double a : a_grid)
            for (double e : eps) worst = std::max(worst, std::fabs(a) * std::sqrt(e));
        if (!a_grid.empty() && !eps.empty()) {
            const double bound = std::sqrt(2.0) * (1.0 + worst) + worst;
            if (bound > box_m)
                add("cleavage", "a_grid",
                    "largest |a| sqrt(eps) pushes the deformation outside the M box; admissible "
                    "|a| sqrt(eps) <= " +
                        std::to_string((box_m / std::sqrt(2.0) - 1.0)));
        }
        const std::string mode = cfg.get_string("cleavage", "mode", "candidates");
        if (mode != "candidates" && mode != "alternating" && mode != "both")
            add("cleavage", "mode", "mode must be candidates|alternating|both");
    } else if (experiment == "gamma") {
        check_eps_grid("gamma");
        const std::string xi = cfg.get_string("gamma", "xi", "e1");
        if (xi != "e1" && xi != "e2") add("gamma", "xi", "xi must be e1 or e2");
        for (double s : cfg.get_list("gamma", "sigma_grid"))
            if (s < 0.0) add("gamma", "sigma_grid", "sigma must be nonnegative");
    } else if (experiment == "rigidity" || experiment == "loads") {
        check_eps_grid(experiment);
    }
    return problems;
}

}  // namespace fracture
