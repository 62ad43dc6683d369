#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fracture {

/// Key-value configuration with [section] headers, '#' comments, and list
/// values ("1,2,3" or "start:step:stop" ranges). Keys remember their source
/// line for error reporting.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin = "<config>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback = "") const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;

    /// Required variants throw std::invalid_argument naming key and line.
    std::string require_string(const std::string& section, const std::string& key) const;
    double require_double(const std::string& section, const std::string& key) const;
    std::vector<double> require_list(const std::string& section, const std::string& key) const;

    int line_of(const std::string& section, const std::string& key) const;
    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return values_;
    }
    const std::string& origin() const { return origin_; }

  private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    std::map<std::string, int> lines_;  // "section.key" -> line
    std::string origin_;
};

/// Expands "a:step:b" ranges and comma lists into numbers.
std::vector<double> parse_number_list(const std::string& text);

struct ConfigProblem {
    std::string path;  // section.key
    int line = 0;
    std::string message;
};

/// Schema check (known sections/keys, value types) plus semantic lint:
/// eps grids positive decreasing, finite a grids, strain within the M box.
std::vector<ConfigProblem> validate_config(const Config& cfg);

}  // namespace fracture
