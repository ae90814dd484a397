#include "run_config.hpp"

#include "epforest/errors.hpp"
#include "epforest/version.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace epf::cli {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(strip(item)));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': cannot parse integer '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::pair<Date, Date> parse_range(const std::string& text) {
    const auto sep = text.find("..");
    if (sep == std::string::npos)
        throw ConfigError("range '" + text + "': expected FROM..TO dates");
    return {parse_date(strip(text.substr(0, sep))), parse_date(strip(text.substr(sep + 2)))};
}

} // namespace

void RunConfig::validate() const {
    if (target != "base" && target != "peak")
        throw ConfigError("target must be base or peak, got '" + target + "'");
    if (from && to && *from > *to) throw ConfigError("date filter: from is after to");
    for (const auto& [lo, hi] : ranges)
        if (lo > hi) throw ConfigError("range " + format_date(lo) + ".." + format_date(hi) +
                                       ": from is after to");
    if (min_node_sizes.empty()) throw ConfigError("min-node list must not be empty");
    if (tree_counts.empty()) throw ConfigError("trees list must not be empty");
    for (const int m : min_node_sizes)
        if (m < 2) throw ConfigError("min-node values must be at least 2");
    for (const int t : tree_counts)
        if (t < 1) throw ConfigError("trees values must be at least 1");
    if (fill != "forward" && fill != "linear")
        throw ConfigError("fill must be forward or linear, got '" + fill + "'");
    if (grid_points < 1) throw ConfigError("grid must be at least 1");
    if (threads < 0) throw ConfigError("threads must be nonnegative");
    if (mtry < 0) throw ConfigError("mtry must be nonnegative");
    if (min_rows < 1) throw ConfigError("min-rows must be positive");
}

void RunConfig::apply_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    bool ranges_cleared = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = strip(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = strip(text.substr(0, eq));
        const std::string value = strip(text.substr(eq + 1));

        if (key == "input")
            input = value;
        else if (key == "scenario")
            scenario = value;
        else if (key == "features")
            feature_spec = value;
        else if (key == "out")
            out_dir = value;
        else if (key == "target")
            target = value;
        else if (key == "from")
            from = parse_date(value);
        else if (key == "to")
            to = parse_date(value);
        else if (key == "range") {
            if (!ranges_cleared) {
                ranges.clear();
                ranges_cleared = true;
            }
            ranges.push_back(parse_range(value));
        } else if (key == "min-node")
            min_node_sizes = parse_int_list(key, value);
        else if (key == "trees")
            tree_counts = parse_int_list(key, value);
        else if (key == "mtry")
            mtry = std::stoi(value);
        else if (key == "seed")
            seed = std::stoull(value);
        else if (key == "threads")
            threads = std::stoi(value);
        else if (key == "fill")
            fill = value;
        else if (key == "min-rows")
            min_rows = std::stoi(value);
        else if (key == "grid")
            grid_points = std::stoi(value);
        else if (key == "feature-a")
            feature_a = value;
        else if (key == "feature-b")
            feature_b = value;
        else
            throw ConfigError("config key '" + key + "': unknown key");
    }
}

std::string RunConfig::canonical_string(const std::string& command) const {
    std::ostringstream out;
    out << "command=" << command << '\n';
    out << "input=" << input.string() << '\n';
    out << "scenario=" << scenario.string() << '\n';
    out << "features=" << feature_spec.string() << '\n';
    out << "target=" << target << '\n';
    out << "from=" << (from ? format_date(*from) : "") << '\n';
    out << "to=" << (to ? format_date(*to) : "") << '\n';
    for (const auto& [lo, hi] : ranges)
        out << "range=" << format_date(lo) << ".." << format_date(hi) << '\n';
    out << "min-node=";
    for (std::size_t i = 0; i < min_node_sizes.size(); ++i)
        out << (i ? "," : "") << min_node_sizes[i];
    out << "\ntrees=";
    for (std::size_t i = 0; i < tree_counts.size(); ++i) out << (i ? "," : "") << tree_counts[i];
    out << "\nmtry=" << mtry << '\n';
    out << "seed=" << seed << '\n';
    out << "fill=" << fill << '\n';
    out << "min-rows=" << min_rows << '\n';
    out << "grid=" << grid_points << '\n';
    out << "feature-a=" << feature_a << '\n';
    out << "feature-b=" << feature_b << '\n';
    // threads and out_dir intentionally excluded: they must not change results.
    return out.str();
}

std::uint64_t config_hash(const RunConfig& config, const std::string& command) {
    const std::string text = config.canonical_string(command);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::vector<std::string> output_header(const RunConfig& config, const std::string& command) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(config, command)));
    return {std::string("tool: epforest ") + kVersion, "command: " + command,
            std::string("config-hash: ") + buf};
}

} // namespace epf::cli
