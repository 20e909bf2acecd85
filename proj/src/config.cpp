#include "spdeinv/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "spdeinv/presets.hpp"

namespace spdeinv {

namespace {

constexpr std::array kKeys = {"a",      "T",  "M",      "N",         "u0",      "potential", "observation_index", "P",
                              "epsilon", "method", "mu", "xi_max", "base_seed", "sampler", "threads"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw InvalidInput(key + ": cannot parse '" + text + "'");
    return value;
}

}  // namespace

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) throw InvalidInput(key + ": unknown config key");
        if (!kv.emplace(key, value).second) throw InvalidInput(key + ": repeated config key");
    }
    const auto get = [&](const char* key, const char* fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? std::string(fallback) : it->second;
    };

    RunConfig c;
    const double a = parse_value<double>("a", get("a", "1"));
    const double T = parse_value<double>("T", get("T", "1"));
    const int M = parse_value<int>("M", get("M", "50"));
    const int N = parse_value<int>("N", get("N", "128"));
    c.grid = Grid1D::make(a, T, M, N);
    c.initial_condition = parse_initial(get("u0", "gauss16"), a);
    c.potential = parse_potential(get("potential", "example1"));
    c.observation_index = parse_value<int>("observation_index", get("observation_index", "0"));
    c.P = parse_value<long>("P", get("P", "10000"));
    c.epsilon = parse_value<double>("epsilon", get("epsilon", "0.1"));

    const std::string method = get("method", "tikhonov");
    if (method == "tikhonov") c.method = DiffMethod::tikhonov;
    else if (method == "cutoff") c.method = DiffMethod::cutoff;
    else throw InvalidInput("method: expected tikhonov or cutoff, got '" + method + "'");
    c.mu = parse_value<double>("mu", get("mu", "0.03"));
    c.xi_max = parse_value<double>("xi_max", get("xi_max", "30"));
    c.base_seed = parse_value<std::uint64_t>("base_seed", get("base_seed", "20240601"));

    const std::string sampler = get("sampler", "fd");
    if (sampler == "fd") c.sampler = Sampler::fd;
    else if (sampler == "exact") c.sampler = Sampler::exact_exponential;
    else throw InvalidInput("sampler: expected fd or exact, got '" + sampler + "'");
    c.threads = parse_value<int>("threads", get("threads", "1"));

    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const RunConfig& c, bool include_threads) {
    std::ostringstream out;
    out << "a = " << format_number(c.grid.a) << '\n'
        << "T = " << format_number(c.grid.T) << '\n'
        << "M = " << c.grid.M << '\n'
        << "N = " << c.grid.N << '\n'
        << "u0 = " << c.initial_condition.name << '\n'
        << "potential = " << c.potential.name << '\n'
        << "observation_index = " << c.observation_index << '\n'
        << "P = " << c.P << '\n'
        << "epsilon = " << format_number(c.epsilon) << '\n'
        << "method = " << (c.method == DiffMethod::tikhonov ? "tikhonov" : "cutoff") << '\n'
        << "mu = " << format_number(c.mu) << '\n'
        << "xi_max = " << format_number(c.xi_max) << '\n'
        << "base_seed = " << c.base_seed << '\n'
        << "sampler = " << (c.sampler == Sampler::fd ? "fd" : "exact") << '\n';
    if (include_threads) out << "threads = " << c.threads << '\n';
    return out.str();
}

}  // namespace spdeinv
