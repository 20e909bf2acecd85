#include "spdeinv/presets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

namespace spdeinv {

namespace {

struct Table {
    std::vector<double> x, y;

    double operator()(double t) const {
        if (t <= x.front()) return y.front();
        if (t >= x.back()) return y.back();
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        const auto i = static_cast<std::size_t>(it - x.begin()) - 1;
        const double w = (t - x[i]) / (x[i + 1] - x[i]);
        return (1.0 - w) * y[i] + w * y[i + 1];
    }
};

std::shared_ptr<const Table> read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open table '" + path + "'");
    auto table = std::make_shared<Table>();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidInput("table '" + path + "': expected 'x,value' rows");
        try {
            const double x = std::stod(line.substr(0, comma));
            const double y = std::stod(line.substr(comma + 1));
            table->x.push_back(x);
            table->y.push_back(y);
        } catch (const std::invalid_argument&) {
            if (table->x.empty()) continue;  // header row
            throw InvalidInput("table '" + path + "': unparsable row '" + line + "'");
        }
    }
    if (table->x.size() < 2) throw InvalidInput("table '" + path + "': need at least 2 rows");
    for (std::size_t i = 1; i < table->x.size(); ++i)
        if (!(table->x[i] > table->x[i - 1])) throw InvalidInput("table '" + path + "': abscissae must increase");
    return table;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

Potential example1_potential() {
    return {"example1", [](double t) { return std::sin(std::numbers::pi * t); }};
}

Potential example2_potential() {
    return {"example2", [](double t) {
                if (t <= 0.2 || t >= 0.8) return 0.0;
                if (t <= 0.5) return 4.0 * std::sqrt(t - 0.2);
                return 4.0 * std::sqrt(0.8 - t);
            }};
}

Potential example3_potential() {
    return {"example3", [](double t) {
                if (t <= 0.2) return 0.0;
                if (t <= 0.5) return 1.0;
                if (t <= 0.8) return 2.0;
                return 0.0;
            }};
}

Potential constant_potential(double c) {
    std::ostringstream name;
    name.precision(17);
    name << "constant(" << c << ")";
    return {name.str(), [c](double) { return c; }};
}

Potential parse_potential(const std::string& spec) {
    if (spec == "example1") return example1_potential();
    if (spec == "example2") return example2_potential();
    if (spec == "example3") return example3_potential();
    if (starts_with(spec, "constant(") && spec.back() == ')') {
        const std::string inner = spec.substr(9, spec.size() - 10);
        std::size_t used = 0;
        double c = 0.0;
        try {
            c = std::stod(inner, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != inner.size() || !std::isfinite(c))
            throw InvalidInput("potential: bad constant in '" + spec + "'");
        return constant_potential(c);
    }
    if (starts_with(spec, "csv:")) {
        auto table = read_table(spec.substr(4));
        return {spec, [table](double t) { return (*table)(t); }};
    }
    throw InvalidInput("potential: unknown preset '" + spec + "'");
}

InitialCondition gaussian_initial() {
    return {"gauss16", [](double x) { return std::exp(-16.0 * x * x); }};
}

InitialCondition sine_initial(double a) {
    return {"sine1", [a](double x) { return std::sin(std::numbers::pi * (x + a) / (2.0 * a)); }};
}

InitialCondition parse_initial(const std::string& spec, double a) {
    if (spec == "gauss16") return gaussian_initial();
    if (spec == "sine1") return sine_initial(a);
    if (starts_with(spec, "csv:")) {
        auto table = read_table(spec.substr(4));
        return {spec, [table](double x) { return (*table)(x); }};
    }
    throw InvalidInput("u0: unknown initial condition '" + spec + "'");
}

}  // namespace spdeinv
