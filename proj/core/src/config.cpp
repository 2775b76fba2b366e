#include "csmpd/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "csmpd/constants.hpp"

namespace csmpd {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError(key, "not a number: '" + value + "'");
    return v;
}

/// xi is "re" or "re,im".
Complex parse_complex(const std::string& key, const std::string& value) {
    const auto comma = value.find(',');
    if (comma == std::string::npos) return {parse_double(key, value), 0.0};
    return {parse_double(key, trim(value.substr(0, comma))),
            parse_double(key, trim(value.substr(comma + 1)))};
}

/// Pulls values out of one section, tracking which keys were consumed so
/// typos can be reported instead of silently ignored.
class Section {
public:
    Section(const ParsedConfig& cfg, const std::string& name) : name_(name) {
        auto it = cfg.sections.find(name);
        if (it != cfg.sections.end()) entries_ = &it->second;
    }

    bool exists() const { return entries_ != nullptr; }

    bool has(const std::string& key) const {
        return entries_ && entries_->count(key) > 0;
    }

    std::string raw(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) throw ConfigError(name_ + "." + key, "missing required key");
        return entries_->at(key);
    }

    double number(const std::string& key) {
        return parse_double(name_ + "." + key, raw(key));
    }
    double number_or(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }
    Complex complex_number(const std::string& key) {
        return parse_complex(name_ + "." + key, raw(key));
    }

    void reject_unknown() const {
        if (!entries_) return;
        for (const auto& [key, value] : *entries_)
            if (!seen_.count(key))
                throw ConfigError(name_ + "." + key, "unknown key");
    }

private:
    std::string name_;
    const std::map<std::string, std::string>* entries_ = nullptr;
    std::set<std::string> seen_;
};

} // namespace

ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno),
                                  "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno), "empty section name");
            cfg.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno),
                              "expected 'key = value', got '" + line + "'");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno),
                              "key before any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        auto& sec = cfg.sections[section];
        if (sec.count(key))
            throw ConfigError(section + "." + key, "duplicate key");
        sec[key] = value;
    }
    return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

DeviceConfig load_device(const ParsedConfig& cfg) {
    DeviceConfig dev;

    for (std::size_t k = 0;; ++k) {
        Section sec(cfg, "mode." + std::to_string(k));
        if (!sec.exists()) break;
        ModeSpec m;
        m.role = mode_role_from_string(sec.raw("role"));
        m.omega = hz_to_angular(sec.number("omega"));
        m.kappa_ext = sec.number_or("kappa_ext", 0.0);
        m.kappa_int = sec.number_or("kappa_int", 0.0);
        sec.reject_unknown();
        dev.chain.modes.push_back(m);
    }
    for (std::size_t k = 0;; ++k) {
        Section sec(cfg, "qubit." + std::to_string(k));
        if (!sec.exists()) break;
        QubitSpec q;
        q.omega_ge = hz_to_angular(sec.number("omega_ge"));
        q.chi_self = hz_to_angular(sec.number_or("chi_self", 0.0));
        q.chi_left = hz_to_angular(sec.number("chi_left"));
        q.chi_right = hz_to_angular(sec.number("chi_right"));
        q.t1 = sec.number_or("t1", 0.0);
        q.t1_pumped = sec.number_or("t1_pumped", q.t1);
        q.p_eq = sec.number_or("p_eq", 0.0);
        q.p_eq_reset = sec.number_or("p_eq_reset", 0.0);
        q.f_ro = sec.number_or("f_ro", 1.0);
        sec.reject_unknown();
        dev.chain.qubits.push_back(q);
    }
    for (std::size_t k = 0;; ++k) {
        Section sec(cfg, "pump." + std::to_string(k));
        if (!sec.exists()) break;
        PumpSpec p;
        p.xi = sec.complex_number("xi");
        p.delta_p = hz_to_angular(sec.number_or("delta_p", 0.0));
        sec.reject_unknown();
        dev.chain.pumps.push_back(p);
    }
    dev.chain.validate();

    {
        Section sec(cfg, "cycle");
        if (!sec.exists()) throw ConfigError("cycle", "missing [cycle] section");
        dev.cycle.t_d = sec.number("t_d");
        dev.cycle.t_ro = sec.number("t_ro");
        dev.cycle.t_reset = sec.number("t_reset");
        dev.cycle.n_reset = sec.number_or("n_reset", 0.0);
        sec.reject_unknown();
        dev.cycle.validate();
    }
    {
        Section sec(cfg, "environment");
        if (sec.exists()) {
            dev.environment.temperature = sec.number_or("temperature", 0.0);
            if (sec.has("background_occupations")) {
                // comma-separated frequency_hz:occupation pairs
                std::istringstream pairs(sec.raw("background_occupations"));
                std::string item;
                while (std::getline(pairs, item, ',')) {
                    const auto colon = item.find(':');
                    if (colon == std::string::npos)
                        throw ConfigError("environment.background_occupations",
                                          "expected freq_hz:occupation, got '" + item + "'");
                    const double f = parse_double("environment.background_occupations",
                                                  trim(item.substr(0, colon)));
                    const double n = parse_double("environment.background_occupations",
                                                  trim(item.substr(colon + 1)));
                    dev.environment.background_occupations[f] = n;
                }
            }
            sec.reject_unknown();
        }
        dev.environment.validate();
    }
    {
        Section sec(cfg, "noise");
        if (sec.exists()) {
            dev.alpha_pump = sec.number_or("alpha_pump", 0.0);
            dev.alpha_ro = sec.number_or("alpha_ro", 0.0);
            sec.reject_unknown();
        }
        if (dev.alpha_pump < 0.0 || dev.alpha_ro < 0.0)
            throw ConfigError("noise", "alpha inputs must be >= 0");
    }

    // Catch stray sections (typoed indices, unknown names).
    for (const auto& [name, entries] : cfg.sections) {
        (void)entries;
        const bool known =
            name == "cycle" || name == "environment" || name == "noise" ||
            name.rfind("mode.", 0) == 0 || name.rfind("qubit.", 0) == 0 ||
            name.rfind("pump.", 0) == 0;
        if (!known) throw ConfigError(name, "unknown section");
        if (name.rfind("mode.", 0) == 0) {
            const std::size_t idx = std::strtoul(name.c_str() + 5, nullptr, 10);
            if (idx >= dev.chain.modes.size())
                throw ConfigError(name, "non-contiguous mode index");
        }
        if (name.rfind("qubit.", 0) == 0) {
            const std::size_t idx = std::strtoul(name.c_str() + 6, nullptr, 10);
            if (idx >= dev.chain.qubits.size())
                throw ConfigError(name, "non-contiguous qubit index");
        }
        if (name.rfind("pump.", 0) == 0) {
            const std::size_t idx = std::strtoul(name.c_str() + 5, nullptr, 10);
            if (idx >= dev.chain.pumps.size())
                throw ConfigError(name, "non-contiguous pump index");
        }
    }
    return dev;
}

DeviceConfig load_device_file(const std::string& path) {
    return load_device(parse_config_file(path));
}

} // namespace csmpd
