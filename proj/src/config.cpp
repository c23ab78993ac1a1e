#include "esd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace esd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// every key the tool understands, as section.key
const std::set<std::string>& schema() {
    static const std::set<std::string> keys = {
        "simulate.case", "simulate.n", "simulate.snr", "simulate.missing",
        "simulate.phi_zeta", "simulate.seed",
        "data.bundle", "data.csv", "data.coords", "data.value",
        "data.holdout", "data.holdout_seed",
        "basis.kind", "basis.knots", "basis.knots_x", "basis.knots_y", "basis.bandwidth",
        "fit.B", "fit.burn_in", "fit.thin", "fit.K", "fit.m_sub", "fit.phi_grid",
        "fit.phi_L", "fit.phi_U", "fit.mh_step", "fit.adapt_mh", "fit.seed",
        "fit.alpha1", "fit.beta1", "fit.alpha2", "fit.beta2", "fit.alpha3", "fit.beta3",
        "fit.alpha4", "fit.beta4", "fit.alpha5", "fit.beta5",
        "fit.fix_phi", "fit.fix_sigma_nu_sq", "fit.fix_sigma_beta_sq",
        "fit.fix_sigma_eta_sq", "fit.fix_delta_sq", "fit.fix_sigma_eps_sq",
        "fit.fix_eta_zero", "fit.checkpoint_every", "fit.stop_after", "fit.resume",
        "predict.chain_dir",
        "evaluate.chain_dir", "evaluate.level",
        "spectral.K", "spectral.reps", "spectral.phi", "spectral.sigma_nu_sq",
        "spectral.lags", "spectral.tol", "spectral.mean_tol", "spectral.seed",
        "sweep.seed", "sweep.fit",
    };
    return keys;
}

}  // namespace

Config Config::from_string(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                            ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": key outside any [section]");
        const std::string full = section + "." + key;
        if (!schema().count(full))
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": unknown key '" + full + "'");
        cfg.values_[full] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_string(buf.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& def) const {
    const auto it = values_.find(section + "." + key);
    return it == values_.end() ? def : it->second;
}

double Config::get_double(const std::string& section, const std::string& key, double def) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end()) return def;
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(it->second, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + it->first + ": not a number: " + it->second);
    }
    if (pos != it->second.size())
        throw std::invalid_argument("config: " + it->first + ": not a number: " + it->second);
    return v;
}

int Config::get_int(const std::string& section, const std::string& key, int def) const {
    const double v = get_double(section, key, static_cast<double>(def));
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw std::invalid_argument("config: " + section + "." + key + ": expected integer");
    return i;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key,
                              std::uint64_t def) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end()) return def;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + it->first + ": expected unsigned integer");
    }
}

bool Config::get_bool(const std::string& section, const std::string& key, bool def) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end()) return def;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument("config: " + it->first + ": expected true/false");
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& def) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end()) return def;
    std::vector<double> out;
    std::istringstream is(it->second);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: " + it->first + ": bad list element: " + tok);
        }
    }
    if (out.empty())
        throw std::invalid_argument("config: " + it->first + ": empty list");
    return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    const std::string full = section + "." + key;
    if (!schema().count(full)) throw std::invalid_argument("config: unknown key '" + full + "'");
    values_[full] = value;
}

std::string Config::echo() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
    return os.str();
}

}  // namespace esd
