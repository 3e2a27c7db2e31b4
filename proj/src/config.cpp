#include "fluctuon/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

namespace fluctuon {

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
          std::string s;
          for (const auto& e : errors) s += (s.empty() ? "" : "\n") + e;
          return s;
      }()),
      errors_(std::move(errors)) {}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const { return serialize(*this) == serialize(o); }

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool to_double(const std::string& s, double& v) {
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(v);
}

template <class I>
bool to_int(const std::string& s, I& v) {
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
    return s;
}

struct Key {
    std::string section, name;
    std::function<std::string(ExperimentConfig&, const std::string&)> set;  // returns error text
    std::function<std::string(const ExperimentConfig&)> get;
};

Key dbl(std::string sec, std::string name, double ExperimentConfig::*field) {
    return {sec, name,
            [field, name](ExperimentConfig& c, const std::string& v) -> std::string {
                double d;
                if (!to_double(v, d)) return name + ": expected a number, got '" + v + "'";
                c.*field = d;
                return "";
            },
            [field](const ExperimentConfig& c) { return fmt(c.*field); }};
}

Key intg(std::string sec, std::string name, int ExperimentConfig::*field) {
    return {sec, name,
            [field, name](ExperimentConfig& c, const std::string& v) -> std::string {
                int d;
                if (!to_int(v, d)) return name + ": expected an integer, got '" + v + "'";
                c.*field = d;
                return "";
            },
            [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

Key model_dbl(std::string name, double ModelParams::*field) {
    return {"model", name,
            [field, name](ExperimentConfig& c, const std::string& v) -> std::string {
                double d;
                if (!to_double(v, d)) return name + ": expected a number, got '" + v + "'";
                c.model.*field = d;
                return "";
            },
            [field](const ExperimentConfig& c) { return fmt(c.model.*field); }};
}

Key dlist(std::string sec, std::string name, std::vector<double> ExperimentConfig::*field) {
    return {sec, name,
            [field, name](ExperimentConfig& c, const std::string& v) -> std::string {
                std::vector<double> out;
                for (const auto& item : split_list(v)) {
                    double d;
                    if (!to_double(item, d)) return name + ": '" + item + "' is not a number";
                    out.push_back(d);
                }
                c.*field = out;
                return "";
            },
            [field](const ExperimentConfig& c) {
                return join<double>(c.*field, [](const double& d) { return fmt(d); });
            }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> k = [] {
        std::vector<Key> v;
        v.push_back(model_dbl("gamma", &ModelParams::gamma));
        v.push_back(model_dbl("theta", &ModelParams::theta));
        v.push_back(model_dbl("kappa", &ModelParams::kappa));
        v.push_back(model_dbl("alpha", &ModelParams::alpha));
        v.push_back(model_dbl("beta", &ModelParams::beta));
        v.push_back(model_dbl("rho", &ModelParams::rho));
        v.push_back({"model", "N",
                     [](ExperimentConfig& c, const std::string& s) -> std::string {
                         if (!to_int(s, c.model.N)) return "N: expected an integer, got '" + s + "'";
                         return "";
                     },
                     [](const ExperimentConfig& c) { return std::to_string(c.model.N); }});
        v.push_back({"experiment", "id",
                     [](ExperimentConfig& c, const std::string& s) -> std::string {
                         c.id = s;
                         return "";
                     },
                     [](const ExperimentConfig& c) { return c.id; }});
        v.push_back(intg("experiment", "replicas", &ExperimentConfig::replicas));
        v.push_back(dlist("experiment", "lags", &ExperimentConfig::lags));
        v.push_back(dlist("experiment", "times", &ExperimentConfig::times));
        v.push_back(dbl("experiment", "burn_in", &ExperimentConfig::burn_in));
        v.push_back({"experiment", "seed",
                     [](ExperimentConfig& c, const std::string& s) -> std::string {
                         if (!to_int(s, c.seed)) return "seed: expected a non-negative integer, got '" + s + "'";
                         return "";
                     },
                     [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
        v.push_back({"experiment", "functions",
                     [](ExperimentConfig& c, const std::string& s) -> std::string {
                         c.functions = split_list(s);
                         return "";
                     },
                     [](const ExperimentConfig& c) {
                         return join<std::string>(c.functions, [](const std::string& x) { return x; });
                     }});
        v.push_back(dbl("experiment", "g_left", &ExperimentConfig::g_left));
        v.push_back(dbl("experiment", "g_right", &ExperimentConfig::g_right));
        v.push_back(dlist("experiment", "windows", &ExperimentConfig::windows));
        v.push_back(intg("numerics", "M", &ExperimentConfig::M));
        v.push_back(intg("numerics", "n_max", &ExperimentConfig::n_max));
        v.push_back(dbl("numerics", "dt", &ExperimentConfig::dt));
        v.push_back(intg("numerics", "nbins", &ExperimentConfig::nbins));
        v.push_back(intg("numerics", "threads", &ExperimentConfig::threads));
        v.push_back({"numerics", "with_potential",
                     [](ExperimentConfig& c, const std::string& s) -> std::string {
                         if (s == "true") c.with_potential = true;
                         else if (s == "false") c.with_potential = false;
                         else return "with_potential: expected true or false, got '" + s + "'";
                         return "";
                     },
                     [](const ExperimentConfig& c) { return std::string(c.with_potential ? "true" : "false"); }});
        v.push_back({"numerics", "Ns",
                     [](ExperimentConfig& c, const std::string& s) -> std::string {
                         std::vector<int> out;
                         for (const auto& item : split_list(s)) {
                             int d;
                             if (!to_int(item, d)) return "Ns: '" + item + "' is not an integer";
                             out.push_back(d);
                         }
                         c.Ns = out;
                         return "";
                     },
                     [](const ExperimentConfig& c) {
                         return join<int>(c.Ns, [](const int& d) { return std::to_string(d); });
                     }});
        v.push_back({"output", "out",
                     [](ExperimentConfig& c, const std::string& s) -> std::string {
                         c.out = s;
                         return "";
                     },
                     [](const ExperimentConfig& c) { return c.out; }});
        return v;
    }();
    return k;
}

bool sorted_nonneg(const std::vector<double>& v) {
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i] < 0 || (i > 0 && v[i] <= v[i - 1])) return false;
    return true;
}

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& c) {
    std::vector<std::string> e;
    for (auto& p : c.model.problems()) e.push_back("[model] " + p);
    if (std::find(kExperimentIds.begin(), kExperimentIds.end(), c.id) == kExperimentIds.end()) {
        std::string ids;
        for (const auto& s : kExperimentIds) ids += (ids.empty() ? "" : ", ") + s;
        e.push_back("[experiment] id '" + c.id + "' is not one of " + ids);
    }
    if (c.replicas < 2) e.push_back("[experiment] replicas must be at least 2");
    if (c.lags.empty() || !sorted_nonneg(c.lags)) e.push_back("[experiment] lags must be non-empty, increasing, >= 0");
    if (c.times.empty() || !sorted_nonneg(c.times))
        e.push_back("[experiment] times must be non-empty, increasing, >= 0");
    if (c.burn_in < 0) e.push_back("[experiment] burn_in must be non-negative");
    static const std::regex fn("(basis|sin)[1-9][0-9]*|one|bump");
    if (c.functions.empty()) e.push_back("[experiment] functions must name at least one test function");
    for (const auto& f : c.functions)
        if (!std::regex_match(f, fn)) e.push_back("[experiment] unknown test function '" + f + "'");
    if (!(c.g_left >= 0 && c.g_left <= 1) || !(c.g_right >= 0 && c.g_right <= 1))
        e.push_back("[experiment] g_left and g_right must lie in [0,1]");
    for (double w : c.windows)
        if (!(w > 0 && w <= 1) || std::floor(w * c.model.N + 1e-9) < 1)
            e.push_back("[experiment] window " + fmt(w) + " must lie in (0,1] and cover at least one site");
    if (c.M < 64) e.push_back("[numerics] M must be at least 64");
    if (c.n_max < 1 || c.n_max > c.M / 4) e.push_back("[numerics] n_max must lie in [1, M/4]");
    if (c.dt < 0 || (c.M > 0 && c.dt > 1.0 / c.M)) e.push_back("[numerics] dt must lie in [0, 1/M] (0 selects 1/M)");
    if (c.nbins < 1 || c.nbins > c.model.N - 1) e.push_back("[numerics] nbins must lie in [1, N-1]");
    if (c.threads < 0) e.push_back("[numerics] threads must be non-negative");
    if (c.Ns.empty()) e.push_back("[numerics] Ns must list at least one lattice size");
    for (int n : c.Ns)
        if (n < 2) e.push_back("[numerics] every entry of Ns must be at least 2");
    if (c.out.empty()) e.push_back("[output] out must not be empty");
    if ((c.id == "cov-check" || c.id == "qv-check" || c.id == "boundary-window") && !c.model.equilibrium())
        e.push_back("[model] " + c.id + " runs at equilibrium and needs alpha = beta = rho");
    return e;
}

ParseOutcome parse_config_text(const std::string& text) {
    ParseOutcome out;
    std::map<std::string, int> seen;  // "section.key" -> line
    std::string section;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    auto err = [&](const std::string& m) { out.errors.push_back("line " + std::to_string(ln) + ": " + m); };
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                err("malformed section header '" + line + "'");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "experiment" && section != "numerics" && section != "output") {
                err("unknown section [" + section + "]");
                section = "?";
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            err("expected key = value, got '" + line + "'");
            continue;
        }
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (section.empty()) {
            err("key '" + key + "' appears before any section");
            continue;
        }
        if (section == "?") continue;
        auto it = std::find_if(keys().begin(), keys().end(),
                               [&](const Key& k) { return k.section == section && k.name == key; });
        if (it == keys().end()) {
            err("unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        std::string tag = section + "." + key;
        if (auto s = seen.find(tag); s != seen.end()) {
            err("duplicate key '" + key + "' in [" + section + "] (lines " + std::to_string(s->second) + " and " +
                std::to_string(ln) + ")");
            continue;
        }
        seen[tag] = ln;
        if (auto m = it->set(out.config, val); !m.empty()) err(m);
    }
    if (!seen.count("experiment.id")) out.errors.push_back("[experiment] id is required");
    out.syntax = out.errors;
    for (auto& e : validate_config(out.config))
        if (seen.count("experiment.id") || e.rfind("[experiment] id", 0) != 0) out.errors.push_back(e);
    return out;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError({"cannot open config file '" + path + "'"});
    std::stringstream ss;
    ss << f.rdbuf();
    auto r = parse_config_text(ss.str());
    if (!r.errors.empty()) throw ConfigError(r.errors);
    return r.config;
}

std::string serialize(const ExperimentConfig& c) {
    std::string s;
    for (const char* sec : {"model", "experiment", "numerics", "output"}) {
        s += std::string(s.empty() ? "" : "\n") + "[" + sec + "]\n";
        for (const auto& k : keys())
            if (k.section == sec) s += k.name + " = " + k.get(c) + "\n";
    }
    return s;
}

std::string config_hash(const ExperimentConfig& c) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : serialize(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fluctuon
