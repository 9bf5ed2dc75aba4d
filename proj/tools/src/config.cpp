#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "harness.hpp"

namespace relsmooth::harness {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Section {
public:
    Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {
        for (const auto& [key, child] : tree_) {
            if (!child.empty()) {
                throw ConfigError("[" + name_ + "]: nested key '" + key + "'");
            }
        }
    }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [key, child] : tree_) {
            if (!ok.count(key)) {
                throw ConfigError("[" + name_ + "]: unknown key '" + key + "'");
            }
        }
    }

    bool has(const char* key) const { return tree_.find(key) != tree_.not_found(); }

    std::string text(const char* key) const {
        const auto it = tree_.find(key);
        if (it == tree_.not_found()) {
            throw ConfigError("[" + name_ + "]: missing key '" + key + "'");
        }
        return trim(it->second.data());
    }

    std::string text_or(const char* key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    double real(const char* key) const {
        const std::string s = text(key);
        double v = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw ConfigError("[" + name_ + "]: '" + key + "' is not a finite number: '" + s + "'");
        }
        return v;
    }

    double real_or(const char* key, double fallback) const { return has(key) ? real(key) : fallback; }

    long integer(const char* key, long min) const {
        return parse_integer(text(key), key, min);
    }

    long integer_or(const char* key, long fallback, long min) const {
        return has(key) ? integer(key, min) : fallback;
    }

    std::uint64_t unsigned_value(const std::string& s, const char* key) const {
        return static_cast<std::uint64_t>(parse_integer(s, key, 0));
    }

    SeedSpec seed(const char* key) const {
        SeedSpec spec;
        const std::string s = text_or(key, "replicate");
        if (s == "replicate") {
            spec.per_replicate = true;
        } else {
            spec.value = unsigned_value(s, key);
        }
        return spec;
    }

    const std::string& name() const { return name_; }

private:
    long parse_integer(const std::string& s, const char* key, long min) const {
        long v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
            throw ConfigError("[" + name_ + "]: '" + key + "' is not an integer: '" + s + "'");
        }
        if (v < min) {
            throw ConfigError("[" + name_ + "]: '" + key + "' must be at least " + std::to_string(min));
        }
        return v;
    }

    std::string name_;
    const pt::ptree& tree_;
};

std::optional<int> parse_stride(const Section& s) {
    if (!s.has("stride")) {
        return std::nullopt;
    }
    if (s.text("stride") == "epoch") {
        return std::nullopt;
    }
    return static_cast<int>(s.integer("stride", 1));
}

void parse_experiment(const Section& s, ExperimentConfig& c) {
    s.allow({"name", "replicates", "seeds", "base_seed", "stride", "workers", "output_dir",
             "reference_factor"});
    c.name = s.text_or("name", "experiment");
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
        throw ConfigError("[experiment]: name must be non-empty and contain no path separators");
    }
    if (s.has("replicates") == s.has("seeds")) {
        throw ConfigError("[experiment]: give exactly one of 'replicates' (a count) or 'seeds' (a list)");
    }
    if (s.has("replicates")) {
        if (s.text("replicates").empty()) {
            throw ConfigError("[experiment]: empty replicate list");
        }
        const long count = s.integer("replicates", 0);
        if (count == 0) {
            throw ConfigError("[experiment]: empty replicate list");
        }
        const long base = s.integer_or("base_seed", 0, 0);
        for (long r = 0; r < count; ++r) {
            c.seeds.push_back(static_cast<std::uint64_t>(base + r));
        }
    } else {
        if (s.has("base_seed")) {
            throw ConfigError("[experiment]: 'base_seed' only applies with 'replicates'");
        }
        std::string list = s.text("seeds");
        std::replace(list.begin(), list.end(), ',', ' ');
        std::istringstream in(list);
        std::string tok;
        while (in >> tok) {
            c.seeds.push_back(s.unsigned_value(tok, "seeds"));
        }
        if (c.seeds.empty()) {
            throw ConfigError("[experiment]: empty replicate list");
        }
        std::set<std::uint64_t> uniq(c.seeds.begin(), c.seeds.end());
        if (uniq.size() != c.seeds.size()) {
            throw ConfigError("[experiment]: duplicate seed in 'seeds'");
        }
    }
    c.stride = parse_stride(s);
    c.workers = static_cast<int>(s.integer_or("workers", 0, 0));
    if (s.has("output_dir")) {
        c.output_dir = s.text("output_dir");
    }
    c.reference_factor = s.real_or("reference_factor", 10.0);
    if (c.reference_factor < 1.0) {
        throw ConfigError("[experiment]: reference_factor must be at least 1");
    }
}

void parse_problem(const Section& s, ProblemSpec& p) {
    p.builder = s.text("builder");
    const std::string& b = p.builder;
    if (b == "file") {
        s.allow({"builder", "path"});
        p.file = s.text("path");
        return;
    }
    if (b == "quad_quartic") {
        s.allow({"builder", "n", "seed", "a", "reference_quartic"});
        p.n = s.integer("n", 1);
        p.a = s.real_or("a", 0.1);
        p.reference_quartic = s.real_or("reference_quartic", 1.0);
    } else if (b == "poisson_kl" || b == "regularized_poisson") {
        if (b == "poisson_kl") {
            s.allow({"builder", "m", "n", "seed"});
        } else {
            s.allow({"builder", "m", "n", "seed", "mu_reg"});
            p.mu_reg = s.real("mu_reg");
        }
        p.m = s.integer("m", 1);
        p.n = s.integer("n", 1);
    } else if (b == "d_optimal_design") {
        s.allow({"builder", "m", "n", "seed"});
        p.m = s.integer("m", 1);
        p.n = s.integer("n", 2);
    } else if (b == "noisy_quadratic") {
        s.allow({"builder", "n", "seed", "noise_std"});
        p.n = s.integer("n", 1);
        p.noise_std = s.real_or("noise_std", 0.0);
    } else {
        throw ConfigError("[problem]: unknown problem builder '" + b + "'");
    }
    p.seed = s.seed("seed");
}

void parse_start(const Section& s, StartSpec& st) {
    st.kind = s.text("kind");
    if (st.kind == "normal" || st.kind == "abs_normal") {
        s.allow({"kind", "scale", "seed"});
        st.scale = s.real_or("scale", 1.0);
        st.seed = s.seed("seed");
    } else if (st.kind == "ones" || st.kind == "uniform") {
        s.allow({"kind"});
    } else {
        throw ConfigError("[start]: unknown start kind '" + st.kind + "'");
    }
}

Method parse_method(const Section& s) {
    const std::string m = s.text("method");
    if (m == "gradient_descent") return Method::GradientDescent;
    if (m == "relgd") return Method::RelGD;
    if (m == "relrcds") return Method::RelRCDS;
    if (m == "relrcd") return Method::RelRCD;
    if (m == "relsgd") return Method::RelSGD;
    throw ConfigError("[" + s.name() + "]: unknown method '" + m + "'");
}

AlgorithmSpec parse_algorithm(const Section& s, const std::string& label, std::uint64_t stream) {
    AlgorithmSpec a;
    a.label = label;
    a.rng_stream = stream;
    a.method = parse_method(s);
    switch (a.method) {
        case Method::GradientDescent:
        case Method::RelGD:
            s.allow({"method", "L", "L_scale", "epochs", "iterations", "stride"});
            break;
        case Method::RelRCDS:
            s.allow({"method", "L", "L_scale", "tau", "epochs", "iterations", "stride", "rng_stream"});
            break;
        case Method::RelRCD:
            s.allow({"method", "tau", "epochs", "iterations", "stride", "rng_stream"});
            break;
        case Method::RelSGD:
            s.allow({"method", "L", "L_scale", "tau", "schedule", "schedule_scale", "alpha", "epochs",
                     "iterations", "stride", "max_retries", "rng_stream"});
            break;
    }
    if (s.has("L")) {
        const std::string L = s.text("L");
        if (L == "certificate") {
            a.L_source = LSource::Certificate;
        } else if (L == "sublevel") {
            if (a.method != Method::GradientDescent) {
                throw ConfigError("[" + s.name() + "]: L = sublevel only applies to gradient_descent");
            }
            a.L_source = LSource::Sublevel;
        } else {
            a.L_source = LSource::Value;
            a.L_value = s.real("L");
            if (a.L_value <= 0.0) {
                throw ConfigError("[" + s.name() + "]: L must be positive");
            }
        }
    }
    a.L_scale = s.real_or("L_scale", 1.0);
    if (a.L_scale <= 0.0) {
        throw ConfigError("[" + s.name() + "]: L_scale must be positive");
    }
    a.tau = s.integer_or("tau", 1, 1);
    if (a.method == Method::RelSGD) {
        a.schedule = s.text_or("schedule", "constant");
        if (a.schedule != "constant" && a.schedule != "linear" && a.schedule != "sqrt_growth" &&
            a.schedule != "optimal") {
            throw ConfigError("[" + s.name() + "]: unknown schedule '" + a.schedule + "'");
        }
        a.schedule_scale = s.real_or("schedule_scale", 1.0);
        if (a.schedule_scale <= 0.0) {
            throw ConfigError("[" + s.name() + "]: schedule_scale must be positive");
        }
        if (s.has("alpha") && a.schedule != "linear") {
            throw ConfigError("[" + s.name() + "]: alpha only applies to the linear schedule");
        }
        a.alpha = s.real_or("alpha", 0.0);
        if (a.alpha < 0.0) {
            throw ConfigError("[" + s.name() + "]: alpha must be non-negative");
        }
        a.max_retries = static_cast<int>(s.integer_or("max_retries", 10, 0));
    }
    if (s.has("epochs") == s.has("iterations")) {
        throw ConfigError("[" + s.name() + "]: give exactly one of 'epochs' or 'iterations'");
    }
    if (s.has("epochs")) {
        a.epochs = s.integer("epochs", 1);
    } else {
        a.iterations = s.integer("iterations", 1);
    }
    a.stride = parse_stride(s);
    if (s.has("rng_stream")) {
        a.rng_stream = static_cast<std::uint64_t>(s.integer("rng_stream", 0));
    }
    return a;
}

void parse_check(const Section& s, CheckSpec& c) {
    s.allow({"n_pairs", "n_points", "seed", "l_scale"});
    c.n_pairs = static_cast<int>(s.integer_or("n_pairs", 1000, 1));
    c.n_points = static_cast<int>(s.integer_or("n_points", 5, 1));
    c.seed = static_cast<std::uint64_t>(s.integer_or("seed", 2024, 0));
    c.l_scale = s.real_or("l_scale", 1.0);
    if (c.l_scale <= 0.0) {
        throw ConfigError("[check]: l_scale must be positive");
    }
}

bool valid_label(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
    });
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::GradientDescent: return "gradient_descent";
        case Method::RelGD: return "relgd";
        case Method::RelRCDS: return "relrcds";
        case Method::RelRCD: return "relrcd";
        case Method::RelSGD: return "relsgd";
    }
    return "unknown";
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    ExperimentConfig c;
    c.text = text;
    c.origin = origin;
    bool have_experiment = false, have_problem = false, have_start = false;
    std::uint64_t stream = 1;
    for (const auto& [name, child] : tree) {
        if (child.empty()) {
            throw ConfigError(origin + ": key '" + name + "' outside any section");
        }
        const Section s(name, child);
        if (name == "experiment") {
            parse_experiment(s, c);
            have_experiment = true;
        } else if (name == "problem") {
            parse_problem(s, c.problem);
            have_problem = true;
        } else if (name == "start") {
            parse_start(s, c.start);
            have_start = true;
        } else if (name == "check") {
            parse_check(s, c.check);
        } else if (name.rfind("algorithm.", 0) == 0) {
            const std::string label = name.substr(10);
            if (!valid_label(label)) {
                throw ConfigError(origin + ": algorithm label '" + label +
                                  "' must use letters, digits, '_' or '-'");
            }
            c.algorithms.push_back(parse_algorithm(s, label, stream++));
        } else {
            throw ConfigError(origin + ": unknown section [" + name + "]");
        }
    }
    if (!have_experiment) {
        throw ConfigError(origin + ": missing [experiment] section");
    }
    if (!have_problem) {
        throw ConfigError(origin + ": missing [problem] section");
    }
    if (!have_start) {
        throw ConfigError(origin + ": missing [start] section");
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace relsmooth::harness
