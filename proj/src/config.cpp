#include "skewgraph/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace skewgraph {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& v, int line) {
    std::vector<double> out;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(line, 0, "not a number: '" + tok + "'");
        }
    }
    return out;
}

double parse_double(const std::string& v, int line) {
    auto xs = parse_doubles(v, line);
    if (xs.size() != 1) throw ConfigError(line, 0, "expected a single number");
    return xs[0];
}

int parse_int(const std::string& v, int line) {
    double d = parse_double(v, line);
    auto i = static_cast<long long>(d);
    if (static_cast<double>(i) != d) throw ConfigError(line, 0, "expected an integer");
    return static_cast<int>(i);
}

struct Sink {
    RunConfig* cfg;
    bool bands_reset = false;

    void set(const std::string& section, const std::string& key, const std::string& val,
             int line) {
        RunConfig& c = *cfg;
        if (section == "system") {
            if (key == "base") {
                if (val != "circle" && val != "baker" && val != "solenoid")
                    throw ConfigError(line, 0, "base must be circle, baker or solenoid");
                c.base = val;
            } else if (key == "band") {
                auto xs = parse_doubles(val, line);
                if (xs.size() != 5)
                    throw ConfigError(line, 0, "band needs: lo hi p0 p1 c");
                if (!bands_reset) { c.bands.clear(); bands_reset = true; }
                c.bands.push_back({xs[0], xs[1], xs[2], xs[3], xs[4]});
            } else if (key == "arc0" || key == "arc1") {
                auto xs = parse_doubles(val, line);
                if (xs.size() != 2) throw ConfigError(line, 0, key + " needs: lo hi");
                (key == "arc0" ? c.arc0 : c.arc1) = {xs[0], xs[1]};
            } else if (key == "delta") c.delta = parse_double(val, line);
            else if (key == "eta") c.eta = parse_double(val, line);
            else if (key == "etas") c.etas = parse_doubles(val, line);
            else if (key == "w") c.w = parse_double(val, line);
            else throw ConfigError(line, 0, "unknown key system." + key);
        } else if (section == "budgets") {
            if (key == "depth") c.depth = parse_int(val, line);
            else if (key == "count") c.count = parse_int(val, line);
            else if (key == "n") c.n = parse_int(val, line);
            else if (key == "burn_in") c.burn_in = parse_int(val, line);
            else if (key == "bins_t") c.bins_t = parse_int(val, line);
            else if (key == "bins_x") c.bins_x = parse_int(val, line);
            else if (key == "resolution") c.resolution = parse_int(val, line);
            else if (key == "epsilons") c.epsilons = parse_doubles(val, line);
            else if (key == "n_max") c.n_max = parse_int(val, line);
            else if (key == "baker_n_max") c.baker_n_max = parse_int(val, line);
            else if (key == "kingman_m_max") c.kingman_m_max = parse_int(val, line);
            else if (key == "kingman_samples") c.kingman_samples = parse_int(val, line);
            else if (key == "srb_points") c.srb_points = parse_int(val, line);
            else if (key == "bone_tol") c.bone_tol = parse_double(val, line);
            else if (key == "max_period") c.max_period = parse_int(val, line);
            else throw ConfigError(line, 0, "unknown key budgets." + key);
        } else if (section == "run") {
            if (key == "seed") {
                double d = parse_double(val, line);
                if (d < 0) throw ConfigError(line, 0, "seed must be nonnegative");
                c.seed = static_cast<std::uint64_t>(d);
                c.seed_set = true;
            } else if (key == "out") c.out = val;
            else if (key == "threads") c.threads = parse_int(val, line);
            else throw ConfigError(line, 0, "unknown key run." + key);
        } else if (section == "sweep") {
            if (key == "etas") c.sweep_etas = parse_doubles(val, line);
            else if (key == "command") c.sweep_command = val;
            else throw ConfigError(line, 0, "unknown key sweep." + key);
        } else {
            throw ConfigError(line, 0, "unknown section [" + section + "]");
        }
    }
};

} // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig cfg;
    Sink sink{&cfg};
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(line, static_cast<int>(s.size()), "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, static_cast<int>(raw.find(s)) + 1, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (section.empty()) throw ConfigError(line, 1, "key outside any [section]");
        if (key.empty()) throw ConfigError(line, 1, "empty key");
        sink.set(section, key, val, line);
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, 0, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "[system]\n";
    os << "base = " << base << "\n";
    for (const auto& b : bands)
        os << "band = " << fmt_g17(b.lo) << " " << fmt_g17(b.hi) << " " << fmt_g17(b.p0) << " "
           << fmt_g17(b.p1) << " " << fmt_g17(b.c) << "\n";
    os << "arc0 = " << fmt_g17(arc0.lo) << " " << fmt_g17(arc0.hi) << "\n";
    os << "arc1 = " << fmt_g17(arc1.lo) << " " << fmt_g17(arc1.hi) << "\n";
    os << "delta = " << fmt_g17(delta) << "\n";
    os << "eta = " << fmt_g17(eta) << "\n";
    if (!etas.empty()) {
        os << "etas =";
        for (double e : etas) os << " " << fmt_g17(e);
        os << "\n";
    }
    os << "w = " << fmt_g17(w) << "\n";
    os << "\n[budgets]\n";
    os << "depth = " << depth << "\n";
    os << "count = " << count << "\n";
    os << "n = " << n << "\n";
    os << "burn_in = " << burn_in << "\n";
    os << "bins_t = " << bins_t << "\n";
    os << "bins_x = " << bins_x << "\n";
    os << "resolution = " << resolution << "\n";
    os << "epsilons =";
    for (double e : epsilons) os << " " << fmt_g17(e);
    os << "\n";
    os << "n_max = " << n_max << "\n";
    os << "baker_n_max = " << baker_n_max << "\n";
    os << "kingman_m_max = " << kingman_m_max << "\n";
    os << "kingman_samples = " << kingman_samples << "\n";
    os << "srb_points = " << srb_points << "\n";
    os << "bone_tol = " << fmt_g17(bone_tol) << "\n";
    os << "max_period = " << max_period << "\n";
    os << "\n[run]\n";
    os << "seed = " << seed << "\n";
    os << "out = " << out << "\n";
    os << "threads = " << threads << "\n";
    os << "\n[sweep]\n";
    os << "etas =";
    for (double e : sweep_etas) os << " " << fmt_g17(e);
    os << "\n";
    os << "command = " << sweep_command << "\n";
    return os.str();
}

std::string RunConfig::hash() const {
    // identifies the mathematical run: worker count and output location do not
    // change any computed value, so they stay out of the hash
    std::istringstream lines(serialize());
    std::string text, line;
    while (std::getline(lines, line))
        if (line.rfind("threads = ", 0) != 0 && line.rfind("out = ", 0) != 0)
            text += line + "\n";
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunConfig::apply_override(const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(0, 0, "override needs section.key=value");
    std::string path = trim(assignment.substr(0, eq));
    std::string val = trim(assignment.substr(eq + 1));
    std::size_t dot = path.find('.');
    if (dot == std::string::npos) throw ConfigError(0, 0, "override needs section.key=value");
    Sink sink{this};
    sink.set(path.substr(0, dot), path.substr(dot + 1), val, 0);
}

void RunConfig::validate() const {
    if (!seed_set) throw ConfigError(0, 0, "run.seed is mandatory");
    auto positive = [](long long v, const char* name) {
        if (v <= 0) throw ConfigError(0, 0, std::string(name) + " must be positive");
    };
    positive(depth, "budgets.depth");
    positive(count, "budgets.count");
    positive(n, "budgets.n");
    positive(burn_in, "budgets.burn_in");
    positive(bins_t, "budgets.bins_t");
    positive(bins_x, "budgets.bins_x");
    positive(resolution, "budgets.resolution");
    positive(n_max, "budgets.n_max");
    positive(baker_n_max, "budgets.baker_n_max");
    positive(kingman_m_max, "budgets.kingman_m_max");
    positive(kingman_samples, "budgets.kingman_samples");
    positive(srb_points, "budgets.srb_points");
    positive(max_period, "budgets.max_period");
    positive(threads, "run.threads");
    if (bone_tol <= 0) throw ConfigError(0, 0, "budgets.bone_tol must be positive");
    if (epsilons.empty()) throw ConfigError(0, 0, "budgets.epsilons must not be empty");
    for (double e : epsilons)
        if (e <= 0 || e >= 1) throw ConfigError(0, 0, "epsilons must lie in (0,1)");
    if (bands.empty()) throw ConfigError(0, 0, "at least one system.band required");
    if (eta < 0) throw ConfigError(0, 0, "system.eta must be nonnegative");
    for (double e : etas)
        if (e < 0) throw ConfigError(0, 0, "system.etas must be nonnegative");
    if (!etas.empty() && etas.size() != bands.size())
        throw ConfigError(0, 0, "system.etas must list one value per band");
}

BaseKind RunConfig::base_kind() const {
    if (base == "circle") return BaseKind::Circle;
    if (base == "solenoid") return BaseKind::Solenoid;
    return BaseKind::Baker;
}

SkewSystem RunConfig::build_system() const {
    std::vector<double> per_band(bands.size(), 0.0);
    if (!per_band.empty()) per_band[0] = eta;
    for (std::size_t i = 0; i < etas.size() && i < per_band.size(); ++i) per_band[i] = etas[i];
    BumpProfile profile{arc0, arc1, delta};
    return SkewSystem(base_kind(), bands, profile, per_band, w);
}

} // namespace skewgraph
