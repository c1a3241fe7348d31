#include "anideg/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace anideg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::set<std::string>& known_sections() {
    static const std::set<std::string> s{"grid", "anisotropy", "material", "initial", "solver", "output"};
    return s;
}

bool key_known(const std::string& section, const std::string& key) {
    static const std::map<std::string, std::set<std::string>> keys{
        {"grid", {"dim", "n", "a", "b"}},
        {"anisotropy", {"family", "matrix", "matrix_count"}},
        {"material", {"potential", "theta", "theta_c", "m", "delta"}},
        {"initial", {"kind", "value", "mean", "amplitude", "seed", "centers", "width", "path"}},
        {"solver",
         {"scheme", "dt_init", "dt_min", "dt_max", "kappa", "t_final", "energy_tol_per_step",
          "safeguard", "snapshot_stride", "diagnostics_stride"}},
        {"output", {"directory"}},
    };
    const auto it = keys.find(section);
    if (it == keys.end()) return false;
    if (it->second.count(key)) return true;
    // ellipsoid_sum matrices: matrix_1, matrix_2, ...
    if (section == "anisotropy" && key.rfind("matrix_", 0) == 0) {
        const std::string idx = key.substr(7);
        if (idx.empty() || idx == "count") return key == "matrix_count";
        for (char c : idx)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return idx[0] != '0';
    }
    return false;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    std::ostringstream os;
    os << "line " << line << ": " << what;
    throw ParseError(os.str());
}

[[noreturn]] void validate_fail(const std::string& key, const std::string& what) {
    throw ValidationError(key + ": " + what);
}

double to_double(const std::string& key, const Entry& e) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        parse_fail(e.line, "key '" + key + "' expects a real number, got '" + e.value + "'");
    }
}

long to_long(const std::string& key, const Entry& e) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        parse_fail(e.line, "key '" + key + "' expects an integer, got '" + e.value + "'");
    }
}

std::vector<double> to_double_list(const std::string& key, const Entry& e) {
    std::string cleaned = e.value;
    for (char& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream is(cleaned);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (!is.eof() || out.empty())
        parse_fail(e.line, "key '" + key + "' expects a list of reals, got '" + e.value + "'");
    return out;
}

std::vector<int> to_int_list(const std::string& key, const Entry& e) {
    const auto doubles = to_double_list(key, e);
    std::vector<int> out;
    for (double v : doubles) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) parse_fail(e.line, "key '" + key + "' expects integers");
        out.push_back(i);
    }
    return out;
}

class SectionView {
public:
    SectionView(const std::map<std::string, Section>& sections, std::string name)
        : name_(std::move(name)) {
        const auto it = sections.find(name_);
        if (it != sections.end()) section_ = &it->second;
    }

    const Entry* find(const std::string& key) const {
        if (!section_) return nullptr;
        const auto it = section_->find(key);
        return it == section_->end() ? nullptr : &it->second;
    }

    bool has(const std::string& key) const { return find(key) != nullptr; }

    double number(const std::string& key, double def) const {
        const Entry* e = find(key);
        return e ? to_double(key, *e) : def;
    }
    long integer(const std::string& key, long def) const {
        const Entry* e = find(key);
        return e ? to_long(key, *e) : def;
    }
    std::string text(const std::string& key, const std::string& def) const {
        const Entry* e = find(key);
        return e ? e->value : def;
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> def) const {
        const Entry* e = find(key);
        return e ? to_double_list(key, *e) : std::move(def);
    }
    std::vector<int> integers(const std::string& key, std::vector<int> def) const {
        const Entry* e = find(key);
        return e ? to_int_list(key, *e) : std::move(def);
    }

    const std::string& name() const { return name_; }

private:
    std::string name_;
    const Section* section_ = nullptr;
};

template <typename T>
std::vector<T> broadcast(std::vector<T> v, int dim, const std::string& key) {
    if (v.size() == 1 && dim > 1) v.assign(static_cast<std::size_t>(dim), v[0]);
    if (v.size() != static_cast<std::size_t>(dim))
        validate_fail(key, "expects 1 or dim entries");
    return v;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    std::map<std::string, Section> sections;
    std::string current;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(line_no, "malformed section header '" + line + "'");
            current = trim(line.substr(1, line.size() - 2));
            if (!known_sections().count(current))
                parse_fail(line_no, "unknown section '" + current + "'");
            sections[current];  // materialize (possibly empty) section
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) parse_fail(line_no, "expected 'key = value', got '" + line + "'");
        if (current.empty()) parse_fail(line_no, "key outside of any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key_known(current, key))
            parse_fail(line_no, "unknown key '" + key + "' in section [" + current + "]");
        auto [it, inserted] = sections[current].emplace(key, Entry{value, line_no});
        if (!inserted) {
            std::ostringstream os;
            os << "duplicate key '" << key << "' in section [" << current << "] (lines "
               << it->second.line << " and " << line_no << ")";
            throw ParseError(os.str());
        }
    }

    RunConfig cfg;

    const SectionView grid(sections, "grid");
    cfg.grid.dim = static_cast<int>(grid.integer("dim", 1));
    if (cfg.grid.dim < 1 || cfg.grid.dim > 3) validate_fail("grid.dim", "must be 1, 2 or 3");
    cfg.grid.n = broadcast(grid.integers("n", {128}), cfg.grid.dim, "grid.n");
    cfg.grid.a = broadcast(grid.numbers("a", {0.0}), cfg.grid.dim, "grid.a");
    cfg.grid.b = broadcast(grid.numbers("b", {1.0}), cfg.grid.dim, "grid.b");
    for (int i = 0; i < cfg.grid.dim; ++i) {
        const int n = cfg.grid.n[i];
        if (n < 8 || (n & (n - 1)) != 0) validate_fail("grid.n", "must be a power of two >= 8");
        if (!(cfg.grid.a[i] < cfg.grid.b[i])) validate_fail("grid.a/grid.b", "requires a < b per axis");
    }

    const SectionView aniso(sections, "anisotropy");
    const std::string family = aniso.text("family", "isotropic");
    const std::size_t dd = static_cast<std::size_t>(cfg.grid.dim) * cfg.grid.dim;
    if (family == "isotropic") {
        cfg.anisotropy.family = AnisotropyFamily::Isotropic;
        if (aniso.has("matrix") || aniso.has("matrix_count"))
            validate_fail("anisotropy.matrix", "not applicable to family isotropic");
    } else if (family == "quadratic") {
        cfg.anisotropy.family = AnisotropyFamily::Quadratic;
        if (!aniso.has("matrix")) validate_fail("anisotropy.matrix", "required for family quadratic");
        cfg.anisotropy.matrix = aniso.numbers("matrix", {});
        if (cfg.anisotropy.matrix.size() != dd)
            validate_fail("anisotropy.matrix", "needs dim*dim row-major entries");
    } else if (family == "ellipsoid_sum") {
        cfg.anisotropy.family = AnisotropyFamily::EllipsoidSum;
        const long count = aniso.integer("matrix_count", 0);
        if (count < 1 || count > 16) validate_fail("anisotropy.matrix_count", "must lie in [1,16]");
        for (long l = 1; l <= count; ++l) {
            const std::string key = "matrix_" + std::to_string(l);
            if (!aniso.has(key)) validate_fail("anisotropy." + key, "missing (matrix_count says it exists)");
            auto m = aniso.numbers(key, {});
            if (m.size() != dd) validate_fail("anisotropy." + key, "needs dim*dim row-major entries");
            cfg.anisotropy.matrices.push_back(std::move(m));
        }
    } else {
        validate_fail("anisotropy.family", "must be isotropic, quadratic or ellipsoid_sum");
    }

    const SectionView material(sections, "material");
    cfg.material.potential = material.text("potential", "log_quench");
    if (cfg.material.potential != "log_quench" && cfg.material.potential != "double_well")
        validate_fail("material.potential", "must be log_quench or double_well (custom is library-only)");
    cfg.material.theta = material.number("theta", 1.0);
    cfg.material.theta_c = material.number("theta_c", 2.0);
    cfg.material.m = material.number("m", 1.0);
    cfg.material.delta = material.number("delta", 0.1);
    if (!(cfg.material.delta > 0.0 && cfg.material.delta < 1.0))
        validate_fail("delta", "must lie in the open interval (0,1)");
    if (!(cfg.material.m >= 1.0)) validate_fail("material.m", "must be >= 1");
    if (cfg.material.potential == "log_quench") {
        if (!(cfg.material.theta > 0.0)) validate_fail("material.theta", "must be > 0");
        if (!(cfg.material.theta_c > 0.0)) validate_fail("material.theta_c", "must be > 0");
        if (cfg.material.m != 1.0) validate_fail("material.m", "log_quench fixes m = 1");
    }

    const SectionView initial(sections, "initial");
    const std::string kind = initial.text("kind", "constant");
    auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (initial.has(k))
                validate_fail(std::string("initial.") + k, "not applicable to kind " + kind);
    };
    if (kind == "constant") {
        cfg.initial.kind = InitialKind::Constant;
        forbid({"mean", "amplitude", "seed", "centers", "width", "path"});
        cfg.initial.value = initial.number("value", 0.0);
        if (std::abs(cfg.initial.value) > 1.0) validate_fail("initial.value", "must satisfy |value| <= 1");
    } else if (kind == "seeded_noise") {
        cfg.initial.kind = InitialKind::SeededNoise;
        forbid({"value", "centers", "width", "path"});
        cfg.initial.mean = initial.number("mean", 0.0);
        cfg.initial.amplitude = initial.number("amplitude", 0.1);
        cfg.initial.seed = static_cast<std::uint64_t>(initial.integer("seed", 1234));
        if (!(cfg.initial.amplitude >= 0.0)) validate_fail("initial.amplitude", "must be >= 0");
        if (std::abs(cfg.initial.mean) + cfg.initial.amplitude > 1.0)
            validate_fail("initial.mean/amplitude", "|mean| + amplitude must be <= 1");
    } else if (kind == "tanh_profile") {
        cfg.initial.kind = InitialKind::TanhProfile;
        forbid({"value", "mean", "amplitude", "seed", "path"});
        cfg.initial.centers = initial.numbers("centers", {});
        cfg.initial.width = initial.number("width", 0.1);
        if (cfg.initial.centers.empty() || cfg.initial.centers.size() % 2 != 0)
            validate_fail("initial.centers", "needs a nonempty even count of axis-0 positions");
        for (std::size_t i = 1; i < cfg.initial.centers.size(); ++i)
            if (!(cfg.initial.centers[i] > cfg.initial.centers[i - 1]))
                validate_fail("initial.centers", "must be strictly increasing");
        if (!(cfg.initial.width > 0.0)) validate_fail("initial.width", "must be > 0");
    } else if (kind == "from_snapshot") {
        cfg.initial.kind = InitialKind::FromSnapshot;
        forbid({"value", "mean", "amplitude", "seed", "centers", "width"});
        cfg.initial.path = initial.text("path", "");
        if (cfg.initial.path.empty()) validate_fail("initial.path", "required for kind from_snapshot");
    } else {
        validate_fail("initial.kind", "must be constant, seeded_noise, tanh_profile or from_snapshot");
    }

    const SectionView solver(sections, "solver");
    const std::string scheme = solver.text("scheme", "imex");
    if (scheme == "imex") cfg.solver.scheme = Scheme::StabilizedIMEX;
    else if (scheme == "explicit") cfg.solver.scheme = Scheme::Explicit;
    else validate_fail("solver.scheme", "must be explicit or imex");
    cfg.solver.dt_init = solver.number("dt_init", 1e-6);
    cfg.solver.dt_min = solver.number("dt_min", 1e-9);
    cfg.solver.dt_max = solver.number("dt_max", 1e-4);
    cfg.solver.t_final = solver.number("t_final", 0.01);
    cfg.solver.energy_tol_per_step = solver.number("energy_tol_per_step", 0.0);
    const std::string guard = solver.text("safeguard", "reject_and_halve");
    if (guard == "reject_and_halve") cfg.solver.safeguard = Safeguard::RejectAndHalve;
    else if (guard == "warn_only") cfg.solver.safeguard = Safeguard::WarnOnly;
    else validate_fail("solver.safeguard", "must be reject_and_halve or warn_only");
    cfg.solver.snapshot_stride = solver.integer("snapshot_stride", 100);
    cfg.solver.diagnostics_stride = solver.integer("diagnostics_stride", 10);
    if (solver.has("kappa")) {
        const std::string kappa = solver.text("kappa", "auto");
        if (kappa == "auto") {
            cfg.kappa_auto = true;
        } else {
            cfg.kappa_auto = false;
            cfg.solver.kappa = to_double("kappa", *solver.find("kappa"));
            if (!(cfg.solver.kappa >= 0.0)) validate_fail("solver.kappa", "must be >= 0 or auto");
        }
    }
    try {
        cfg.solver.validate();
    } catch (const ValidationError& e) {
        validate_fail("solver", e.what());
    }

    const SectionView output(sections, "output");
    cfg.output.directory = output.text("directory", "out");
    if (cfg.output.directory.empty()) validate_fail("output.directory", "must not be empty");

    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

} // namespace anideg
