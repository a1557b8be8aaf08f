#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stablab/harness.hpp"

namespace stablab::harness {

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

namespace {

// Object reader that remembers which keys were consumed so leftovers can be
// rejected.
class Fields {
public:
    Fields(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_, "expected an object");
        }
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_ + "." + key; }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const Json& required(const std::string& key) {
        if (!obj_.contains(key)) {
            throw ConfigError(at(key), "missing required field");
        }
        seen_.insert(key);
        return obj_.at(key);
    }

    const Json* optional(const std::string& key) {
        if (!obj_.contains(key)) {
            return nullptr;
        }
        seen_.insert(key);
        return &obj_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const Json* j = fallback ? optional(key) : &required(key);
        if (!j) {
            return *fallback;
        }
        if (!j->is_number()) {
            throw ConfigError(at(key), "expected a number");
        }
        return j->get<double>();
    }

    std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
        const Json* j = fallback ? optional(key) : &required(key);
        if (!j) {
            return *fallback;
        }
        if (!j->is_number_integer()) {
            throw ConfigError(at(key), "expected an integer");
        }
        return j->get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const Json* j = optional(key);
        if (!j) {
            return fallback;
        }
        if (!j->is_boolean()) {
            throw ConfigError(at(key), "expected a boolean");
        }
        return j->get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const Json* j = fallback ? optional(key) : &required(key);
        if (!j) {
            return *fallback;
        }
        if (!j->is_string()) {
            throw ConfigError(at(key), "expected a string");
        }
        return j->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const Json* j = optional(key);
        if (!j) {
            return fallback;
        }
        if (!j->is_array()) {
            throw ConfigError(at(key), "expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < j->size(); ++i) {
            if (!(*j)[i].is_number()) {
                throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
            }
            out.push_back((*j)[i].get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(at(key), "unknown field");
            }
        }
    }

private:
    const Json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

Direction parse_direction(const std::string& s, const std::string& path) {
    if (s == "forward") return Direction::Forward;
    if (s == "backward") return Direction::Backward;
    if (s == "auto") return Direction::Auto;
    throw ConfigError(path, "expected one of forward|backward|auto, got '" + s + "'");
}

Complex parse_scalar(const Json& j, const std::string& path) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(path, "expected a number or a [re, im] pair");
}

Element named_direction(const std::string& name, std::size_t dim, const std::string& path) {
    if (name == "identity") return Element::identity(dim);
    if (name == "corner") return Element::unit(dim, dim - 1, dim - 1);
    if (name == "nilpotent") {
        if (dim < 2) {
            throw ConfigError(path, "nilpotent direction needs dim >= 2");
        }
        return Element::unit(dim, 0, 1);
    }
    throw ConfigError(path, "unknown direction '" + name + "' (identity|corner|nilpotent)");
}

PerturbationSpec parse_perturbation(const Json& j, std::size_t dim, const std::string& path) {
    Fields f(j, path);
    PerturbationSpec p;
    const std::string mode = f.string("mode");
    if (mode == "power_norm") {
        p.mode = PerturbationMode::PowerNorm;
    } else if (mode == "constant") {
        p.mode = PerturbationMode::Constant;
    } else if (mode == "affine") {
        p.mode = PerturbationMode::Affine;
    } else {
        throw ConfigError(f.at("mode"), "expected power_norm|constant|affine");
    }
    p.theta = f.number("theta");
    if (!(p.theta >= 0.0)) {
        throw ConfigError(f.at("theta"), "must be >= 0");
    }
    p.p = f.number("p", p.mode == PerturbationMode::PowerNorm ? std::optional<double>{}
                                                              : std::optional<double>{0.0});
    const Json& dir = f.required("direction");
    if (dir.is_string()) {
        p.direction = named_direction(dir.get<std::string>(), dim, f.at("direction"));
    } else {
        p.direction = element_from_json(dir, f.at("direction"));
        if (p.direction.dim() != dim) {
            throw ConfigError(f.at("direction"), "matrix dimension " +
                                                     std::to_string(p.direction.dim()) +
                                                     " does not match dim " + std::to_string(dim));
        }
    }
    const std::string field = f.string("field", std::string("fixed"));
    if (field == "fixed") {
        p.field = DirectionField::Fixed;
    } else if (field == "trace_phase") {
        p.field = DirectionField::TracePhase;
    } else {
        throw ConfigError(f.at("field"), "expected fixed|trace_phase");
    }
    f.finish();
    return p;
}

BoundConfig parse_bound(const Json& j, const std::string& path) {
    Fields f(j, path);
    BoundConfig b;
    const std::string kind = f.string("kind");
    const double theta = f.number("theta", 0.0);
    if (!(theta >= 0.0)) {
        throw ConfigError(f.at("theta"), "must be >= 0");
    }
    if (kind == "power") {
        const double p1 = f.number("p1");
        const double p2 = f.number("p2", p1);
        const double p3 = f.number("p3", p1);
        b.spec = BoundSpec::power(theta, p1, p2, p3);
    } else if (kind == "psi") {
        const std::string profile = f.string("profile", std::string("power"));
        if (profile != "power") {
            throw ConfigError(f.at("profile"), "only the 'power' profile psi(t) = t^q is available");
        }
        b.spec = BoundSpec::psi_power(theta, f.number("q"));
    } else if (kind == "constant") {
        b.spec = BoundSpec::constant(theta);
    } else {
        throw ConfigError(f.at("kind"), "expected power|psi|constant");
    }
    b.calibrate = f.boolean("calibrate", true);
    f.finish();
    return b;
}

}  // namespace

Element element_from_json(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(path, "expected a non-empty array of rows");
    }
    const std::size_t n = j.size();
    std::vector<Complex> entries;
    entries.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row_path = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != n) {
            throw ConfigError(row_path, "expected a row of length " + std::to_string(n));
        }
        for (std::size_t k = 0; k < n; ++k) {
            entries.push_back(parse_scalar(j[i][k], row_path + "[" + std::to_string(k) + "]"));
        }
    }
    try {
        return Element(n, std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

Json element_to_json(const Element& e) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < e.dim(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < e.dim(); ++k) {
            row.push_back(Json::array({e(i, k).real(), e(i, k).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

MapSpec build_map(const Json& map, std::size_t dim, const std::string& path) {
    Fields f(map, path);
    const std::string kind = f.string("kind");
    MapSpec out = MapSpec::identity(dim);
    try {
        if (kind == "identity") {
            out = MapSpec::identity(dim);
        } else if (kind == "transpose") {
            out = MapSpec::transpose(dim);
        } else if (kind == "negation") {
            out = MapSpec::negation(dim);
        } else if (kind == "zero") {
            out = MapSpec::zero(dim);
        } else if (kind == "unitary_conjugation") {
            if (f.has("u")) {
                Element u = element_from_json(f.required("u"), f.at("u"));
                if (u.dim() != dim) {
                    throw ConfigError(f.at("u"), "matrix dimension does not match dim " +
                                                     std::to_string(dim));
                }
                out = MapSpec::unitary_conjugation(std::move(u));
            } else {
                const auto seed = f.integer("u_seed");
                out = MapSpec::unitary_conjugation(
                    random_unitary(static_cast<std::uint64_t>(seed), dim));
            }
        } else if (kind == "perturbed") {
            const MapSpec base = build_map(f.required("base"), dim, f.at("base"));
            PerturbationSpec p = parse_perturbation(f.required("perturbation"), dim,
                                                    f.at("perturbation"));
            out = MapSpec::perturbed(base, std::move(p));
        } else {
            throw ConfigError(f.at("kind"),
                              "expected identity|transpose|unitary_conjugation|negation|zero|"
                              "perturbed");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    f.finish();
    return out;
}

Json map_to_json(const MapSpec& f) {
    Json j;
    j["kind"] = to_string(f.kind());
    if (f.kind() == MapKind::UnitaryConjugation) {
        j["u"] = element_to_json(f.unitary());
    }
    if (f.kind() == MapKind::Perturbed) {
        const auto& p = *f.perturbation();
        j["base"] = map_to_json(f.base());
        j["perturbation"] = {{"mode", to_string(p.mode)},
                             {"theta", p.theta},
                             {"p", p.p},
                             {"direction", element_to_json(p.direction)},
                             {"field", to_string(p.field)}};
    }
    return j;
}

ExperimentConfig parse_config(const Json& doc) {
    ExperimentConfig cfg;
    cfg.source = doc;
    Fields top(doc, "$");

    const auto schema = top.integer("schema");
    if (schema != kSchemaVersion) {
        throw ConfigError(top.at("schema"), "unsupported schema version " + std::to_string(schema));
    }

    if (const Json* alg = top.optional("algebra")) {
        Fields f(*alg, top.at("algebra"));
        const auto dim = f.integer("dim", 3);
        if (dim < 1) {
            throw ConfigError(f.at("dim"), "must be >= 1");
        }
        cfg.algebra.dim = static_cast<std::size_t>(dim);
        cfg.algebra.norm_tol = f.number("norm_tol", kDefaultNormTol);
        if (!(cfg.algebra.norm_tol > 0.0 && cfg.algebra.norm_tol <= 1e-3)) {
            throw ConfigError(f.at("norm_tol"), "must lie in (0, 1e-3]");
        }
        f.finish();
    }

    if (const Json* m = top.optional("map")) {
        cfg.map = *m;
    } else {
        cfg.map = Json{{"kind", "identity"}};
    }

    if (const Json* b = top.optional("bound")) {
        cfg.bound = parse_bound(*b, top.at("bound"));
    }

    {
        Fields f(top.required("sampling"), top.at("sampling"));
        const Json& seed = f.required("seed");
        if (!seed.is_number_integer()) {
            throw ConfigError(f.at("seed"), "expected an integer");
        }
        cfg.sampling.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>()
                                                      : static_cast<std::uint64_t>(seed.get<std::int64_t>());
        cfg.sampling.samples = static_cast<int>(f.integer("samples", 200));
        if (cfg.sampling.samples < 1) {
            throw ConfigError(f.at("samples"), "must be >= 1");
        }
        cfg.sampling.norm_cap = f.number("norm_cap", 10.0);
        if (!(cfg.sampling.norm_cap >= 0.0)) {
            throw ConfigError(f.at("norm_cap"), "must be >= 0");
        }
        if (const Json* dims = f.optional("dims")) {
            if (!dims->is_array() || dims->empty()) {
                throw ConfigError(f.at("dims"), "expected a non-empty array of integers");
            }
            for (std::size_t i = 0; i < dims->size(); ++i) {
                const Json& d = (*dims)[i];
                if (!d.is_number_integer() || d.get<std::int64_t>() < 1) {
                    throw ConfigError(f.at("dims") + "[" + std::to_string(i) + "]",
                                      "expected an integer >= 1");
                }
                cfg.sampling.dims.push_back(static_cast<std::size_t>(d.get<std::int64_t>()));
            }
        } else {
            cfg.sampling.dims = {cfg.algebra.dim};
        }
        const std::string support = f.string("support", std::string("full"));
        if (support == "full") {
            cfg.sampling.support = SampleSupport::Full;
        } else if (support == "leading_block") {
            cfg.sampling.support = SampleSupport::LeadingBlock;
        } else {
            throw ConfigError(f.at("support"), "expected full|leading_block");
        }
        f.finish();
    }

    if (const Json* s = top.optional("stabilizer")) {
        Fields f(*s, top.at("stabilizer"));
        cfg.stabilizer.max_iter = static_cast<int>(f.integer("max_iter", 64));
        cfg.stabilizer.tol = f.number("tol", 1e-10);
        cfg.stabilizer.direction =
            parse_direction(f.string("direction", std::string("auto")), f.at("direction"));
        try {
            cfg.stabilizer.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(top.at("stabilizer"), e.what());
        }
        f.finish();
    }

    cfg.mu_grid_size = static_cast<std::size_t>(
        std::max<std::int64_t>(0, top.integer("mu_grid_size", MuGrid::kDefaultPhases)));

    if (const Json* c = top.optional("checks")) {
        Fields f(*c, top.at("checks"));
        cfg.checks.tol = f.number("tol", cfg.checks.tol);
        cfg.checks.mu_sweep = f.boolean("mu_sweep", false);
        cfg.checks.exactness_tol = f.number("exactness_tol", cfg.checks.exactness_tol);
        cfg.checks.exactness_samples =
            static_cast<int>(f.integer("exactness_samples", cfg.checks.exactness_samples));
        if (cfg.checks.exactness_samples < 1) {
            throw ConfigError(f.at("exactness_samples"), "must be >= 1");
        }
        f.finish();
    }

    if (const Json* s = top.optional("superstability")) {
        Fields f(*s, top.at("superstability"));
        cfg.superstability.n_max = static_cast<int>(f.integer("n_max", 64));
        cfg.superstability.fit_from = static_cast<int>(f.integer("fit_from", 4));
        if (f.has("p")) {
            cfg.superstability.p = f.number("p");
        }
        cfg.superstability.zero_tol = f.number("zero_tol", cfg.superstability.zero_tol);
        if (cfg.superstability.n_max < 2 ||
            cfg.superstability.fit_from >= cfg.superstability.n_max ||
            cfg.superstability.fit_from < 1) {
            throw ConfigError(top.at("superstability"), "need 1 <= fit_from < n_max, n_max >= 2");
        }
        f.finish();
    }

    if (const Json* t = top.optional("bounds_table")) {
        Fields f(*t, top.at("bounds_table"));
        auto& bt = cfg.bounds_table;
        bt.thetas = f.numbers("thetas", bt.thetas);
        bt.backward_ps = f.numbers("backward_ps", bt.backward_ps);
        bt.forward_ps = f.numbers("forward_ps", bt.forward_ps);
        bt.norms = f.numbers("norms", bt.norms);
        bt.psi_forward_qs = f.numbers("psi_forward_qs", bt.psi_forward_qs);
        bt.psi_backward_qs = f.numbers("psi_backward_qs", bt.psi_backward_qs);
        bt.terms = static_cast<int>(f.integer("terms", bt.terms));
        bt.rel_tol = f.number("rel_tol", bt.rel_tol);
        if (bt.terms < 2) {
            throw ConfigError(f.at("terms"), "must be >= 2");
        }
        f.finish();
    }

    if (const Json* o = top.optional("outputs")) {
        Fields f(*o, top.at("outputs"));
        const std::string fmt = f.string("format", std::string("json"));
        if (fmt == "json") {
            cfg.outputs.format = OutputFormat::Json;
        } else if (fmt == "csv") {
            cfg.outputs.format = OutputFormat::Csv;
        } else {
            throw ConfigError(f.at("format"), "expected json|csv");
        }
        if (f.has("path")) {
            cfg.outputs.path = f.string("path");
        }
        f.finish();
    }

    top.finish();

    // Instantiate once per dimension now so map errors surface as config errors.
    for (std::size_t d : cfg.sampling.dims) {
        (void)build_map(cfg.map, d, "$.map");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("$", "cannot open config file '" + path + "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

void override_seed(ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.sampling.seed = seed;
    cfg.source["sampling"]["seed"] = seed;
}

std::string ExperimentConfig::digest() const {
    const std::string canonical = source.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace stablab::harness
