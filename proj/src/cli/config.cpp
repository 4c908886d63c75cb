#include <algorithm>
#include <limits>
#include <set>

#include "json.hpp"
#include "rankone/cli.hpp"
#include "rankone/errors.hpp"

namespace rankone::cli {

using nlohmann::json;

namespace {

/// An object node that records which keys were read and rejects the rest.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ValidationError(where(), "must be an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    std::size_t size(const std::string& k, std::size_t fallback) {
        return has(k) ? to_size(raw(k), key(k)) : fallback;
    }

    std::optional<std::size_t> opt_size(const std::string& k) {
        if (!has(k)) return std::nullopt;
        return to_size(raw(k), key(k));
    }

    double real(const std::string& k, double fallback) {
        if (!has(k)) return fallback;
        const auto& v = raw(k);
        if (!v.is_number()) throw ValidationError(key(k), "must be a number");
        return v.get<double>();
    }

    bool boolean(const std::string& k, bool fallback) {
        if (!has(k)) return fallback;
        const auto& v = raw(k);
        if (!v.is_boolean()) throw ValidationError(key(k), "must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& k, const std::string& fallback) {
        if (!has(k)) return fallback;
        const auto& v = raw(k);
        if (!v.is_string()) throw ValidationError(key(k), "must be a string");
        return v.get<std::string>();
    }

    Section child(const std::string& k) { return Section(raw(k), key(k)); }

    void finish() const {
        for (const auto& [k, v] : node_.items())
            if (!seen_.count(k)) throw ValidationError(key(k), "unknown key");
    }

    static std::size_t to_size(const json& v, const std::string& where) {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ValidationError(where, "must be a nonnegative integer");
        return v.get<std::size_t>();
    }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::int64_t to_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ValidationError(where, "must be an integer");
    return v.get<std::int64_t>();
}

/// Integer literal or decimal string; negative values rejected.
BigInt to_big(const json& v, const std::string& where) {
    if (v.is_number_integer()) {
        if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw ValidationError(where, "must be >= 0");
        return BigInt(v.get<std::uint64_t>());
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw ValidationError(where, "must be a nonnegative decimal integer");
        return BigInt(s);
    }
    throw ValidationError(where, "must be an integer or decimal string");
}

/// A scalar or a per-stage list.
template <class T, class Convert>
StageSchedule<T> schedule(const json& v, const std::string& where, Convert convert) {
    StageSchedule<T> out;
    if (v.is_array()) {
        if (v.empty()) throw ValidationError(where, "schedule must be nonempty");
        for (std::size_t i = 0; i < v.size(); ++i)
            out.values.push_back(convert(v[i], where + "[" + std::to_string(i) + "]"));
    } else {
        out.values.push_back(convert(v, where));
    }
    return out;
}

std::size_t columns_value(const json& v, const std::string& where) {
    const auto p = Section::to_size(v, where);
    if (p < 1) throw ValidationError(where, "cutting number must be >= 1");
    return p;
}

SpacerDistribution distribution(const json& v, const std::string& where) {
    Section s(v, where);
    SpacerDistribution d;
    if (s.has("uniform")) {
        const auto& u = s.raw("uniform");
        if (!u.is_array() || u.size() != 2) throw ValidationError(s.key("uniform"), "must be [lo, hi]");
        d = SpacerDistribution::uniform(to_int(u[0], s.key("uniform[0]")), to_int(u[1], s.key("uniform[1]")));
    } else if (s.has("support")) {
        const auto& sup = s.raw("support");
        if (!sup.is_array()) throw ValidationError(s.key("support"), "must be a list");
        for (std::size_t i = 0; i < sup.size(); ++i)
            d.support.push_back(to_int(sup[i], s.key("support[" + std::to_string(i) + "]")));
        if (s.has("probs")) {
            const auto& pr = s.raw("probs");
            if (!pr.is_array()) throw ValidationError(s.key("probs"), "must be a list");
            for (std::size_t i = 0; i < pr.size(); ++i) {
                if (!pr[i].is_number()) throw ValidationError(s.key("probs[" + std::to_string(i) + "]"), "must be a number");
                d.probs.push_back(pr[i].get<double>());
            }
        } else {
            d.probs.assign(d.support.size(), d.support.empty() ? 0.0 : 1.0 / static_cast<double>(d.support.size()));
        }
    } else if (s.has("point")) {
        d = SpacerDistribution::point_mass(to_int(s.raw("point"), s.key("point")));
    } else {
        throw ValidationError(where, "needs one of uniform, support or point");
    }
    s.finish();
    return d;
}

FamilySpec parse_family(Section& root) {
    FamilySpec f;
    if (!root.has("family")) throw ValidationError("family", "missing");
    f.name = root.string("family", "");
    if (!root.has("depth")) throw ValidationError("depth", "missing");
    f.depth = root.size("depth", 1);
    if (f.depth < 1) throw ValidationError("depth", "must be >= 1");
    f.build.bit_cap = root.size("bit_cap", f.build.bit_cap);
    if (f.build.bit_cap < 8) throw ValidationError("bit_cap", "must be >= 8");

    if (!root.has("params")) throw ValidationError("params", "missing");
    Section params = root.child("params");
    if (f.name == "zero" || f.name == "staircase") {
        if (!params.has("p")) throw ValidationError("params.p", "missing");
        auto p = schedule<std::size_t>(params.raw("p"), "params.p", columns_value);
        if (f.name == "zero")
            f.rule = ZeroSpacersRule{std::move(p)};
        else
            f.rule = StaircaseRule{std::move(p)};
    } else if (f.name == "geometric") {
        GeometricRule g;
        g.scale = params.has("c") ? schedule<BigInt>(params.raw("c"), "params.c", to_big)
                                  : StageSchedule<BigInt>{{BigInt(1)}};
        for (std::size_t i = 0; i < g.scale.values.size(); ++i)
            if (g.scale.values[i] < 1) throw ValidationError("params.c", "scale must be >= 1");
        g.p_cap = params.size("p_cap", 0);
        g.p_floor = params.size("p_floor", 2);
        g.lift_columns = params.size("lift_columns", 2);
        if (g.lift_columns < 2) throw ValidationError("params.lift_columns", "must be >= 2");
        if (g.p_cap != 0 && g.p_cap < g.p_floor) throw ValidationError("params.p_cap", "must be >= p_floor");
        f.rule = std::move(g);
    } else if (f.name == "explicit") {
        if (!params.has("spacers")) throw ValidationError("params.spacers", "missing");
        const auto& list = params.raw("spacers");
        if (!list.is_array() || list.empty()) throw ValidationError("params.spacers", "must be a nonempty list of lists");
        ExplicitRule r;
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string key = "params.spacers[" + std::to_string(k) + "]";
            if (!list[k].is_array() || list[k].empty()) throw ValidationError(key, "must be a nonempty list");
            std::vector<BigInt> stage;
            for (std::size_t j = 0; j < list[k].size(); ++j)
                stage.push_back(to_big(list[k][j], key + "[" + std::to_string(j) + "]"));
            r.spacers.push_back(std::move(stage));
        }
        if (f.depth + 1 > r.spacers.size())
            throw ValidationError("depth", "explicit family lists " + std::to_string(r.spacers.size()) +
                                               " stages; depth + 1 must not exceed that");
        f.rule = std::move(r);
    } else if (f.name == "ornstein") {
        EnsembleConfig e;
        auto need = [&](const std::string& k) {
            if (!params.has(k)) throw ValidationError("params." + k, "missing");
            return params.raw(k);
        };
        e.columns = schedule<std::size_t>(need("p"), "params.p", columns_value);
        e.base_spacer = schedule<std::int64_t>(need("t"), "params.t", to_int);
        e.top = params.has("top") ? schedule<std::int64_t>(params.raw("top"), "params.top", to_int)
                                  : StageSchedule<std::int64_t>{{0}};
        e.xi = schedule<SpacerDistribution>(need("xi"), "params.xi", distribution);
        const auto variant = params.string("variant", "standard");
        if (variant == "mixing")
            f.variant = OrnsteinVariant::mixing;
        else if (variant != "standard")
            throw ValidationError("params.variant", "must be standard or mixing");
        e.validate();
        f.ensemble = std::move(e);
    } else {
        throw ValidationError("family", "unknown family '" + f.name +
                                            "' (expected zero, staircase, geometric, explicit or ornstein)");
    }
    params.finish();
    return f;
}

std::vector<std::size_t> size_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where, "must be a list");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Section::to_size(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::string syntax_location(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("<syntax>", syntax_location(text, e.byte) + ": " + e.what());
    }
    Section root(doc, "");
    RunConfig c;
    c.family = parse_family(root);
    c.seed = root.has("seed") ? static_cast<std::uint64_t>(to_big(root.raw("seed"), "seed")) : 0;
    if (c.family.ensemble) c.family.ensemble->seed = c.seed;

    if (root.has("grid")) {
        auto g = root.child("grid");
        const std::size_t cap = g.size("log2_cap", c.grid.log2_cap);
        if (cap < 1 || cap > 30) throw ValidationError("grid.log2_cap", "must lie in [1, 30]");
        c.grid.log2_cap = static_cast<unsigned>(cap);
        c.grid.tolerance = g.real("tolerance", c.grid.tolerance);
        if (!(c.grid.tolerance > 0.0)) throw ValidationError("grid.tolerance", "must be positive");
        g.finish();
    }
    if (root.has("riesz")) {
        auto s = root.child("riesz");
        if (s.has("mass_n")) c.riesz.mass_n = size_list(s.raw("mass_n"), "riesz.mass_n");
        if (s.has("selection")) c.riesz.selection = size_list(s.raw("selection"), "riesz.selection");
        c.riesz.stage = s.opt_size("stage");
        if (s.has("weak_frequency")) c.riesz.weak_frequency = to_int(s.raw("weak_frequency"), "riesz.weak_frequency");
        s.finish();
    }
    if (root.has("bourgain")) {
        auto s = root.child("bourgain");
        c.bourgain.budget = s.size("budget", c.bourgain.budget);
        c.bourgain.first = s.size("first", c.bourgain.first);
        c.bourgain.last = s.opt_size("last");
        if (c.bourgain.budget < 1) throw ValidationError("bourgain.budget", "must be >= 1");
        if (c.bourgain.first < 1) throw ValidationError("bourgain.first", "must be >= 1");
        s.finish();
    }
    if (root.has("clt")) {
        auto s = root.child("clt");
        c.clt.stage = s.opt_size("stage");
        c.clt.log2_grid = s.size("log2_grid", c.clt.log2_grid);
        c.clt.tail_x = s.real("tail_x", c.clt.tail_x);
        c.clt.dispersion = s.boolean("dispersion", c.clt.dispersion);
        if (s.has("arcs")) {
            const auto& arcs = s.raw("arcs");
            if (!arcs.is_array()) throw ValidationError("clt.arcs", "must be a list of [begin, end] pairs");
            c.clt.arcs.clear();
            for (std::size_t i = 0; i < arcs.size(); ++i) {
                const std::string key = "clt.arcs[" + std::to_string(i) + "]";
                if (!arcs[i].is_array() || arcs[i].size() != 2 || !arcs[i][0].is_number() || !arcs[i][1].is_number())
                    throw ValidationError(key, "must be [begin, end] in turns");
                c.clt.arcs.push_back({arcs[i][0].get<double>(), arcs[i][1].get<double>()});
            }
            BorelSet check(c.clt.arcs);
            (void)check;
        }
        if (c.clt.log2_grid < 1 || c.clt.log2_grid > 30) throw ValidationError("clt.log2_grid", "must lie in [1, 30]");
        if (!(c.clt.tail_x > 1.0)) throw ValidationError("clt.tail_x", "must exceed 1");
        s.finish();
    }
    if (root.has("theta")) {
        auto s = root.child("theta");
        c.theta.stage = s.opt_size("stage");
        if (s.has("x")) {
            const auto& xs = s.raw("x");
            if (!xs.is_array() || xs.empty()) throw ValidationError("theta.x", "must be a nonempty list of numbers");
            c.theta.x.clear();
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (!xs[i].is_number()) throw ValidationError("theta.x[" + std::to_string(i) + "]", "must be a number");
                c.theta.x.push_back(xs[i].get<double>());
            }
        }
        s.finish();
    }
    if (root.has("words")) {
        auto s = root.child("words");
        c.words.stage = s.opt_size("stage");
        c.words.csv = s.boolean("csv", c.words.csv);
        s.finish();
    }
    if (root.has("ornstein")) {
        auto s = root.child("ornstein");
        c.ornstein.stage = s.size("stage", c.ornstein.stage);
        c.ornstein.samples = s.size("samples", c.ornstein.samples);
        c.ornstein.omega_samples = s.size("omega_samples", c.ornstein.omega_samples);
        c.ornstein.t0 = s.real("t0", c.ornstein.t0);
        c.ornstein.tolerance = s.real("tolerance", c.ornstein.tolerance);
        c.ornstein.histogram_bins = s.size("histogram_bins", c.ornstein.histogram_bins);
        if (!(c.ornstein.tolerance > 0.0)) throw ValidationError("ornstein.tolerance", "must be positive");
        if (c.ornstein.histogram_bins < 1) throw ValidationError("ornstein.histogram_bins", "must be >= 1");
        s.finish();
    }
    root.finish();
    return c;
}

void apply_overrides(RunConfig& config, const Overrides& o) {
    if (o.seed) {
        config.seed = *o.seed;
        if (config.family.ensemble) config.family.ensemble->seed = *o.seed;
    }
    if (o.grid_cap) {
        if (*o.grid_cap < 1 || *o.grid_cap > 30) throw ValidationError("--grid-cap", "must lie in [1, 30]");
        config.grid.log2_cap = static_cast<unsigned>(*o.grid_cap);
    }
    if (o.depth) {
        if (*o.depth < 1) throw ValidationError("--depth", "must be >= 1");
        config.family.depth = *o.depth;
    }
    if (o.samples) config.ornstein.samples = *o.samples;
    if (o.stage) config.ornstein.stage = *o.stage;
    if (o.threads && *o.threads < 1) throw ValidationError("--threads", "must be >= 1");
}

}  // namespace rankone::cli
