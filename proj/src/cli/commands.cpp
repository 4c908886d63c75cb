#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>

#include "json.hpp"
#include "rankone/cli.hpp"
#include "rankone/errors.hpp"
#include "rankone/format.hpp"
#include "rankone/normal.hpp"
#include "rankone/parallel.hpp"
#include "rankone/riesz.hpp"
#include "rankone/simd/kernels.hpp"
#include "rankone/words.hpp"

namespace rankone::cli {

using Json = nlohmann::ordered_json;

namespace {

/// Rows of a CSV file: header first, numbers already formatted.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

    Csv& row(std::vector<std::string> cells) {
        rows_.push_back(std::move(cells));
        return *this;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << '\n';
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string num(double v) { return fmt17(v); }
std::string num(std::size_t v) { return std::to_string(v); }

void write_json(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Context {
    const RunConfig& config;
    std::filesystem::path out;
    std::ostream& log;
    std::vector<std::string> failures;

    void fail(const std::string& invariant, const std::string& detail) {
        failures.push_back(invariant);
        log << "invariant failed: " << invariant << ": " << detail << '\n';
    }
};

TowerSequence build_family(const RunConfig& c) {
    const auto& f = c.family;
    if (f.rule) return build_tower(*f.rule, f.depth, f.build);
    return sample_tower(*f.ensemble, f.depth, 0, f.variant, f.build).tower;
}

std::size_t pick_stage(const std::optional<std::size_t>& stage, const TowerSequence& tower, const std::string& key) {
    const std::size_t m = stage.value_or(tower.depth());
    if (m > tower.depth())
        throw ValidationError(key, "stage " + std::to_string(m) + " exceeds depth " + std::to_string(tower.depth()));
    return m;
}

Json selection_json(const FactorSelection& s) { return Json(s.indices()); }

// ---------------------------------------------------------------------------

Json cmd_describe(Context& ctx) {
    const auto tower = build_family(ctx.config);
    const auto conditions = condition_report(tower);
    Json stages = Json::array();
    Csv csv({"k", "p", "height_bits", "thm21_i", "thm21_ii", "thm36_ii", "restricted_growth_ratio",
             "inv_p_sq_partial", "finiteness_partial"});
    bool all21 = true;
    for (std::size_t k = 0; k < tower.stages.size(); ++k) {
        const auto& st = tower.stages[k];
        const auto& c = conditions[k];
        const auto s = partial_sums(st);
        Json j;
        j["k"] = st.index;
        j["p"] = st.columns;
        j["height"] = to_decimal(st.height);
        j["height_bits"] = bit_length(st.height);
        j["spacer_sum"] = to_decimal(s.back());
        j["top_exponent"] = to_decimal(exponents(st).back());
        if (st.columns <= 64) {
            Json a = Json::array();
            for (const auto& v : st.spacers) a.push_back(to_decimal(v));
            j["spacers"] = std::move(a);
        }
        j["thm21_i"] = c.thm21_i;
        j["thm21_ii"] = c.thm21_ii;
        j["thm36_ii"] = c.thm36_ii;
        j["restricted_growth_ratio"] = c.restricted_growth_ratio;
        j["inv_p_sq_partial"] = c.inv_p_sq_partial;
        j["finiteness_partial"] = c.finiteness_partial;
        stages.push_back(std::move(j));
        all21 = all21 && c.thm21_i && c.thm21_ii;
        csv.row({num(k), num(st.columns), num(static_cast<std::size_t>(bit_length(st.height))),
                 c.thm21_i ? "1" : "0", c.thm21_ii ? "1" : "0", c.thm36_ii ? "1" : "0",
                 num(c.restricted_growth_ratio), num(c.inv_p_sq_partial), num(c.finiteness_partial)});
    }
    csv.write(ctx.out / "describe_stages.csv");
    Json r;
    r["family"] = tower.family;
    r["depth"] = tower.depth();
    r["next_height"] = to_decimal(tower.next_height());
    r["thm21_all"] = all21;
    r["stages"] = std::move(stages);
    return r;
}

Json cmd_riesz(Context& ctx) {
    const auto& c = ctx.config;
    const auto tower = build_family(c);
    std::vector<std::size_t> ns = c.riesz.mass_n;
    if (ns.empty())
        for (std::size_t n = 1; n <= tower.depth(); ++n) ns.push_back(n);

    Json masses = Json::array();
    Csv csv({"n", "mass", "grid_N"});
    for (std::size_t n : ns) {
        if (n > tower.depth()) throw ValidationError("riesz.mass_n", "n = " + std::to_string(n) + " exceeds depth");
        Json j;
        j["n"] = n;
        try {
            const auto m = mass(tower, n, c.grid);
            j["value"] = m.value;
            j["grid_N"] = m.grid_size;
            j["convergence_delta"] = 0.0;  // exactness-rule grid
            j["exact"] = true;
            csv.row({num(n), num(m.value), num(m.grid_size)});
            if (std::fabs(m.value - 1.0) > 1e-8)
                ctx.fail("mass_normalization", "n = " + std::to_string(n) + ", mass = " + fmt17(m.value));
        } catch (const CapError& e) {
            j["skipped"] = e.what();
            j["required_grid_N"] = e.required();
        }
        masses.push_back(std::move(j));
    }
    csv.write(ctx.out / "riesz_mass.csv");

    Json r;
    r["family"] = tower.family;
    r["mass"] = std::move(masses);

    const FactorSelection selection(c.riesz.selection);
    for (std::size_t k : selection.indices())
        if (k < 1 || k > tower.depth()) throw ValidationError("riesz.selection", "indices must lie in [1, depth]");
    if (!selection.empty()) {
        const auto est = l1_product(tower, selection, c.grid);
        r["l1_product"] = {{"selection", selection_json(selection)}, {"value", est.value},
                           {"grid_N", est.grid_size},       {"convergence_delta", est.convergence_delta},
                           {"converged", est.converged}};
    }
    if (c.riesz.stage) {
        const std::size_t m = pick_stage(c.riesz.stage, tower, "riesz.stage");
        if (m < 1) throw ValidationError("riesz.stage", "must be >= 1");
        if (!selection.empty() && selection.back() >= m)
            throw ValidationError("riesz.stage", "must exceed every selected index");
        const auto l23 = lemma23_check(tower, selection, m, c.grid);
        r["lemma23"] = {{"stage", m},
                        {"lhs", l23.lhs},
                        {"rhs", l23.rhs},
                        {"slack", l23.slack},
                        {"grid_N", l23.grid_size},
                        {"convergence_delta", l23.convergence_delta},
                        {"converged", l23.converged}};
        if (l23.slack < -1e-6) ctx.fail("lemma23_slack", "slack = " + fmt17(l23.slack));
        const auto dev = l1_deviation(tower, m, c.grid);
        r["l1_deviation"] = {{"stage", m},
                             {"abs_deviation", dev.abs_deviation},
                             {"sq_deviation", dev.sq_deviation},
                             {"grid_N", dev.grid_size},
                             {"convergence_delta", dev.convergence_delta},
                             {"converged", dev.converged}};
        if (c.riesz.weak_frequency) {
            const auto series = TrigSeries::cosine(*c.riesz.weak_frequency);
            const double w = weak_convergence_check(tower, m, series, c.grid);
            r["weak_convergence"] = {{"stage", m},
                                     {"frequency", *c.riesz.weak_frequency},
                                     {"difference", w},
                                     {"convergence_delta", 0.0}};
        }
    }
    return r;
}

Json cmd_bourgain(Context& ctx) {
    const auto& c = ctx.config;
    const auto tower = build_family(c);
    StageWindow window{c.bourgain.first, c.bourgain.last};
    if (window.last && *window.last > tower.depth()) throw ValidationError("bourgain.last", "exceeds depth");
    const auto g = greedy_bourgain(tower, c.bourgain.budget, window, c.grid);

    Csv csv({"step", "stage", "value", "convergence_delta", "grid_N"});
    for (std::size_t i = 0; i < g.values.size(); ++i)
        csv.row({num(i + 1), num(g.selection.indices()[i]), num(g.values[i]), num(g.deltas[i]), num(g.grid_sizes[i])});
    csv.write(ctx.out / "bourgain_decay.csv");

    for (std::size_t i = 1; i < g.values.size(); ++i)
        if (g.values[i] > g.values[i - 1]) {
            ctx.fail("nonincreasing", "step " + std::to_string(i + 1) + " rises from " + fmt17(g.values[i - 1]) +
                                          " to " + fmt17(g.values[i]));
            break;
        }

    Json r;
    r["family"] = tower.family;
    r["window"] = {{"first", window.first}, {"last", window.last.value_or(tower.depth())}};
    r["selection"] = selection_json(g.selection);
    r["values"] = g.values;
    r["deltas"] = g.deltas;
    r["grid_N"] = g.grid_sizes;
    return r;
}

Json cmd_clt(Context& ctx) {
    const auto& c = ctx.config;
    const auto tower = build_family(c);
    const std::size_t m = pick_stage(c.clt.stage, tower, "clt.stage");
    if (c.clt.log2_grid > c.grid.log2_cap)
        throw ValidationError("clt.log2_grid", "exceeds the grid cap 2^" + std::to_string(c.grid.log2_cap));
    const auto grid = UniformGrid::with_log2(static_cast<unsigned>(c.clt.log2_grid));
    const BorelSet set(c.clt.arcs);
    const auto samples = normalized_sum(tower, m, grid, set);
    const auto ks = ks_distance(samples, m, set);

    Csv csv({"x", "F_emp", "Phi"});
    for (const auto& pt : ecdf_curve(samples.values)) csv.row({num(pt.x), num(pt.empirical), num(pt.gaussian)});
    csv.write(ctx.out / "clt_ecdf.csv");

    Json arcs = Json::array();
    for (const auto& a : set.arcs()) arcs.push_back({a.begin, a.end});
    Json r;
    r["family"] = tower.family;
    r["stage"] = m;
    r["p"] = tower.stage(m).columns;
    r["set"] = {{"arcs", std::move(arcs)}, {"measure", set.measure()}};
    r["ks"] = {{"distance", ks.ks},
               {"location", ks.location},
               {"grid_N", ks.grid_size},
               {"sample_count", ks.sample_count},
               {"convergence_delta", 0.0}};

    const auto tail = tail_lower_bound(tower, m, set, c.clt.tail_x, grid);
    r["tail"] = {{"x", tail.x},
                 {"empirical_tail", tail.empirical_tail},
                 {"gaussian_tail", tail.gaussian_tail},
                 {"k_hat", tail.k_hat},
                 {"k_limit", tail.k_limit},
                 {"sample_count", tail.sample_count},
                 {"standard_error", std::sqrt(tail.empirical_tail * (1.0 - tail.empirical_tail) /
                                              static_cast<double>(tail.sample_count))}};
    if (c.clt.dispersion) {
        try {
            const auto d = squares_dispersion(tower, m, c.grid);
            r["dispersion"] = {{"value", d.value},
                               {"half_inverse_p", 0.5 / static_cast<double>(tower.stage(m).columns)},
                               {"grid_N", d.grid_size},
                               {"convergence_delta", 0.0}};
        } catch (const CapError& e) {
            r["dispersion"] = {{"skipped", e.what()}, {"required_grid_N", e.required()}};
        }
    }
    return r;
}

Json cmd_theta(Context& ctx) {
    const auto& c = ctx.config;
    const auto tower = build_family(c);
    const std::size_t m = pick_stage(c.theta.stage, tower, "theta.stage");
    Json runs = Json::array();
    for (std::size_t i = 0; i < c.theta.x.size(); ++i) {
        const double x = c.theta.x[i];
        const auto th = theta_product(tower, m, x, c.grid);
        const std::size_t violations = rho_bound_violations(th);
        Csv csv({"w", "r", "abs_rho", "bound", "expansion_modulus"});
        double worst = 0.0;
        for (const auto& co : th.coefficients) {
            csv.row({to_decimal(co.word), num(co.r), num(std::abs(co.rho)), num(co.stated_bound),
                     num(co.expansion_modulus)});
            if (co.stated_bound > 0.0) worst = std::max(worst, std::abs(co.rho) / co.stated_bound);
        }
        csv.write(ctx.out / ("theta_" + std::to_string(i) + ".csv"));
        runs.push_back({{"x", x},
                        {"grid_N", th.grid_size},
                        {"convergence_delta", 0.0},
                        {"constant_term", {th.constant_term.real(), th.constant_term.imag()}},
                        {"coefficients", th.coefficients.size()},
                        {"rho_bound_violations", violations},
                        {"max_rho_over_bound", worst},
                        {"max_off_word", th.max_off_word},
                        {"sup_norm", th.sup_norm},
                        {"sup_bound", th.sup_bound}});
        if (th.sup_norm > th.sup_bound + 1e-9)
            ctx.fail("sup_bound", "x = " + fmt17(x) + ", sup = " + fmt17(th.sup_norm));
        if (violations > 0)
            ctx.fail("rho_bound", "x = " + fmt17(x) + ", " + std::to_string(violations) + " of " +
                                      std::to_string(th.coefficients.size()) + " coefficients exceed the bound");
    }
    Json r;
    r["family"] = tower.family;
    r["stage"] = m;
    r["p"] = tower.stage(m).columns;
    r["runs"] = std::move(runs);
    return r;
}

std::string sign_string(const SignVector& eps) {
    std::string s;
    for (auto e : eps) s += e > 0 ? '+' : (e < 0 ? '-' : '0');
    return s;
}

Json cmd_words(Context& ctx) {
    const auto& c = ctx.config;
    const auto tower = build_family(c);
    const std::size_t m = pick_stage(c.words.stage, tower, "words.stage");
    const auto& stage = tower.stage(m);
    const auto table = enumerate_words(stage);
    const auto rep = check_distinct(table);

    Json collisions = Json::array();
    for (const auto& [a, b] : rep.collisions) collisions.push_back({sign_string(a), sign_string(b)});
    if (c.words.csv) {
        Csv csv({"word", "r", "eps"});
        for (const auto& e : table.entries)
            for (const auto& v : e.vectors) csv.row({to_decimal(e.value), num(support_size(v)), sign_string(v)});
        csv.write(ctx.out / "words.csv");
    }
    if (!rep.distinct)
        ctx.fail("distinct", std::to_string(rep.collision_count) + " colliding sign vectors at stage " +
                                 std::to_string(m));
    Json r;
    r["family"] = tower.family;
    r["stage"] = m;
    r["p"] = stage.columns;
    r["count"] = table.vector_count;
    r["distinct_words"] = table.entries.size();
    r["distinct"] = rep.distinct;
    r["checked_vectors"] = rep.checked_vectors;
    r["collision_count"] = rep.collision_count;
    r["collisions"] = std::move(collisions);
    r["N_m"] = to_decimal(all_plus_word(stage));
    r["max_word"] = to_decimal(table.max_word);
    r["triple_growth"] = check_triple_growth(stage);
    return r;
}

Json cmd_ornstein(Context& ctx) {
    const auto& c = ctx.config;
    if (!c.family.ensemble) throw ValidationError("family", "ornstein command needs family 'ornstein'");
    const auto& ens = *c.family.ensemble;
    const auto& o = c.ornstein;
    const std::size_t depth = std::max(c.family.depth, o.stage);

    Json xi = Json::array(), parseval = Json::array();
    for (std::size_t k = 0; k <= depth; ++k) {
        xi.push_back(xi_l2(ens.xi.at(k)));
        const double d = parseval_check(ens.xi.at(k), c.grid);
        parseval.push_back(d);
        if (d > 1e-12) ctx.fail("parseval", "stage " + std::to_string(k) + ", difference " + fmt17(d));
    }
    Json heights = Json::array();
    for (const auto& h : ensemble_heights(ens, o.stage)) heights.push_back(to_decimal(h));

    GridPolicy policy = c.grid;
    policy.tolerance = o.tolerance;
    const auto l44 = lemma44_estimate(ens, o.stage, o.samples, policy);
    if (!l44.within_bound())
        ctx.fail("lemma44_bound", "mc_mean " + fmt17(l44.mc_mean) + " > bound " + fmt17(l44.bound) + " + 3 stderr");

    const auto omega = clt_in_omega(ens, o.stage, o.t0, o.omega_samples);

    const auto sample = sample_tower(ens, depth, 0, c.family.variant, c.family.build);
    const auto fin = check_finiteness(sample.tower);

    // Histogram of the omega-sample on a fixed symmetric range.
    const double lo = -4.0, hi = 4.0;
    const std::size_t bins = o.histogram_bins;
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    std::size_t outside = 0;
    for (double v : omega.values) {
        if (v < lo || v >= hi) {
            ++outside;
            continue;
        }
        counts[std::min(bins - 1, static_cast<std::size_t>((v - lo) / width))]++;
    }
    Csv csv({"bin_left", "bin_right", "count", "density", "normal_density"});
    const double n = static_cast<double>(omega.values.size());
    for (std::size_t b = 0; b < bins; ++b) {
        const double left = lo + width * static_cast<double>(b);
        const double right = left + width;
        const double mid = 0.5 * (left + right);
        csv.row({num(left), num(right), num(counts[b]), num(static_cast<double>(counts[b]) / (n * width)),
                 num(std::exp(-0.5 * mid * mid) / std::sqrt(2.0 * std::numbers::pi))});
    }
    csv.write(ctx.out / "ornstein_omega_hist.csv");

    Json r;
    r["stage"] = o.stage;
    r["p"] = ens.columns.at(o.stage);
    r["variant"] = c.family.variant == OrnsteinVariant::mixing ? "mixing" : "standard";
    r["seed"] = ens.seed;
    r["heights"] = std::move(heights);
    r["xi_l2"] = std::move(xi);
    r["parseval"] = std::move(parseval);
    r["lemma44"] = {{"mc_mean", l44.mc_mean},
                    {"stderr", l44.standard_error},
                    {"bound", l44.bound},
                    {"mean_abs_expectation", l44.mean_abs_expectation},
                    {"samples", l44.samples},
                    {"grid_N", l44.grid_size},
                    {"convergence_delta", l44.max_delta},
                    {"within_bound", l44.within_bound()}};
    r["clt"] = {{"ks", omega.ks},
                {"n", omega.samples},
                {"t0", omega.t0},
                {"mean", omega.mean},
                {"variance", omega.variance},
                {"standard_error", std::sqrt(omega.variance / static_cast<double>(omega.samples))},
                {"character_modulus", omega.character_modulus},
                {"character_flagged", omega.character_flagged},
                {"outside_histogram", outside}};
    r["finiteness_sample0"] = fin;
    return r;
}

using Handler = std::function<Json(Context&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table{
        {"describe", cmd_describe}, {"riesz", cmd_riesz}, {"bourgain", cmd_bourgain}, {"clt", cmd_clt},
        {"theta", cmd_theta},       {"words", cmd_words}, {"ornstein", cmd_ornstein}};
    return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"describe", "riesz", "bourgain", "clt", "theta", "words", "ornstein"};
    return names;
}

int run_command(const std::string& command, const RunConfig& config, const std::filesystem::path& out,
                std::ostream& log) {
    const auto it = handlers().find(command);
    if (it == handlers().end()) throw ValidationError("command", "unknown command '" + command + "'");
    std::filesystem::create_directories(out);
    const std::string started = utc_now();

    Context ctx{config, out, log, {}};
    Json report;
    report["command"] = command;
    Json body = it->second(ctx);
    for (auto& [k, v] : body.items()) report[k] = v;
    report["invariant_failures"] = ctx.failures;
    write_json(out / (command + ".json"), report);

    Json meta;
    meta["command"] = command;
    meta["started_utc"] = started;
    meta["finished_utc"] = utc_now();
    meta["kernels"] = simd::active_kernels().name;
    meta["threads"] = thread_count();
    write_json(out / "metadata.json", meta);
    return ctx.failures.empty() ? kExitOk : kExitInvariant;
}

}  // namespace rankone::cli
