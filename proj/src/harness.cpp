#include "conjtest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "conjtest/conjugacy.hpp"
#include "conjtest/connecting_map.hpp"
#include "conjtest/embedding.hpp"
#include "conjtest/generators.hpp"

namespace conjtest {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string msg = "invalid experiment spec (" + std::to_string(problems.size()) + " problem" +
                      (problems.size() == 1 ? "" : "s") + ")";
    for (const auto& p : problems) msg += "\n  - " + p;
    return msg;
}

// ---------------------------------------------------------------------------
// Field reader that records problems instead of stopping at the first one.

class Fields {
public:
    Fields(const Json& obj, std::string where, std::vector<std::string>& problems)
        : obj_(obj), where_(std::move(where)), problems_(problems) {
        if (!obj_.is_object()) problem("must be an object");
    }

    bool has(const char* key) const { return obj_.is_object() && obj_.contains(key); }
    void known(const char* key) { used_.insert(key); }

    double number(const char* key, std::optional<double> fallback = std::nullopt) {
        used_.insert(key);
        if (!has(key)) {
            if (fallback) return *fallback;
            problem(std::string("missing field '") + key + "'");
            return 0.0;
        }
        const Json& v = obj_.at(key);
        if (!v.is_number()) {
            problem(std::string("field '") + key + "' must be a number");
            return 0.0;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) problem(std::string("field '") + key + "' must be finite");
        return x;
    }

    std::size_t count(const char* key, std::optional<std::size_t> fallback = std::nullopt,
                      std::size_t min = 0) {
        used_.insert(key);
        if (!has(key)) {
            if (fallback) return *fallback;
            problem(std::string("missing field '") + key + "'");
            return min;
        }
        return as_count(obj_.at(key), std::string("field '") + key + "'", min);
    }

    std::string text(const char* key, std::optional<std::string> fallback = std::nullopt) {
        used_.insert(key);
        if (!has(key)) {
            if (fallback) return *fallback;
            problem(std::string("missing field '") + key + "'");
            return {};
        }
        const Json& v = obj_.at(key);
        if (!v.is_string()) {
            problem(std::string("field '") + key + "' must be a string");
            return {};
        }
        return v.get<std::string>();
    }

    bool flag(const char* key, bool fallback) {
        used_.insert(key);
        if (!has(key)) return fallback;
        const Json& v = obj_.at(key);
        if (!v.is_boolean()) {
            problem(std::string("field '") + key + "' must be true or false");
            return fallback;
        }
        return v.get<bool>();
    }

    /// Fixed-length numeric array; a scalar is accepted when size is 1.
    std::vector<double> numbers(const char* key, std::size_t size, std::optional<std::vector<double>> fallback) {
        used_.insert(key);
        if (!has(key)) {
            if (fallback) return *fallback;
            problem(std::string("missing field '") + key + "'");
            return std::vector<double>(size, 0.0);
        }
        const Json& v = obj_.at(key);
        if (size == 1 && v.is_number()) return {v.get<double>()};
        if (!v.is_array() || v.size() != size ||
            !std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number(); })) {
            problem(std::string("field '") + key + "' must be an array of " + std::to_string(size) + " numbers");
            return std::vector<double>(size, 0.0);
        }
        std::vector<double> out;
        for (const auto& e : v) out.push_back(e.get<double>());
        return out;
    }

    /// Non-empty grid; a scalar is a one-point grid.
    std::vector<double> grid(const char* key, double fallback) {
        used_.insert(key);
        if (!has(key)) return {fallback};
        const Json& v = obj_.at(key);
        std::vector<double> out;
        if (v.is_number()) {
            out.push_back(v.get<double>());
        } else if (v.is_array() && !v.empty() &&
                   std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number(); })) {
            for (const auto& e : v) out.push_back(e.get<double>());
        } else {
            problem(std::string("field '") + key + "' must be a number or a non-empty array of numbers");
        }
        return out;
    }

    std::vector<std::size_t> count_grid(const char* key, std::size_t fallback) {
        std::vector<std::size_t> out;
        const bool present = has(key);
        for (double x : grid(key, static_cast<double>(fallback))) {
            if (!(x >= 1.0 && x == std::floor(x) && x < 1e15)) {
                if (present) problem(std::string("field '") + key + "' must hold positive integers");
                return out;
            }
            out.push_back(static_cast<std::size_t>(x));
        }
        return out;
    }

    void reject_unknown() {
        if (!obj_.is_object()) return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!used_.count(it.key())) problem("unknown field '" + it.key() + "'");
    }

    void problem(const std::string& what) { problems_.push_back(where_ + ": " + what); }

private:
    std::size_t as_count(const Json& v, const std::string& what, std::size_t min) {
        if (!v.is_number()) {
            problem(what + " must be an integer");
            return min;
        }
        const double x = v.get<double>();
        if (!(x == std::floor(x) && x >= static_cast<double>(min) && x < 1e15)) {
            problem(what + " must be an integer >= " + std::to_string(min));
            return min;
        }
        return static_cast<std::size_t>(x);
    }

    const Json& obj_;
    std::string where_;
    std::vector<std::string>& problems_;
    std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Parsed spec

using Lookup = std::function<const TimeSeries&(const std::string&)>;

struct SeriesDef {
    std::string name;
    std::string from;  // empty for generated series
    std::function<TimeSeries(const Lookup&)> build;
};

struct MapDef {
    std::string text;
    std::string paired;  // image series name for paired:<name>
    bool present = false;
};

struct ComparisonDef {
    std::string pair, a, b;
    MapDef map_ab, map_ba;
    bool align = false;
};

struct MethodDef {
    Method method = Method::fnn;
    std::vector<double> r;
    std::vector<std::size_t> k, t;
};

struct Plan {
    std::string id;
    std::vector<SeriesDef> series;
    std::vector<ComparisonDef> comparisons;
    std::vector<MethodDef> methods;
    std::vector<std::string> problems;
};

bool reads_r(Method m) { return m == Method::fnn; }
bool reads_k(Method m) { return m != Method::fnn; }
bool reads_t(Method m) { return m == Method::conjtest || m == Method::conjtest_plus; }
bool needs_maps(Method m) { return reads_t(m); }

std::optional<MetricKind> metric_field(Fields& f) {
    if (!f.has("metric")) return std::nullopt;
    const std::string name = f.text("metric");
    try {
        return parse_metric(name);
    } catch (const Error& e) {
        f.problem(e.what());
        return std::nullopt;
    }
}

TimeSeries with_metric_override(TimeSeries s, std::optional<MetricKind> metric) {
    return metric ? s.with_metric(*metric) : s;
}

std::function<TimeSeries(const Lookup&)> parse_generator(Fields& f) {
    const std::string system = f.text("system");
    const auto metric = metric_field(f);
    if (system == "circle") {
        const double phi = f.number("phi"), s = f.number("s", 1.0), start = f.number("start", 0.0);
        const std::size_t n = f.count("length", std::nullopt, 1);
        return [=](const Lookup&) { return with_metric_override(gen_circle(phi, s, start, n), metric); };
    }
    if (system == "torus") {
        const double p1 = f.number("phi1"), p2 = f.number("phi2");
        const auto st = f.numbers("start", 2, std::vector<double>{0.0, 0.0});
        const std::size_t n = f.count("length", std::nullopt, 1);
        return [=](const Lookup&) { return with_metric_override(gen_torus(p1, p2, {st[0], st[1]}, n), metric); };
    }
    if (system == "logistic" || system == "tent") {
        const bool logistic = system == "logistic";
        const double param = f.number(logistic ? "l" : "mu");
        const double start = f.number("start");
        const std::size_t n = f.count("length", std::nullopt, 1);
        const IntervalMap kind = logistic ? IntervalMap::logistic : IntervalMap::tent;
        return [=](const Lookup&) { return with_metric_override(gen_interval_map(kind, param, start, n), metric); };
    }
    if (system == "lorenz") {
        LorenzParams p;
        const auto st = f.numbers("start", 3, std::nullopt);
        const std::size_t n = f.count("length", std::nullopt, 1);
        const std::size_t burn = f.count("burn_in", 0);
        p.sample_time = f.number("sample_time", p.sample_time);
        p.sigma = f.number("sigma", p.sigma);
        p.rho = f.number("rho", p.rho);
        p.beta = f.number("beta", p.beta);
        p.rtol = f.number("rtol", p.rtol);
        p.atol = f.number("atol", p.atol);
        return [=](const Lookup&) {
            return with_metric_override(gen_lorenz({st[0], st[1], st[2]}, n, burn, p), metric);
        };
    }
    if (system == "klein") {
        const double p1 = f.number("phi1"), p2 = f.number("phi2");
        const auto st = f.numbers("start", 2, std::vector<double>{0.0, 0.0});
        const std::size_t n = f.count("length", std::nullopt, 1);
        return [=](const Lookup&) { return with_metric_override(gen_klein(p1, p2, {st[0], st[1]}, n), metric); };
    }
    if (!system.empty())
        f.problem("unknown system '" + system + "' (expected circle, torus, logistic, tent, lorenz, klein)");
    return nullptr;
}

std::function<TimeSeries(const Lookup&)> parse_derive(Fields& f, std::string& from) {
    from = f.text("from");
    const std::string op = f.text("op");
    const auto metric = metric_field(f);
    const std::string src = from;
    if (op == "noise") {
        const double eps = f.number("eps");
        if (eps < 0.0) f.problem("noise eps must be non-negative");
        const std::size_t seed = f.count("seed", 0);
        return [=](const Lookup& get) { return with_metric_override(add_noise(get(src), eps, seed), metric); };
    }
    if (op == "project") {
        const std::size_t coord = f.count("coord", std::nullopt, 1);
        return [=](const Lookup& get) { return with_metric_override(project(get(src), coord), metric); };
    }
    if (op == "mean") {
        return [=](const Lookup& get) { return with_metric_override(observable_mean(get(src)), metric); };
    }
    if (op == "embed") {
        const std::size_t dim = f.count("dim", std::nullopt, 1);
        const std::size_t lag = f.count("lag", std::nullopt, 1);
        std::optional<std::size_t> coord;
        bool mean = false;
        if (f.has("observable")) {
            const std::string obs = f.text("observable");
            if (obs == "mean")
                mean = true;
            else
                f.problem("unknown observable '" + obs + "' (expected mean)");
        }
        if (f.has("coord")) coord = f.count("coord", std::nullopt, 1);
        if (mean && coord) f.problem("give either coord or observable, not both");
        return [=](const Lookup& get) {
            const TimeSeries& s = get(src);
            const TimeSeries scalar = mean ? observable_mean(s) : coord ? project(s, *coord) : s;
            return takens_embed(scalar, {dim, lag}, metric);
        };
    }
    if (op == "map") {
        const std::string text = f.text("map");
        std::optional<ConnectingMap> h;
        try {
            h = ConnectingMap::parse(text);
        } catch (const Error& e) {
            if (!text.empty()) f.problem(e.what());
        }
        return [=](const Lookup& get) {
            const TimeSeries& s = get(src);
            return h->image_of(s, metric.value_or(s.metric()));
        };
    }
    if (op == "truncate") {
        const std::size_t n = f.count("length", std::nullopt, 1);
        return [=](const Lookup& get) { return with_metric_override(truncate(get(src), n), metric); };
    }
    if (!op.empty())
        f.problem("unknown derive op '" + op + "' (expected noise, project, mean, embed, map, truncate)");
    return nullptr;
}

MapDef parse_map_field(Fields& f, const char* key, const std::set<std::string>& names) {
    MapDef def;
    if (!f.has(key)) return def;
    def.present = true;
    def.text = f.text(key);
    if (def.text.rfind("paired:", 0) == 0) {
        def.paired = def.text.substr(7);
        if (!names.count(def.paired))
            f.problem(std::string(key) + " refers to undeclared series '" + def.paired + "'");
    } else {
        try {
            (void)ConnectingMap::parse(def.text);
        } catch (const Error& e) {
            f.problem(std::string(key) + ": " + e.what());
        }
    }
    return def;
}

Plan parse_plan(const Json& spec) {
    Plan plan;
    auto& problems = plan.problems;
    if (!spec.is_object()) {
        problems.push_back("spec must be a JSON object");
        return plan;
    }
    Fields top(spec, "spec", problems);
    plan.id = top.text("id");
    top.text("description", std::string{});
    top.text("output", std::string{});
    if (top.has("sweep")) {
        Fields sw(spec.at("sweep"), "sweep", problems);
        sw.text("axis");
        if (!sw.has("values"))
            sw.problem("missing field 'values'");
        else
            sw.grid("values", 0.0);
        sw.reject_unknown();
    }
    top.known("sweep");
    top.known("series");
    top.known("methods");
    top.known("comparisons");

    // series
    std::set<std::string> names;
    if (!spec.contains("series") || !spec.at("series").is_object()) {
        problems.push_back("spec: 'series' must be an object mapping names to series definitions");
    } else {
        for (auto it = spec.at("series").begin(); it != spec.at("series").end(); ++it) names.insert(it.key());
        for (auto it = spec.at("series").begin(); it != spec.at("series").end(); ++it) {
            const std::string where = "series '" + it.key() + "'";
            Fields s(it.value(), where, problems);
            SeriesDef def;
            def.name = it.key();
            const bool gen = s.has("generator"), der = s.has("derive");
            if (gen == der) {
                s.problem("needs exactly one of 'generator' or 'derive'");
            } else if (gen) {
                Fields g(it.value().at("generator"), where + " generator", problems);
                def.build = parse_generator(g);
                g.reject_unknown();
            } else {
                Fields d(it.value().at("derive"), where + " derive", problems);
                def.build = parse_derive(d, def.from);
                d.reject_unknown();
                if (!def.from.empty() && !names.count(def.from))
                    d.problem("derives from undeclared series '" + def.from + "'");
            }
            s.known("generator");
            s.known("derive");
            s.reject_unknown();
            plan.series.push_back(std::move(def));
        }
    }
    // derive cycles
    {
        std::map<std::string, std::string> parent;
        for (const auto& s : plan.series) parent[s.name] = s.from;
        for (const auto& s : plan.series) {
            std::string cur = s.from;
            for (std::size_t steps = 0; !cur.empty() && parent.count(cur); ++steps) {
                if (cur == s.name || steps > parent.size()) {
                    problems.push_back("series '" + s.name + "': derive chain is cyclic");
                    break;
                }
                cur = parent[cur];
            }
        }
    }

    // methods
    if (!spec.contains("methods") || !spec.at("methods").is_array()) {
        problems.push_back("spec: 'methods' must be an array");
    } else {
        std::size_t i = 0;
        for (const auto& m : spec.at("methods")) {
            Fields f(m, "methods[" + std::to_string(i++) + "]", problems);
            MethodDef def;
            const std::string name = f.text("method");
            try {
                def.method = parse_method(name);
            } catch (const Error& e) {
                if (!name.empty()) f.problem(e.what());
            }
            def.r = f.grid("r", 2.0);
            for (double r : def.r)
                if (!(r > 0.0)) f.problem("r values must be positive");
            def.k = f.count_grid("k", 5);
            def.t = f.count_grid("t", 5);
            f.reject_unknown();
            plan.methods.push_back(std::move(def));
        }
    }
    const bool any_map_method = std::any_of(plan.methods.begin(), plan.methods.end(),
                                            [](const MethodDef& m) { return needs_maps(m.method); });

    // comparisons
    if (!spec.contains("comparisons") || !spec.at("comparisons").is_array()) {
        problems.push_back("spec: 'comparisons' must be an array");
    } else {
        std::size_t i = 0;
        for (const auto& c : spec.at("comparisons")) {
            Fields f(c, "comparisons[" + std::to_string(i++) + "]", problems);
            ComparisonDef def;
            def.a = f.text("a");
            def.b = f.text("b");
            def.pair = f.text("pair", def.a + " vs " + def.b);
            for (const auto* side : {&def.a, &def.b})
                if (!side->empty() && !names.count(*side))
                    f.problem("refers to undeclared series '" + *side + "'");
            def.map_ab = parse_map_field(f, "map_ab", names);
            def.map_ba = parse_map_field(f, "map_ba", names);
            def.align = f.flag("align", false);
            if (any_map_method) {
                if (!def.map_ab.present) f.problem("conjtest methods need 'map_ab'");
                if (!def.map_ba.present) f.problem("conjtest methods need 'map_ba'");
            }
            f.reject_unknown();
            plan.comparisons.push_back(std::move(def));
        }
    }
    top.reject_unknown();
    return plan;
}

// ---------------------------------------------------------------------------
// Execution

class SeriesStore {
public:
    explicit SeriesStore(const Plan& plan) : plan_(plan) {
        for (std::size_t i = 0; i < plan.series.size(); ++i) index_[plan.series[i].name] = i;
    }

    const TimeSeries& get(const std::string& name) {
        if (auto it = built_.find(name); it != built_.end()) return it->second;
        const SeriesDef& def = plan_.series.at(index_.at(name));
        Lookup lookup = [this](const std::string& n) -> const TimeSeries& { return get(n); };
        try {
            return built_.emplace(name, def.build(lookup)).first->second;
        } catch (const SpecError&) {
            throw;
        } catch (const Error& e) {
            throw Error("series '" + name + "': " + e.what());
        }
    }

private:
    const Plan& plan_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, TimeSeries> built_;
};

struct PreparedPair {
    TimeSeries a, b;
    std::optional<ConnectingMap> h_ab, h_ba;
    std::string map_error;
};

ConnectingMap make_map(const MapDef& def, SeriesStore& store, std::optional<std::size_t> length) {
    if (!def.paired.empty()) {
        const TimeSeries& image = store.get(def.paired);
        return ConnectingMap::index_paired(length ? truncate(image, *length) : image, def.text);
    }
    return ConnectingMap::parse(def.text);
}

PreparedPair prepare_pair(const ComparisonDef& c, SeriesStore& store) {
    const TimeSeries& a = store.get(c.a);
    const TimeSeries& b = store.get(c.b);
    std::optional<std::size_t> length;
    if (c.align) {
        std::size_t n = std::min(a.size(), b.size());
        for (const MapDef* m : {&c.map_ab, &c.map_ba})
            if (!m->paired.empty()) n = std::min(n, store.get(m->paired).size());
        length = n;
    }
    PreparedPair p{length ? truncate(a, *length) : a, length ? truncate(b, *length) : b, {}, {}, {}};
    try {
        if (c.map_ab.present) p.h_ab = make_map(c.map_ab, store, length);
        if (c.map_ba.present) p.h_ba = make_map(c.map_ba, store, length);
    } catch (const Error& e) {
        p.map_error = e.what();
    }
    return p;
}

struct Job {
    std::size_t comparison;
    Method method;
    TestParams params;
    bool has_r, has_k, has_t;
};

std::vector<Job> expand_jobs(const Plan& plan) {
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < plan.comparisons.size(); ++c) {
        for (const MethodDef& m : plan.methods) {
            const std::vector<double> rs = reads_r(m.method) ? m.r : std::vector<double>{2.0};
            const std::vector<std::size_t> ks = reads_k(m.method) ? m.k : std::vector<std::size_t>{5};
            const std::vector<std::size_t> ts = reads_t(m.method) ? m.t : std::vector<std::size_t>{5};
            for (double r : rs)
                for (std::size_t k : ks)
                    for (std::size_t t : ts)
                        jobs.push_back({c, m.method, {r, k, t}, reads_r(m.method), reads_k(m.method),
                                        reads_t(m.method)});
        }
    }
    return jobs;
}

template <typename Body>
void run_pool(std::size_t count, unsigned jobs, Body body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ExperimentResult execute(const Plan& plan, unsigned jobs) {
    SeriesStore store(plan);
    std::vector<PreparedPair> pairs;
    pairs.reserve(plan.comparisons.size());
    for (const auto& c : plan.comparisons) pairs.push_back(prepare_pair(c, store));

    const std::vector<Job> work = expand_jobs(plan);
    std::vector<std::array<ResultRow, 2>> slots(work.size());
    std::vector<std::string> warnings(work.size());
    run_pool(work.size(), jobs, [&](std::size_t i) {
        const Job& job = work[i];
        const ComparisonDef& c = plan.comparisons[job.comparison];
        const PreparedPair& p = pairs[job.comparison];
        for (int dir = 0; dir < 2; ++dir) {
            ResultRow row;
            row.experiment = plan.id;
            row.pair = c.pair;
            row.method = std::string(to_string(job.method));
            if (job.has_r) row.r = job.params.r;
            if (job.has_k) row.k = job.params.k;
            if (job.has_t) row.t = job.params.t;
            row.direction = dir == 0 ? "ab" : "ba";
            try {
                if (needs_maps(job.method) && !p.map_error.empty()) throw Error(p.map_error);
                const auto& h = dir == 0 ? p.h_ab : p.h_ba;
                const ConnectingMap map = h ? *h : ConnectingMap::identity();
                row.value = dir == 0 ? run_directed(job.method, p.a, p.b, job.params, map).value
                                     : run_directed(job.method, p.b, p.a, job.params, map).value;
            } catch (const Error& e) {
                if (!warnings[i].empty()) warnings[i] += "; ";
                warnings[i] += c.pair + " " + row.method + " " + row.direction + ": " + e.what();
            }
            slots[i][dir] = std::move(row);
        }
    });

    ExperimentResult result;
    for (std::size_t i = 0; i < work.size(); ++i) {
        result.rows.push_back(std::move(slots[i][0]));
        result.rows.push_back(std::move(slots[i][1]));
        if (!warnings[i].empty()) result.warnings.push_back(std::move(warnings[i]));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Built-in specs

const double alpha = std::sqrt(2.0) / 10.0;
const double beta_ = std::sqrt(3.0) / 10.0;

Json gen(Json fields) { return Json{{"generator", std::move(fields)}}; }
Json derive(Json fields) { return Json{{"derive", std::move(fields)}}; }

Json cmp(const std::string& a, const std::string& b, const std::string& ab, const std::string& ba,
         bool align = false) {
    Json c{{"pair", a + " vs " + b}, {"a", a}, {"b", b}, {"map_ab", ab}, {"map_ba", ba}};
    if (align) c["align"] = true;
    return c;
}

Json all_methods(double r, std::size_t k, std::size_t t) {
    return Json::array({Json{{"method", "fnn"}, {"r", Json::array({r})}},
                        Json{{"method", "knn"}, {"k", Json::array({k})}},
                        Json{{"method", "conjtest"}, {"k", Json::array({k})}, {"t", Json::array({t})}},
                        Json{{"method", "conjtest+"}, {"k", Json::array({k})}, {"t", Json::array({t})}}});
}

Json lorenz(std::array<double, 3> start) {
    return gen({{"system", "lorenz"},
                {"start", {start[0], start[1], start[2]}},
                {"length", 10000},
                {"burn_in", 2000},
                {"sample_time", 0.02},
                {"metric", "maximum"}});
}

Json embed(const std::string& from, std::size_t coord, std::size_t dim, std::size_t lag) {
    return derive({{"from", from}, {"op", "embed"}, {"coord", coord}, {"dim", dim}, {"lag", lag}});
}

std::vector<double> range(double lo, double hi, double step) {
    std::vector<double> v;
    const auto n = static_cast<long>(std::llround((hi - lo) / step));
    for (long i = 0; i <= n; ++i) v.push_back(lo + static_cast<double>(i) * step);
    return v;
}

Json spec_1a() {
    Json s{{"id", "1A"}, {"description", "circle rotations: start point, angle, nonlinearity, noise"}};
    s["series"] = {
        {"R1", gen({{"system", "circle"}, {"phi", alpha}, {"start", 0.0}, {"length", 2000}})},
        {"R2", gen({{"system", "circle"}, {"phi", alpha}, {"start", 0.25}, {"length", 2000}})},
        {"R3", gen({{"system", "circle"}, {"phi", alpha + 0.02}, {"start", 0.0}, {"length", 2000}})},
        {"R4", gen({{"system", "circle"}, {"phi", 2 * alpha}, {"start", 0.0}, {"length", 2000}})},
        {"R5", gen({{"system", "circle"}, {"phi", alpha}, {"s", 2.0}, {"start", 0.0}, {"length", 2000}})},
        {"R6", derive({{"from", "R5"}, {"op", "noise"}, {"eps", 0.05}, {"seed", 1}})},
    };
    s["comparisons"] = {cmp("R1", "R2", "identity", "identity"), cmp("R1", "R3", "identity", "identity"),
                        cmp("R1", "R4", "identity", "identity"), cmp("R1", "R5", "pow:0.5", "pow:2"),
                        cmp("R1", "R6", "pow:0.5", "pow:2")};
    s["methods"] = all_methods(2.0, 5, 5);
    return s;
}

Json spec_1b() {
    Json s{{"id", "1B"}, {"description", "rotation by alpha against rotations by beta near alpha"}};
    s["series"] = {
        {"Ralpha", gen({{"system", "circle"}, {"phi", alpha}, {"start", 0.0}, {"length", 2000}})},
        {"Rbeta", gen({{"system", "circle"}, {"phi", alpha}, {"start", 0.0}, {"length", 2000}})},
    };
    s["comparisons"] = {cmp("Ralpha", "Rbeta", "identity", "identity")};
    s["methods"] = all_methods(2.0, 5, 5);
    std::vector<double> betas;
    for (int i = -50; i <= 125; ++i) betas.push_back(alpha + i * alpha / 100.0);
    s["sweep"] = {{"axis", "series.Rbeta.phi"}, {"values", betas}};
    return s;
}

Json spec_1c() {
    Json s{{"id", "1C"}, {"description", "rotation against a noisy nonlinear rotation"}};
    s["series"] = {
        {"R1", gen({{"system", "circle"}, {"phi", alpha}, {"start", 0.0}, {"length", 2000}})},
        {"R5", gen({{"system", "circle"}, {"phi", alpha}, {"s", 2.0}, {"start", 0.0}, {"length", 2000}})},
        {"Reps", derive({{"from", "R5"}, {"op", "noise"}, {"eps", 0.0}, {"seed", 1}})},
    };
    s["comparisons"] = {cmp("R1", "Reps", "pow:0.5", "pow:2")};
    s["methods"] = all_methods(2.0, 5, 5);
    s["sweep"] = {{"axis", "series.Reps.eps"}, {"values", range(0.0, 0.25, 0.01)}};
    return s;
}

Json spec_2a() {
    Json s{{"id", "2A"}, {"description", "torus rotations and their circle factors"}};
    s["series"] = {
        {"T1", gen({{"system", "torus"}, {"phi1", alpha}, {"phi2", beta_}, {"start", {0.0, 0.0}}, {"length", 2000}})},
        {"T2", gen({{"system", "torus"}, {"phi1", 1.1 * alpha}, {"phi2", beta_}, {"start", {0.1, 0.0}}, {"length", 2000}})},
        {"T3", gen({{"system", "torus"}, {"phi1", beta_}, {"phi2", beta_}, {"start", {0.1, 0.0}}, {"length", 2000}})},
        {"S1", derive({{"from", "T1"}, {"op", "project"}, {"coord", 1}})},
        {"S2", derive({{"from", "T2"}, {"op", "project"}, {"coord", 1}})},
        {"S3", derive({{"from", "T3"}, {"op", "project"}, {"coord", 1}})},
    };
    s["comparisons"] = {cmp("T1", "S1", "proj:1", "pad:2"), cmp("T1", "T2", "identity", "identity"),
                        cmp("T1", "S2", "proj:1", "pad:2"), cmp("T1", "T3", "identity", "identity"),
                        cmp("T1", "S3", "proj:1", "pad:2")};
    s["methods"] = all_methods(2.0, 5, 5);
    return s;
}

Json spec_3a() {
    Json s{{"id", "3A"}, {"description", "logistic map against the tent map and perturbed logistic maps"}};
    s["series"] = {
        {"A", gen({{"system", "logistic"}, {"l", 4.0}, {"start", 0.2}, {"length", 2000}})},
        {"B1", derive({{"from", "A"}, {"op", "map"}, {"map", "arcsin"}})},
        {"B2", gen({{"system", "logistic"}, {"l", 4.0}, {"start", 0.21}, {"length", 2000}})},
        {"B3", gen({{"system", "logistic"}, {"l", 3.99}, {"start", 0.2}, {"length", 2000}})},
        {"B4", gen({{"system", "logistic"}, {"l", 3.99}, {"start", 0.21}, {"length", 2000}})},
    };
    s["comparisons"] = {cmp("A", "B1", "arcsin", "sinsq"), cmp("A", "B2", "identity", "identity"),
                        cmp("A", "B3", "identity", "identity"), cmp("A", "B4", "identity", "identity")};
    s["methods"] = all_methods(2.0, 5, 5);
    return s;
}

Json spec_3b() {
    Json s{{"id", "3B"}, {"description", "logistic map with parameter l against l = 4"}};
    s["series"] = {
        {"A", gen({{"system", "logistic"}, {"l", 4.0}, {"start", 0.2}, {"length", 2000}})},
        {"Bl", gen({{"system", "logistic"}, {"l", 4.0}, {"start", 0.2}, {"length", 2000}})},
    };
    s["comparisons"] = {cmp("A", "Bl", "identity", "identity")};
    s["methods"] = all_methods(2.0, 5, 5);
    s["sweep"] = {{"axis", "series.Bl.l"}, {"values", range(3.8, 4.0, 0.005)}};
    return s;
}

Json spec_4a() {
    Json s{{"id", "4A"}, {"description", "Lorenz trajectories against delay embeddings of their coordinates"}};
    Json series{{"L1", lorenz({1, 1, 1})}, {"L2", lorenz({2, 1, 1})}};
    const std::vector<std::pair<std::string, std::size_t>> embeds{{"x1", 1}, {"x2", 1}, {"x3", 1}, {"z1", 3}, {"z3", 3}};
    for (int i : {1, 2})
        for (const auto& [label, coord] : embeds)
            series["P" + std::to_string(i) + "_" + label] =
                embed("L" + std::to_string(i), coord, static_cast<std::size_t>(label.back() - '0'), 5);
    s["series"] = series;
    Json comps = Json::array();
    for (const auto& [label, coord] : embeds)
        comps.push_back(cmp("L1", "P1_" + label, "paired:P1_" + label, "paired:L1", true));
    comps.push_back(cmp("L1", "L2", "identity", "identity"));
    for (const auto& [label, coord] : embeds)
        comps.push_back(cmp("L1", "P2_" + label, "paired:P1_" + label, "paired:L2", true));
    s["comparisons"] = comps;
    s["methods"] = all_methods(3.0, 5, 10);
    return s;
}

Json spec_4b() {
    Json s{{"id", "4B"}, {"description", "consecutive delay embeddings of the Lorenz x coordinate"}};
    Json series{{"L", lorenz({1, 1, 1})}};
    for (std::size_t d = 1; d <= 6; ++d) series["P" + std::to_string(d)] = embed("L", 1, d, 5);
    s["series"] = series;
    Json comps = Json::array();
    for (int d = 1; d <= 5; ++d) {
        const std::string lo = "P" + std::to_string(d), hi = "P" + std::to_string(d + 1);
        comps.push_back(cmp(lo, hi, "paired:" + hi, "paired:" + lo, true));
    }
    s["comparisons"] = comps;
    s["methods"] = Json::array({Json{{"method", "fnn"}, {"r", range(2.0, 5.0, 0.25)}},
                                Json{{"method", "knn"}, {"k", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}},
                                Json{{"method", "conjtest+"}, {"k", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}, {"t", {10}}}});
    s["sweep"] = {{"axis", "r"}, {"values", range(2.0, 5.0, 0.25)}};
    return s;
}

Json spec_4c() {
    Json s{{"id", "4C"}, {"description", "conjtest+ against the time horizon t for Lorenz embeddings"}};
    Json series{{"L1", lorenz({1, 1, 1})}, {"L2", lorenz({2, 1, 1})}, {"L3", lorenz({1, 2, 1})},
                {"L4", lorenz({1, 1, 2})}};
    for (int d = 1; d <= 4; ++d) series["P1_x" + std::to_string(d)] = embed("L1", 1, d, 5);
    for (int d = 1; d <= 4; ++d) series["P1_y" + std::to_string(d)] = embed("L1", 2, d, 5);
    for (int i = 2; i <= 4; ++i)
        for (const char* c : {"x", "y"})
            for (int d = 1; d <= 4; ++d)
                series["P" + std::to_string(i) + "_" + c + std::to_string(d)] =
                    embed("L" + std::to_string(i), c[0] == 'x' ? 1 : 2, d, 5);
    s["series"] = series;
    Json comps = Json::array();
    for (int i = 2; i <= 4; ++i) {
        const std::string li = "L" + std::to_string(i);
        comps.push_back(cmp("L1", li, "identity", "identity"));
        for (const char* c : {"x", "y"})
            for (int d = 1; d <= 4; ++d) {
                const std::string tail = std::string("_") + c + std::to_string(d);
                comps.push_back(cmp("L1", "P" + std::to_string(i) + tail, "paired:P1" + tail, "paired:" + li, true));
            }
    }
    s["comparisons"] = comps;
    const std::vector<double> ts{1, 5, 9, 13, 17, 21, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80};
    s["methods"] = Json::array({Json{{"method", "conjtest+"}, {"k", {5}}, {"t", ts}}});
    s["sweep"] = {{"axis", "t"}, {"values", ts}};
    return s;
}

Json spec_5a() {
    Json s{{"id", "5A"}, {"description", "consecutive delay embeddings of a Klein bottle observable"}};
    Json series{{"K", gen({{"system", "klein"}, {"phi1", alpha}, {"phi2", beta_}, {"start", {0.0, 0.0}}, {"length", 8000}})}};
    for (std::size_t d = 2; d <= 5; ++d)
        series["P" + std::to_string(d)] =
            derive({{"from", "K"}, {"op", "embed"}, {"observable", "mean"}, {"dim", d}, {"lag", 8}});
    s["series"] = series;
    Json comps = Json::array();
    for (int d = 2; d <= 4; ++d) {
        const std::string lo = "P" + std::to_string(d), hi = "P" + std::to_string(d + 1);
        comps.push_back(cmp(lo, hi, "paired:" + hi, "paired:" + lo, true));
    }
    s["comparisons"] = comps;
    s["methods"] = Json::array({Json{{"method", "fnn"}, {"r", range(2.0, 5.0, 0.25)}},
                                Json{{"method", "knn"}, {"k", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}},
                                Json{{"method", "conjtest+"}, {"k", {10}}, {"t", {1, 2, 4, 6, 8, 10, 15, 20}}}});
    s["sweep"] = {{"axis", "r"}, {"values", range(2.0, 5.0, 0.25)}};
    return s;
}

// ---------------------------------------------------------------------------

Json apply_axis(const Json& spec, const std::string& axis, double value, std::vector<std::string>& problems) {
    Json s = spec;
    s.erase("sweep");
    if (axis == "r" || axis == "k" || axis == "t") {
        Json kept = Json::array();
        for (Json m : spec.value("methods", Json::array())) {
            Method method;
            try {
                method = parse_method(m.value("method", std::string{}));
            } catch (const Error&) {
                kept.push_back(m);  // reported by validation
                continue;
            }
            const bool reads = axis == "r" ? reads_r(method) : axis == "k" ? reads_k(method) : reads_t(method);
            if (!reads) continue;
            m[axis] = Json::array({value});
            kept.push_back(m);
        }
        if (kept.empty() && !spec.value("methods", Json::array()).empty())
            problems.push_back("sweep axis '" + axis + "' is not read by any method in the spec");
        s["methods"] = kept;
        return s;
    }
    const std::string prefix = "series.";
    const auto dot = axis.rfind('.');
    if (axis.rfind(prefix, 0) != 0 || dot == std::string::npos || dot <= prefix.size()) {
        problems.push_back("sweep axis '" + axis + "' must be r, k, t or series.<name>.<field>");
        return s;
    }
    const std::string name = axis.substr(prefix.size(), dot - prefix.size());
    const std::string field = axis.substr(dot + 1);
    if (!s.contains("series") || !s["series"].is_object() || !s["series"].contains(name)) {
        problems.push_back("sweep axis '" + axis + "' refers to undeclared series '" + name + "'");
        return s;
    }
    Json& def = s["series"][name];
    const char* kind = def.contains("generator") ? "generator" : "derive";
    if (!def.contains(kind) || !def[kind].is_object()) {
        problems.push_back("sweep axis '" + axis + "': series has no generator or derive block");
        return s;
    }
    if (field == "system" || field == "op" || field == "from" || field == "metric" || field == "map" ||
        field == "observable") {
        problems.push_back("sweep axis '" + axis + "': field '" + field + "' is not numeric");
        return s;
    }
    Json& target = def[kind][field];
    if (value == std::floor(value) && std::fabs(value) < 1e15)
        target = static_cast<std::int64_t>(value);
    else
        target = value;
    // integral doubles are stored as integers so count fields accept them; numeric
    // fields read them back as doubles either way
    return s;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 3) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

}  // namespace

SpecError::SpecError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

std::vector<std::string> builtin_ids() { return {"1A", "1B", "1C", "2A", "3A", "3B", "4A", "4B", "4C", "5A"}; }

Json builtin_spec(const std::string& id) {
    if (id == "1A") return spec_1a();
    if (id == "1B") return spec_1b();
    if (id == "1C") return spec_1c();
    if (id == "2A") return spec_2a();
    if (id == "3A") return spec_3a();
    if (id == "3B") return spec_3b();
    if (id == "4A") return spec_4a();
    if (id == "4B") return spec_4b();
    if (id == "4C") return spec_4c();
    if (id == "5A") return spec_5a();
    throw Error("unknown built-in experiment '" + id + "'");
}

std::vector<std::string> validate_spec(const Json& spec) { return parse_plan(spec).problems; }

ExperimentResult run_experiment(const Json& spec, unsigned jobs) {
    Plan plan = parse_plan(spec);
    if (!plan.problems.empty()) throw SpecError(std::move(plan.problems));
    return execute(plan, jobs);
}

std::optional<std::pair<std::string, std::vector<double>>> default_sweep(const Json& spec) {
    if (!spec.is_object() || !spec.contains("sweep")) return std::nullopt;
    const Json& sw = spec.at("sweep");
    if (!sw.is_object() || !sw.contains("axis") || !sw.at("axis").is_string() || !sw.contains("values") ||
        !sw.at("values").is_array())
        return std::nullopt;
    std::vector<double> values;
    for (const auto& v : sw.at("values"))
        if (v.is_number()) values.push_back(v.get<double>());
    return std::make_pair(sw.at("axis").get<std::string>(), values);
}

ExperimentResult sweep(const Json& spec, const std::string& axis, const std::vector<double>& values,
                       unsigned jobs) {
    std::vector<std::string> problems = validate_spec(spec);
    if (values.empty()) problems.push_back("sweep needs at least one value");
    std::vector<Plan> plans;
    for (double v : values) {
        std::vector<std::string> axis_problems;
        Json s = apply_axis(spec, axis, v, axis_problems);
        Plan plan = parse_plan(s);
        for (auto& p : axis_problems) problems.push_back(std::move(p));
        for (auto& p : plan.problems)
            problems.push_back("at " + axis + " = " + format_double(v) + ": " + p);
        plans.push_back(std::move(plan));
    }
    // one problem per distinct message
    std::vector<std::string> unique;
    for (auto& p : problems)
        if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(std::move(p));
    if (!unique.empty()) throw SpecError(std::move(unique));

    ExperimentResult result;
    for (std::size_t i = 0; i < values.size(); ++i) {
        ExperimentResult part = execute(plans[i], jobs);
        for (auto& row : part.rows) {
            row.axis = axis;
            row.axis_value = values[i];
            result.rows.push_back(std::move(row));
        }
        for (auto& w : part.warnings)
            result.warnings.push_back(axis + " = " + format_double(values[i]) + ": " + std::move(w));
    }
    return result;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool sweep_columns) {
    if (sweep_columns) out << "axis,axis_value,";
    out << "experiment,pair,method,r,k,t,direction,value\n";
    for (const auto& row : rows) {
        if (sweep_columns)
            out << csv_field(row.axis) << ',' << (row.axis_value ? format_double(*row.axis_value) : "") << ',';
        out << csv_field(row.experiment) << ',' << csv_field(row.pair) << ',' << row.method << ','
            << (row.r ? format_double(*row.r) : "") << ',' << (row.k ? std::to_string(*row.k) : "") << ','
            << (row.t ? std::to_string(*row.t) : "") << ',' << row.direction << ','
            << (row.value ? format_double(*row.value) : "NA") << '\n';
    }
}

std::string sweep_svg(const std::vector<ResultRow>& rows, const std::string& method, const std::string& title) {
    struct Curve {
        std::string label;
        std::vector<std::pair<double, double>> points;
    };
    std::vector<Curve> curves;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    std::string axis;
    for (const auto& row : rows) {
        if (row.method != method || !row.axis_value || !row.value) continue;
        axis = row.axis;
        const std::string label = row.pair + " (" + row.direction + ")";
        auto it = std::find_if(curves.begin(), curves.end(), [&](const Curve& c) { return c.label == label; });
        if (it == curves.end()) {
            curves.push_back({label, {}});
            it = curves.end() - 1;
        }
        const double x = *row.axis_value, y = *row.value;
        it->points.emplace_back(x, y);
        if (first) {
            xmin = xmax = x;
            ymin = std::min(0.0, y);
            ymax = y;
            first = false;
        }
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    constexpr double width = 720, height = 440, left = 60, right = 220, top = 40, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };
    static const char* palette[] = {"#d62728", "#2ca02c", "#1f77b4", "#bcbd22", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#ff7f0e"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0, fy = ymin + (ymax - ymin) * i / 4.0;
        svg << "<text x=\"" << sx(fx) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << fixed(fx)
            << "</text>\n";
        svg << "<text x=\"" << left - 6 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">" << fixed(fy)
            << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">"
        << xml_escape(axis) << "</text>\n";
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = palette[c % std::size(palette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : curves[c].points) svg << sx(x) << ',' << sy(y) << ' ';
        svg << "\"/>\n";
        const double ly = top + 14.0 * static_cast<double>(c);
        svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly + 4 << "\">" << xml_escape(curves[c].label)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace conjtest
