#include "twave/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <omp.h>

#include "twave/errors.hpp"
#include "twave/snapshot_io.hpp"
#include "twave/twode.hpp"

namespace twave {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kExperiments = {"simulate",        "sweep-speeds", "critical-curve",
                                               "inversion-curve", "bifurcation-map", "orbit"};

template <class T>
T get(const json& j, const char* section, const char* key) {
    try {
        return j.at(section).at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config ") + section + "." + key + ": " + e.what());
    }
}

void check_known_keys(const json& defaults, const json& user, const std::string& prefix) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string name = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!defaults.contains(it.key())) {
            throw ConfigError("unknown config key '" + name + "'");
        }
        const auto& d = defaults.at(it.key());
        if (d.is_object()) {
            if (!it->is_object()) {
                throw ConfigError("config key '" + name + "' must be an object");
            }
            check_known_keys(d, *it, name);
        }
    }
}

bool same_kind(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

std::vector<double> spaced(double lo, double hi, int n, const std::string& spacing) {
    if (n < 1) throw ConfigError("curve needs at least one point");
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("curve range must be positive and ordered");
    std::vector<double> v;
    for (int k = 0; k < n; ++k) {
        const double s = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
        if (spacing == "log") {
            v.push_back(std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo))));
        } else if (spacing == "linear") {
            v.push_back(lo + s * (hi - lo));
        } else {
            throw ConfigError("curve spacing must be 'log' or 'linear'");
        }
    }
    return v;
}

std::string csv_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

// Runs job(i) for i in [0, n) on `workers` threads.
template <class F>
void parallel_jobs(long n, int workers, F&& job) {
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (workers == 1) {
        for (long i = 0; i < n; ++i) job(i);
        return;
    }
    const int omp_share = std::max(1, omp_get_num_procs() / workers);
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, omp_share] {
            omp_set_num_threads(omp_share);
            for (long i = next++; i < n; i = next++) job(i);
        });
    }
    for (auto& t : pool) t.join();
}

json state_json(StateLabel label, const StatePoint& p) {
    return {{"label", to_string(label)}, {"x", p.x}, {"U", p.U}, {"W", p.W}};
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json default_config(const std::string& experiment) {
    if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end()) {
        throw ConfigError("unknown experiment '" + experiment + "'");
    }
    const bool inversion = experiment == "inversion-curve";
    return {
        {"experiment", experiment},
        {"seed", 0},
        {"model", {{"alpha", 1.0}, {"epsilon", 0.1}, {"beta", 0.0}}},
        {"grid", {{"L", 240.0}, {"dx", 0.025}}},
        {"solver",
         {{"T", 120.0},
          {"safety", 0.5},
          {"snapshot_every", 1.0},
          {"export_every", 10},
          {"boundary", "outflow"},
          {"reaction", true},
          {"advection", "compensated"},
          {"units", "rescaled"}}},
        {"initial", {{"kind", "dip"}, {"u0", 1.0}, {"amplitude", 0.5}, {"sigma", 2.0}, {"noise", 0.0}}},
        {"analysis", {{"discard", 0.3}, {"grad_tol", 1e-3}, {"c_max", 3.0}}},
        {"sweep",
         {{"alpha", {0.5, 1.0, 2.0, 4.0}},
          {"epsilon", {0.025, 0.05, 0.1}},
          {"dx_diffusion_factor", 0.02},
          {"domain_margin", 30.0}}},
        {"curve",
         {{"min", inversion ? 0.01 : 1e-4},
          {"max", inversion ? 0.5 : 1.0},
          {"points", inversion ? 20 : 41},
          {"spacing", "log"}}},
        {"bifurcation",
         {{"c_min", -3.0}, {"c_max", 3.0}, {"c_points", 240}, {"ag_min", 0.0}, {"ag_max", 2.5}, {"ag_points", 100}}},
        {"orbit",
         {{"c", 1.3},
          {"a", 0.1},
          {"U1", 1.0},
          {"beta", 0.0},
          {"offset", 1e-6},
          {"capture_radius", 1e-3},
          {"opposite_radius", 1e-3},
          {"escape_factor", 1e3},
          {"max_xi", 5000.0}}},
    };
}

void apply_override(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json* node = &cfg;
    std::stringstream ks(key);
    std::string part;
    while (std::getline(ks, part, '.')) {
        if (!node->is_object() || !node->contains(part)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        node = &(*node)[part];
    }
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    if (!same_kind(*node, value)) {
        throw ConfigError("override '" + key + "' has the wrong type");
    }
    *node = value;
}

json resolve_config(const std::string& experiment, const json& user, const std::vector<std::string>& overrides) {
    json cfg = default_config(experiment);
    if (!user.is_null()) {
        if (!user.is_object()) {
            throw ConfigError("config must be a JSON object");
        }
        check_known_keys(cfg, user, "");
        cfg.merge_patch(user);
        cfg["experiment"] = experiment;
    }
    for (const auto& o : overrides) {
        apply_override(cfg, o);
    }
    if (cfg["experiment"] != experiment) {
        throw ConfigError("the experiment is fixed by the subcommand");
    }
    return cfg;
}

json load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

SolverConfig solver_config(const json& cfg) {
    SolverConfig sc;
    sc.params = ModelParams(get<double>(cfg, "model", "alpha"), get<double>(cfg, "model", "epsilon"),
                            get<double>(cfg, "model", "beta"));
    const double L = get<double>(cfg, "grid", "L");
    const double dx = get<double>(cfg, "grid", "dx");
    if (!(dx > 0.0) || !(L > 0.0)) {
        throw ConfigError("grid L and dx must be positive");
    }
    sc.grid = Grid(L, static_cast<long>(std::llround(2.0 * L / dx)));
    sc.units = parse_units(get<std::string>(cfg, "solver", "units"));
    sc.boundary = parse_boundary(get<std::string>(cfg, "solver", "boundary"));
    sc.advection = parse_advection(get<std::string>(cfg, "solver", "advection"));
    sc.reaction = get<bool>(cfg, "solver", "reaction");
    sc.T = get<double>(cfg, "solver", "T");
    sc.snapshot_every = get<double>(cfg, "solver", "snapshot_every");
    const double safety = get<double>(cfg, "solver", "safety");
    if (!(safety > 0.0 && safety <= 1.0)) {
        throw ConfigError("solver.safety must lie in (0, 1]");
    }
    sc.dt = cfl_dt(sc.grid.dx(), diffusion_coefficient(sc), safety);
    validate(sc);
    return sc;
}

FieldPair initial_field(const json& cfg, const Grid& grid) {
    try {
        return make_initial(parse_initial_kind(get<std::string>(cfg, "initial", "kind")),
                            get<double>(cfg, "initial", "u0"), get<double>(cfg, "initial", "amplitude"),
                            get<double>(cfg, "initial", "sigma"), grid, get<double>(cfg, "initial", "noise"),
                            cfg.at("seed").get<std::uint64_t>());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("initial data: ") + e.what());
    }
}

SimulationResult simulate(const json& cfg, const fs::path& out) {
    const auto sc = solver_config(cfg);
    const auto init = initial_field(cfg, sc.grid);
    const double u0 = get<double>(cfg, "initial", "u0");
    const long export_every = get<long>(cfg, "solver", "export_every");
    LabelOptions lab;
    lab.grad_tol = get<double>(cfg, "analysis", "grad_tol");
    const double c_max = get<double>(cfg, "analysis", "c_max");
    const double discard = get<double>(cfg, "analysis", "discard");

    SimulationResult res;
    std::vector<std::string> files;
    long index = 0;
    SnapshotCallback cb;
    if (!out.empty() && export_every > 0) {
        cb = [&](const Snapshot& s) {
            if (index % export_every == 0) {
                char name[32];
                std::snprintf(name, sizeof name, "snap_%05ld.csv", index);
                write_snapshot(out / "snapshots" / name, s, sc.grid);
                files.push_back(std::string("snapshots/") + name);
            }
            ++index;
        };
    }
    res.run = run(sc, init, cb);
    const auto& snaps = res.run.snapshots;
    res.tracks = track_typed_fronts(snaps, sc.grid, u0, lab, c_max, discard);
    res.relations = verify_relations(observations(res.tracks));
    const auto& last = snaps.back().f;

    json fronts = json::array();
    json morphology = {{"left", json::array()}, {"right", json::array()}};
    for (const auto& t : res.tracks) {
        const auto& tr = t.track;
        fronts.push_back({{"kind", to_string(t.kind)},
                          {"side", to_string(tr.side)},
                          {"complete", tr.complete},
                          {"samples", tr.samples.size()},
                          {"t_first", tr.samples.front().t},
                          {"t_last", tr.samples.back().t},
                          {"x_last", tr.samples.back().x},
                          {"level", t.last.level},
                          {"c_fit", opt_json(tr.c_fit)},
                          {"stderr", opt_json(tr.stderr_fit)},
                          {"inner", state_json(t.last.inner_label, t.last.inner)},
                          {"outer", state_json(t.last.outer_label, t.last.outer)}});
        if (tr.complete && tr.c_fit) {
            morphology[tr.side == Direction::RightMoving ? "right" : "left"].push_back(to_string(t.kind));
        }
    }
    const long mid = last.size() / 2;
    const double center_u = 0.5 * (last.u(mid - 1) + last.u(mid));
    morphology["center_U"] = center_u;
    morphology["depleted_center"] = center_u < 0.02 * u0;

    json relations = json::array();
    for (const auto& c : res.relations.checks) {
        relations.push_back({{"kind", to_string(c.kind)},
                             {"side", to_string(c.side)},
                             {"relation", c.relation},
                             {"c", c.c},
                             {"measured", c.measured},
                             {"predicted", c.predicted},
                             {"rel_error", c.rel_error},
                             {"complete", c.complete},
                             {"note", c.note}});
    }
    json arbitration = json::array();
    for (const auto& a : res.relations.arbitration) {
        arbitration.push_back({{"behind_polarized_along_motion", a.along_motion},
                               {"rel_error_c_over_c_plus_1", a.err_c_plus_1},
                               {"rel_error_c_over_c_minus_1", a.err_c_minus_1},
                               {"supported", a.supported}});
    }
    json plateaus = json::array();
    const auto plats = extract_plateaus(last, sc.grid, lab.grad_tol * u0);
    for (const auto& p : plats) {
        plateaus.push_back({{"x_begin", p.x_begin}, {"x_end", p.x_end}, {"U", p.U}, {"W", p.W},
                            {"max_gradient", p.max_gradient}});
    }
    const double m0 = res.run.mass.front();
    const double m1 = res.run.mass.back();
    res.report = {{"fronts", fronts},
                  {"morphology", morphology},
                  {"relations", relations},
                  {"arbitration", arbitration},
                  {"plateaus", plateaus},
                  {"mass", {{"initial", m0}, {"final", m1}, {"rel_change", (m1 - m0) / m0}}},
                  {"min_density", res.run.min_density},
                  {"steps", res.run.steps},
                  {"dt", res.run.dt}};

    if (!out.empty()) {
        std::string tracks = "track,kind,side,t,x\n";
        for (size_t k = 0; k < res.tracks.size(); ++k) {
            for (const auto& s : res.tracks[k].track.samples) {
                tracks += std::to_string(k) + "," + to_string(res.tracks[k].kind) + "," +
                          to_string(res.tracks[k].track.side) + "," + fmt(s.t) + "," + fmt(s.x) + "\n";
            }
        }
        atomic_write(out / "tracks.csv", tracks);
        std::string pl = "x_begin,x_end,U,W,max_gradient\n";
        for (const auto& p : plats) {
            pl += fmt(p.x_begin) + "," + fmt(p.x_end) + "," + fmt(p.U) + "," + fmt(p.W) + "," + fmt(p.max_gradient) + "\n";
        }
        atomic_write(out / "plateaus.csv", pl);
        std::string ph = "x,U,W,Wprime\n";
        for (const auto& p : phase_trace(last, sc.grid)) {
            ph += fmt(p.x) + "," + fmt(p.U) + "," + fmt(p.W) + "," + fmt(p.Wprime) + "\n";
        }
        atomic_write(out / "phase_trace.csv", ph);
        atomic_write(out / "report.json", res.report.dump(2) + "\n");
        json times = json::array();
        for (const auto& s : snaps) times.push_back(s.time);
        json manifest = {{"config", cfg},     {"dt", res.run.dt},   {"steps", res.run.steps}, {"N", sc.grid.N()},
                         {"dx", sc.grid.dx()}, {"times", times},     {"files", files},        {"mass", res.run.mass}};
        atomic_write(out / "manifest.json", manifest.dump(2) + "\n");
    }
    return res;
}

json cmd_simulate(const json& cfg, const fs::path& out) {
    const auto res = simulate(cfg, out);
    return {{"experiment", "simulate"}, {"morphology", res.report["morphology"]},
            {"relations", res.report["relations"]}, {"arbitration", res.report["arbitration"]}};
}

json sweep_row_config(const json& cfg, double alpha, double epsilon) {
    if (!(alpha > 0.0) || !(epsilon > 0.0)) {
        throw ConfigError("sweep values of alpha and epsilon must be positive");
    }
    json row = cfg;
    const double a = alpha * epsilon;
    const double beta = get<double>(cfg, "model", "beta");
    const double u0 = get<double>(cfg, "initial", "u0");
    const double T = get<double>(cfg, "solver", "T");
    const double c_star = critical_speeds(a * crowding(u0, beta)).upper;
    // Rescaled grid: resolve the diffusion length sqrt(a) and fit the leading front.
    const double dx = std::min(get<double>(cfg, "grid", "dx"), std::sqrt(get<double>(cfg, "sweep", "dx_diffusion_factor") * a));
    const double L = std::max(get<double>(cfg, "grid", "L"), 1.1 * c_star * T + get<double>(cfg, "sweep", "domain_margin"));
    row["experiment"] = "simulate";
    row["model"]["alpha"] = alpha;
    row["model"]["epsilon"] = epsilon;
    row["solver"]["units"] = "physical";
    row["grid"]["dx"] = dx / alpha;
    row["grid"]["L"] = L / alpha;
    row["solver"]["T"] = T / alpha;
    row["solver"]["snapshot_every"] = get<double>(cfg, "solver", "snapshot_every") / alpha;
    // Same rescaled initial profile in every row. A width fixed in physical units
    // becomes wide in rescaled units for large alpha, and the slowly decaying
    // Gaussian tail then drives a faster transient front for the whole run.
    row["initial"]["sigma"] = get<double>(cfg, "initial", "sigma") / alpha;
    return row;
}

SweepRow run_sweep_row(const json& cfg, double alpha, double epsilon) {
    SweepRow r;
    r.alpha = alpha;
    r.epsilon = epsilon;
    r.a = alpha * epsilon;
    const double beta = get<double>(cfg, "model", "beta");
    const double u0 = get<double>(cfg, "initial", "u0");
    try {
        r.c_star = critical_speeds(r.a * crowding(u0, beta)).upper;
        r.c_tilde = inversion_speed(r.a, beta, u0).mid();
        const auto res = simulate(sweep_row_config(cfg, alpha, epsilon), {});
        double lead = 0.0;
        double trail = 0.0;
        int nl = 0;
        int nt = 0;
        for (const auto& t : res.tracks) {
            if (!t.track.complete || !t.track.c_fit) continue;
            if (t.kind == FrontKind::Leading) {
                lead += std::abs(*t.track.c_fit);
                ++nl;
            } else if (t.kind == FrontKind::Inversion) {
                trail += std::abs(*t.track.c_fit);
                ++nt;
            }
        }
        r.c_fit_leading = nl ? lead / nl : std::nan("");
        r.c_fit_trailing = nt ? trail / nt : std::nan("");
        if (!nl || !nt) {
            r.status = "incomplete";
            r.message = "leading fronts: " + std::to_string(nl) + ", inversion fronts: " + std::to_string(nt);
        }
    } catch (const std::exception& e) {
        r.status = "error";
        r.message = e.what();
    }
    return r;
}

namespace {

json row_json(const SweepRow& r) {
    return {{"alpha", r.alpha},         {"epsilon", r.epsilon},   {"a", r.a},
            {"c_fit_leading", std::isnan(r.c_fit_leading) ? json(nullptr) : json(r.c_fit_leading)},
            {"c_fit_trailing", std::isnan(r.c_fit_trailing) ? json(nullptr) : json(r.c_fit_trailing)},
            {"c_star_predicted", r.c_star}, {"c_tilde_shooting", r.c_tilde}, {"status", r.status},
            {"message", r.message}};
}

SweepRow row_from_json(const json& j) {
    SweepRow r;
    r.alpha = j.at("alpha");
    r.epsilon = j.at("epsilon");
    r.a = j.at("a");
    r.c_fit_leading = j.at("c_fit_leading").is_null() ? std::nan("") : j.at("c_fit_leading").get<double>();
    r.c_fit_trailing = j.at("c_fit_trailing").is_null() ? std::nan("") : j.at("c_fit_trailing").get<double>();
    r.c_star = j.at("c_star_predicted");
    r.c_tilde = j.at("c_tilde_shooting");
    r.status = j.at("status");
    r.message = j.at("message");
    return r;
}

std::string csv_text(const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

std::string nan_blank(double v) { return std::isnan(v) ? std::string() : fmt(v); }

}  // namespace

json cmd_sweep_speeds(const json& cfg, const fs::path& out, int workers) {
    const auto alphas = cfg.at("sweep").at("alpha").get<std::vector<double>>();
    const auto epsilons = cfg.at("sweep").at("epsilon").get<std::vector<double>>();
    if (alphas.empty() || epsilons.empty()) {
        throw ConfigError("sweep ranges must be non-empty");
    }
    std::vector<std::pair<double, double>> jobs;
    for (double al : alphas) {
        for (double ep : epsilons) {
            jobs.emplace_back(al, ep);
        }
    }
    // Validate every row before any work starts.
    for (const auto& [al, ep] : jobs) {
        solver_config(sweep_row_config(cfg, al, ep));
    }
    std::vector<SweepRow> rows(jobs.size());
    parallel_jobs(static_cast<long>(jobs.size()), workers, [&](long i) {
        const auto [al, ep] = jobs[i];
        const json row_cfg = sweep_row_config(cfg, al, ep);
        const fs::path cache = out.empty() ? fs::path() : out / "rows" / ("row_" + std::to_string(i) + ".json");
        if (!cache.empty() && fs::exists(cache)) {
            try {
                std::ifstream in(cache);
                const json j = json::parse(in);
                if (j.at("config") == row_cfg) {
                    rows[i] = row_from_json(j.at("row"));
                    return;
                }
            } catch (const std::exception&) {
            }
        }
        rows[i] = run_sweep_row(cfg, al, ep);
        if (!cache.empty()) {
            atomic_write(cache, json{{"config", row_cfg}, {"row", row_json(rows[i])}}.dump(2) + "\n");
        }
    });
    std::string csv = "alpha,epsilon,a,c_fit_leading,c_fit_trailing,c_star_predicted,c_tilde_shooting,status,message\n";
    json summary = json::array();
    for (const auto& r : rows) {
        csv += fmt(r.alpha) + "," + fmt(r.epsilon) + "," + fmt(r.a) + "," + nan_blank(r.c_fit_leading) + "," +
               nan_blank(r.c_fit_trailing) + "," + fmt(r.c_star) + "," + fmt(r.c_tilde) + "," + r.status + "," +
               csv_text(r.message) + "\n";
        summary.push_back(row_json(r));
    }
    if (!out.empty()) {
        atomic_write(out / "sweep_speeds.csv", csv);
        atomic_write(out / "manifest.json", json{{"config", cfg}, {"rows", summary}}.dump(2) + "\n");
    }
    return {{"experiment", "sweep-speeds"}, {"rows", summary}};
}

json cmd_critical_curve(const json& cfg, const fs::path& out) {
    const auto ags = spaced(get<double>(cfg, "curve", "min"), get<double>(cfg, "curve", "max"),
                            get<int>(cfg, "curve", "points"), get<std::string>(cfg, "curve", "spacing"));
    std::string csv = "ag,sqrt_ag,c_lower,c_upper,status\n";
    json rows = json::array();
    for (double ag : ags) {
        std::optional<double> lo;
        std::optional<double> hi;
        std::string status = "ok";
        try {
            const auto cs = critical_speeds(ag);
            lo = cs.lower;
            hi = cs.upper;
        } catch (const std::exception& e) {
            status = std::string("error: ") + e.what();
        }
        csv += fmt(ag) + "," + fmt(std::sqrt(ag)) + "," + csv_opt(lo) + "," + csv_opt(hi) + "," + csv_text(status) + "\n";
        rows.push_back({{"ag", ag}, {"c_lower", opt_json(lo)}, {"c_upper", opt_json(hi)}, {"status", status}});
    }
    if (!out.empty()) {
        atomic_write(out / "critical_curve.csv", csv);
        atomic_write(out / "manifest.json", json{{"config", cfg}, {"files", {"critical_curve.csv"}}}.dump(2) + "\n");
    }
    return {{"experiment", "critical-curve"}, {"rows", rows}};
}

json cmd_inversion_curve(const json& cfg, const fs::path& out, int workers) {
    const auto as = spaced(get<double>(cfg, "curve", "min"), get<double>(cfg, "curve", "max"),
                           get<int>(cfg, "curve", "points"), get<std::string>(cfg, "curve", "spacing"));
    const double beta = get<double>(cfg, "model", "beta");
    const double U1 = get<double>(cfg, "initial", "u0");
    struct Point {
        double c_star = std::nan("");
        InversionBracket b;
        std::string status = "ok";
    };
    std::vector<Point> pts(as.size());
    parallel_jobs(static_cast<long>(as.size()), workers, [&](long i) {
        try {
            pts[i].c_star = critical_speeds(as[i] * crowding(U1, beta)).upper;
            pts[i].b = inversion_speed(as[i], beta, U1);
        } catch (const std::exception& e) {
            pts[i].status = std::string("error: ") + e.what();
        }
    });
    std::string csv = "a,sqrt_a,c_star,c_tilde_lo,c_tilde_hi,lo_outcome,hi_outcome,status\n";
    json rows = json::array();
    for (size_t i = 0; i < as.size(); ++i) {
        const auto& p = pts[i];
        const bool ok = p.status == "ok";
        csv += fmt(as[i]) + "," + fmt(std::sqrt(as[i])) + "," + nan_blank(p.c_star) + "," +
               (ok ? fmt(p.b.c_lo) : "") + "," + (ok ? fmt(p.b.c_hi) : "") + "," +
               (ok ? to_string(p.b.lo_outcome) : "") + "," + (ok ? to_string(p.b.hi_outcome) : "") + "," +
               csv_text(p.status) + "\n";
        rows.push_back({{"a", as[i]},
                        {"c_star", std::isnan(p.c_star) ? json(nullptr) : json(p.c_star)},
                        {"c_tilde_lo", ok ? json(p.b.c_lo) : json(nullptr)},
                        {"c_tilde_hi", ok ? json(p.b.c_hi) : json(nullptr)},
                        {"status", p.status}});
    }
    if (!out.empty()) {
        atomic_write(out / "inversion_curve.csv", csv);
        atomic_write(out / "manifest.json", json{{"config", cfg}, {"files", {"inversion_curve.csv"}}}.dump(2) + "\n");
    }
    return {{"experiment", "inversion-curve"}, {"rows", rows}};
}

json cmd_bifurcation_map(const json& cfg, const fs::path& out) {
    const double c0 = get<double>(cfg, "bifurcation", "c_min");
    const double c1 = get<double>(cfg, "bifurcation", "c_max");
    const double g0 = get<double>(cfg, "bifurcation", "ag_min");
    const double g1 = get<double>(cfg, "bifurcation", "ag_max");
    const int nc = get<int>(cfg, "bifurcation", "c_points");
    const int ng = get<int>(cfg, "bifurcation", "ag_points");
    if (nc < 50 || ng < 50) {
        throw ConfigError("bifurcation map resolution must be at least 50 x 50");
    }
    if (!(c1 > c0) || !(g1 > g0) || g0 < 0.0) {
        throw ConfigError("bifurcation ranges must be ordered with ag_min >= 0");
    }
    std::string csv = "c,ag,region,signs,re_mu1,re_mu2,re_mu3,im_max\n";
    long counts[3] = {0, 0, 0};
    for (int j = 0; j < ng; ++j) {
        const double ag = g0 + (g1 - g0) * j / (ng - 1);
        for (int i = 0; i < nc; ++i) {
            const double c = c0 + (c1 - c0) * i / (nc - 1);
            if (std::abs(c) < 1e-12 || std::abs(std::abs(c) - 1.0) < 1e-12) {
                csv += fmt(c) + "," + fmt(ag) + ",singular,,,,,\n";
                ++counts[2];
                continue;
            }
            const auto e = classify_equilibrium(c, ag);
            const bool real = e.region == EigenRegion::AllReal;
            ++counts[real ? 0 : 1];
            double im = 0.0;
            for (const auto& m : e.mu) im = std::max(im, std::abs(m.imag()));
            csv += fmt(c) + "," + fmt(ag) + "," + (real ? "all-real" : "complex-pair") + "," + csv_text(e.sign_pattern()) +
                   "," + fmt(e.mu[0].real()) + "," + fmt(e.mu[1].real()) + "," + fmt(e.mu[2].real()) + "," + fmt(im) +
                   "\n";
        }
    }
    if (!out.empty()) {
        atomic_write(out / "bifurcation_map.csv", csv);
        atomic_write(out / "manifest.json", json{{"config", cfg}, {"files", {"bifurcation_map.csv"}}}.dump(2) + "\n");
    }
    return {{"experiment", "bifurcation-map"},
            {"all_real", counts[0]},
            {"complex_pair", counts[1]},
            {"singular", counts[2]}};
}

json cmd_orbit(const json& cfg, const fs::path& out) {
    const double c = get<double>(cfg, "orbit", "c");
    const double a = get<double>(cfg, "orbit", "a");
    const double U1 = get<double>(cfg, "orbit", "U1");
    const double beta = get<double>(cfg, "orbit", "beta");
    if (!(c > 1.0)) {
        throw ConfigError("orbit.c must exceed 1 (orbits start at the W = U saddle)");
    }
    if (!(a > 0.0) || !(U1 > 0.0)) {
        throw ConfigError("orbit.a and orbit.U1 must be positive");
    }
    OrbitEvents ev;
    ev.capture_radius = get<double>(cfg, "orbit", "capture_radius");
    ev.opposite_radius = get<double>(cfg, "orbit", "opposite_radius");
    ev.escape_factor = get<double>(cfg, "orbit", "escape_factor");
    ev.max_xi = get<double>(cfg, "orbit", "max_xi");
    const auto spec = WaveSpec::with_density(c, a, U1, beta);
    const auto start = unstable_start(spec, get<double>(cfg, "orbit", "offset"));
    const auto res = integrate_orbit(spec, start, ev);
    const auto crit = critical_speeds(a * crowding(U1, beta));
    json outcome = {{"classification", to_string(res.outcome.cls)},
                    {"xi", res.outcome.xi},
                    {"terminal", {res.outcome.terminal.U, res.outcome.terminal.W, res.outcome.terminal.V}},
                    {"min_W", res.outcome.min_W},
                    {"c_star", crit.upper},
                    {"samples", res.trajectory.size()}};
    if (!out.empty()) {
        std::string csv = "xi,U,W,V\n";
        for (const auto& s : res.trajectory) {
            csv += fmt(s.xi) + "," + fmt(s.s.U) + "," + fmt(s.s.W) + "," + fmt(s.s.V) + "\n";
        }
        atomic_write(out / "orbit.csv", csv);
        atomic_write(out / "manifest.json",
                     json{{"config", cfg}, {"outcome", outcome}, {"files", {"orbit.csv"}}}.dump(2) + "\n");
    }
    return {{"experiment", "orbit"}, {"outcome", outcome}};
}

json run_experiment(const json& cfg, const fs::path& out, int workers) {
    const std::string exp = cfg.at("experiment").get<std::string>();
    if (exp == "simulate") return cmd_simulate(cfg, out);
    if (exp == "sweep-speeds") return cmd_sweep_speeds(cfg, out, workers);
    if (exp == "critical-curve") return cmd_critical_curve(cfg, out);
    if (exp == "inversion-curve") return cmd_inversion_curve(cfg, out, workers);
    if (exp == "bifurcation-map") return cmd_bifurcation_map(cfg, out);
    if (exp == "orbit") return cmd_orbit(cfg, out);
    throw ConfigError("unknown experiment '" + exp + "'");
}

}  // namespace twave
