#include "ldg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include "ldg/closed_forms.hpp"
#include "ldg/meridian.hpp"
#include "ldg/radial2d.hpp"

namespace ldg {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = std::numbers::pi;

struct KindSpec {
    std::string name;
    std::map<std::string, std::string> defaults;
};

// Keys accepted by every kind.
const std::map<std::string, std::string> kCommon = {{"seed", "1"}, {"checks", "1"}};

const std::vector<KindSpec>& kind_specs() {
    static const std::vector<KindSpec> specs = {
        {"verify-closed-forms",
         {{"N", "2048"}, {"square", "257"}, {"tol_energy", "1e-3"}, {"tol_order", "0.2"}, {"tol_potential", "1e-4"},
          {"tol_conformal", "1e-4"}, {"control_min", "1e-1"}, {"tol_cost", "1e-2"}}},
        {"gap-2d",
         {{"N", "2048"}, {"lambda", "0"}, {"noise", "0.01"}, {"tol", "5e-3"}, {"tol_gap", "1e-2"},
          {"tol_profile", "2e-2"}}},
        {"escape-sweep",
         {{"N", "256"}, {"lambda_min", "0"}, {"lambda_max", "950"}, {"samples", "20"}, {"tol", "5e-3"},
          {"tol_concavity", "1e-3"}}},
        {"lambda-star", {{"N", "256"}, {"tol", "0.5"}, {"tol_beta", "2e-2"}, {"tol_potential", "1e-6"}}},
        {"cigar",
         {{"h", "8"}, {"ell", "0.6"}, {"rho", "0.2"}, {"lambda", "1"}, {"spacing", "0.025"}, {"N", "256"},
          {"tol_beta", "2e-2"}, {"tol_midplane", "3e-2"}, {"tol_vertical", "5e-2"}, {"heights", ""},
          {"tol_slope", "0.05"}}},
        {"pancake",
         {{"h", "0.8"}, {"ell", "12"}, {"rho", "0.2"}, {"lambda", "1"}, {"spacing", "0.05"}, {"compare_ell", "6"},
          {"tol_beta", "1e-2"}, {"tol_monotone", "1e-3"}, {"widths", ""}, {"tol_k", "0.2"}}},
        {"shape-sweep",
         {{"h", "2"}, {"rho", "0.2"}, {"lambda", "1"}, {"spacing", "0.05"}, {"N", "256"},
          {"ells", "0.6,1,1.5,2,3,4,6,9,12"}, {"tol_coexist", "0.02"}, {"tol_stationary", "1e-2"}}},
    };
    return specs;
}

const KindSpec& spec_of(const std::string& kind) {
    for (const auto& s : kind_specs())
        if (s.name == kind) return s;
    throw ConfigError("unknown experiment kind '" + kind + "'");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(text.substr(used)) != "" || !std::isfinite(v))
        throw ConfigError("parameter '" + key + "' is not a number: '" + text + "'");
    return v;
}

// Envelope under construction: runs get sequential ids in submission order.
class Envelope {
  public:
    Envelope(const ExperimentConfig& cfg, std::string version, double grid_h)
        : cfg_(cfg), version_(std::move(version)), grid_h_(grid_h) {}

    std::string reserve() {
        std::ostringstream id;
        id << "run-" << std::setw(3) << std::setfill('0') << runs_.size();
        runs_.push_back(json::object());
        return id.str();
    }
    void store(const std::string& id, json run, double seconds) {
        run["id"] = id;
        runs_[index(id)] = std::move(run);
        timing_[id] = seconds;
    }
    const json& run(const std::string& id) const { return runs_[index(id)]; }

    void check(const std::string& name, double value, std::optional<double> reference, std::optional<double> tolerance,
               bool pass, std::vector<std::string> sources, const std::string& note = "") {
        json e = {{"name", name}, {"value", value}, {"pass", pass}, {"sources", std::move(sources)}};
        e["reference"] = reference ? json(*reference) : json(nullptr);
        e["tolerance"] = tolerance ? json(*tolerance) : json(nullptr);
        if (!note.empty()) e["note"] = note;
        summary_.push_back(std::move(e));
    }
    void value(const std::string& name, double value, std::vector<std::string> sources, const std::string& note = "") {
        json e = {{"name", name}, {"value", std::isfinite(value) ? json(value) : json(nullptr)}, {"pass", nullptr},
                  {"reference", nullptr}, {"tolerance", nullptr}, {"sources", std::move(sources)}};
        if (!note.empty()) e["note"] = note;
        summary_.push_back(std::move(e));
    }
    void artifact(const std::string& relative) { artifacts_.push_back(relative); }

    json finish(double wall_seconds, const std::string& started) const {
        json env;
        env["config"] = {{"kind", cfg_.kind}, {"params", cfg_.params}, {"output_dir", cfg_.output_dir}};
        env["version"] = version_;
        env["grid_h"] = grid_h_;
        env["runs"] = runs_;
        env["summary"] = summary_;
        env["artifacts"] = artifacts_;
        env["timing"] = {{"started_utc", started}, {"wall_seconds", wall_seconds}, {"runs", timing_}};
        return env;
    }

  private:
    static std::size_t index(const std::string& id) { return static_cast<std::size_t>(std::stoul(id.substr(4))); }
    const ExperimentConfig& cfg_;
    std::string version_;
    double grid_h_;
    json runs_ = json::array(), summary_ = json::array(), artifacts_ = json::array();
    json timing_ = json::object();
};

using Task = std::function<json()>;

// Runs tasks on `workers` threads; results keep task order. Rethrows the first failure.
std::vector<json> run_pool(const std::vector<Task>& tasks, int workers, std::vector<double>& seconds) {
    const std::size_t n = tasks.size();
    std::vector<json> out(n);
    std::vector<std::exception_ptr> errors(n);
    seconds.assign(n, 0.0);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t k = next++;
            if (k >= n) return;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                out[k] = tasks[k]();
            } catch (...) {
                errors[k] = std::current_exception();
            }
            seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const int count = static_cast<int>(std::min<std::size_t>(std::max(1, workers), n));
    std::vector<std::thread> pool;
    for (int i = 0; i < count; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// Submit a batch under fresh ids and store the results.
std::vector<std::string> submit(Envelope& env, const std::vector<std::function<json(const std::string&)>>& jobs,
                                int workers) {
    std::vector<std::string> ids;
    std::vector<Task> tasks;
    for (const auto& job : jobs) {
        ids.push_back(env.reserve());
        tasks.push_back([job, id = ids.back()] { return job(id); });
    }
    std::vector<double> seconds;
    auto results = run_pool(tasks, workers, seconds);
    for (std::size_t k = 0; k < ids.size(); ++k) env.store(ids[k], std::move(results[k]), seconds[k]);
    return ids;
}

json vec5(const UVector& u) {
    const auto a = u.arr();
    return json::array({a[0], a[1], a[2], a[3], a[4]});
}

UVector from_vec5(const json& j) {
    return UVector{j.at(0).get<double>(), {j.at(1).get<double>(), j.at(2).get<double>()},
                   {j.at(3).get<double>(), j.at(4).get<double>()}};
}

json report_2d(const MinResult2D& m) {
    return {{"total", m.energy},
            {"dirichlet", m.dirichlet},
            {"potential", m.potential},
            {"residual", m.residual},
            {"stationarity", m.stationarity},
            {"iterations", m.iterations},
            {"stop_reason", m.stop_reason},
            {"class", to_string(m.class_tag)},
            {"class_preserved", m.class_preserved},
            {"beta_min", m.beta_min},
            {"beta_max", m.beta_max}};
}

json report_classification(const Classification& c) {
    json sing = json::array();
    for (const auto& s : c.singularities) sing.push_back({{"position", s.position}, {"from", s.from}, {"to", s.to}});
    return {{"shape", to_string(c.shape)},
            {"singularities", sing},
            {"ring",
             {{"present", c.ring.present},
              {"beta_min", c.ring.beta_min},
              {"r", c.ring.r},
              {"z", c.ring.z},
              {"nodes", c.ring.nodes}}},
            {"beta_min", c.beta_min},
            {"beta_max", c.beta_max}};
}

json report_3d(const MinResult3D& m) {
    json j = {{"total", m.parts.total},
              {"dirichlet", m.parts.dirichlet},
              {"boundary", m.parts.boundary},
              {"potential", m.parts.potential},
              {"stationarity", m.stationarity},
              {"iterations", m.iterations},
              {"stop_reason", m.stop_reason},
              {"monotone", m.monotone},
              {"converged", m.converged}};
    j["classification"] = m.classification ? report_classification(*m.classification) : json(nullptr);
    if (!m.axis_error.empty()) j["axis_error"] = m.axis_error;
    return j;
}

struct Output {
    fs::path dir;
    std::string kind;
    std::string stem(const std::string& id, const std::string& what) const { return kind + "-" + id + "-" + what; }
};

// Field file plus CSV for a disc profile; returns relative paths.
std::vector<std::string> save_profile(const Output& out, const std::string& id, const std::string& what,
                                      const RadialProfile& p) {
    json f = {{"type", "profile"}, {"r", p.r}};
    json values = json::array();
    for (const auto& u : p.f) values.push_back(vec5(u));
    f["f"] = values;
    const std::string stem = out.stem(id, what);
    std::ofstream(out.dir / (stem + ".field.json")) << f.dump() << '\n';
    write_profile_csv(p, (out.dir / (stem + ".csv")).string());
    return {stem + ".field.json", stem + ".csv"};
}

std::vector<std::string> save_meridian(const Output& out, const std::string& id, const std::string& what,
                                       const MeridianField& F, double spacing) {
    const auto& g = F.grid;
    json f = {{"type", "meridian"}, {"h", g.geom.h},   {"ell", g.geom.ell}, {"rho", g.geom.rho},
              {"spacing", spacing}, {"nr", g.nr},      {"nz", g.nz}};
    json values = json::array();
    for (const auto& u : F.f) values.push_back(vec5(u));
    f["f"] = values;
    const std::string stem = out.stem(id, what);
    std::ofstream(out.dir / (stem + ".field.json")) << f.dump() << '\n';
    write_field_csv(F, (out.dir / (stem + ".csv")).string());
    write_mask_csv(g, (out.dir / (stem + "-mask.csv")).string());
    return {stem + ".field.json", stem + ".csv", stem + "-mask.csv"};
}

void attach(json& run, const std::vector<std::string>& files) {
    for (const auto& f : files) run["artifacts"].push_back(f);
}

void collect_artifacts(Envelope& env, const std::vector<std::string>& ids) {
    for (const auto& id : ids)
        if (env.run(id).contains("artifacts"))
            for (const auto& a : env.run(id)["artifacts"]) env.artifact(a.get<std::string>());
}

bool within(double value, double reference, double tol) { return std::abs(value - reference) <= tol; }

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------------------

void verify_closed_forms(const ExperimentConfig& cfg, Envelope& env, const Output&, int workers) {
    const int N = cfg.integer("N");
    if (N < 16 || N % 4) throw ConfigError("N must be a multiple of 4 and at least 16");
    const double tol = cfg.real("tol_energy"), tol_order = cfg.real("tol_order");
    struct Named {
        std::string name;
        PlanarField u;
        double reference;
    };
    const std::vector<Named> fields = {
        {"small solution", small_solution_uS, 2.0 * kPi},
        {"large solution mu1=0", [](cplx z) { return large_solution(0.0, z); }, 6.0 * kPi},
        {"large solution mu1=1", [](cplx z) { return large_solution(1.0, z); }, 6.0 * kPi},
        {"large solution mu1=sqrt3", [](cplx z) { return large_solution(std::sqrt(3.0), z); }, 6.0 * kPi},
        {"large solution mu1=5", [](cplx z) { return large_solution(5.0, z); }, 6.0 * kPi},
        {"large solution mu1=10+10i", [](cplx z) { return large_solution(cplx(10.0, 10.0), z); }, 6.0 * kPi},
    };
    std::vector<std::function<json(const std::string&)>> jobs;
    for (const auto& f : fields)
        jobs.push_back([f, N](const std::string&) {
            json energies = json::array();
            for (int n : {N / 4, N / 2, N}) energies.push_back(radial_energy(sample_profile(f.u, uniform_grid(n)), 0.0).dirichlet);
            return json{{"label", "Dirichlet energy of " + f.name},
                        {"intervals", {N / 4, N / 2, N}},
                        {"energies", energies}};
        });
    const auto ids = submit(env, jobs, workers);
    for (std::size_t k = 0; k < fields.size(); ++k) {
        const auto& e = env.run(ids[k])["energies"];
        const double e4 = e[0], e2 = e[1], e1 = e[2];
        env.check(fields[k].name + " energy", e1, fields[k].reference, tol, within(e1, fields[k].reference, tol), {ids[k]});
        const double order = std::log2((e4 - e2) / (e2 - e1));
        env.check(fields[k].name + " convergence order", order, 2.0, tol_order, within(order, 2.0, tol_order), {ids[k]});
    }

    const auto pid = submit(env,
                            {[N](const std::string&) {
                                const auto parts = radial_energy(sample_profile(small_solution_uS, uniform_grid(N)), 1.0);
                                return json{{"label", "potential integral of the small solution"},
                                            {"potential", parts.potential}};
                            }},
                            1)[0];
    const double exact = -(std::sqrt(6.0) / 4.0) * kPi + (std::sqrt(2.0) / 6.0) * kPi * kPi;
    const double pot = env.run(pid)["potential"];
    env.check("small solution potential integral", pot, exact, cfg.real("tol_potential"),
              within(pot, exact, cfg.real("tol_potential")), {pid});

    const SquareGrid square{cfg.integer("square"), 1.0};
    const SquareGrid fine{2 * cfg.integer("square") - 1, 1.0};
    // Members resolved on the base grid are gated; concentrated ones must show the rate.
    const std::vector<std::pair<std::string, cplx>> family = {
        {"mu1=0", 0.0}, {"mu1=1", 1.0}, {"mu1=sqrt3", std::sqrt(3.0)}, {"mu1=1.7+0.3i", {1.7, 0.3}}};
    const std::vector<std::pair<std::string, cplx>> concentrated = {{"mu1=5", 5.0}, {"mu1=10+10i", {10.0, 10.0}}};
    jobs.clear();
    for (const auto& [name, mu] : family)
        jobs.push_back([name, mu, square](const std::string&) {
            const PlanarField u = [mu](cplx z) { return large_solution(mu, z); };
            return json{{"label", "conformality of large solution " + name},
                        {"conformality", conformality_residual(u, square)},
                        {"isotropy", isotropy_residual(u, square)}};
        });
    for (const auto& [name, mu] : concentrated)
        jobs.push_back([name, mu, square, fine](const std::string&) {
            const PlanarField u = [mu](cplx z) { return large_solution(mu, z); };
            return json{{"label", "conformality of large solution " + name + " on two grids"},
                        {"conformality", conformality_residual(u, square)},
                        {"conformality_fine", conformality_residual(u, fine)},
                        {"isotropy", isotropy_residual(u, square)},
                        {"isotropy_fine", isotropy_residual(u, fine)}};
        });
    jobs.push_back([square](const std::string&) {
        const PlanarField control = [](cplx z) {
            return UVector{std::cos(z.real()), {std::sin(z.real()), 0.0}, {0.0, 0.0}};
        };
        return json{{"label", "conformality of the non-conformal control"},
                    {"conformality", conformality_residual(control, square)}};
    });
    const auto cids = submit(env, jobs, workers);
    const double tc = cfg.real("tol_conformal");
    for (std::size_t k = 0; k < family.size(); ++k) {
        const double c = env.run(cids[k])["conformality"], i = env.run(cids[k])["isotropy"];
        env.check("conformality residual " + family[k].first, c, 0.0, tc, c < tc, {cids[k]});
        env.check("isotropy residual " + family[k].first, i, 0.0, tc, i < tc, {cids[k]});
    }
    for (std::size_t k = 0; k < concentrated.size(); ++k) {
        const std::string& id = cids[family.size() + k];
        const json& r = env.run(id);
        for (const std::string what : {"conformality", "isotropy"}) {
            const double coarse = r[what], refined = r[what + "_fine"];
            env.value(what + " residual " + concentrated[k].first, coarse, {id});
            const double order = std::log2(coarse / refined);
            env.check(what + " refinement order " + concentrated[k].first, order, 2.0, std::nullopt, order >= 2.0,
                      {id}, "at least second order between the two grids");
        }
    }
    const double control = env.run(cids.back())["conformality"];
    env.check("control conformality residual", control, std::nullopt, cfg.real("control_min"),
              control > cfg.real("control_min"), {cids.back()}, "must exceed the tolerance");

    const auto bid = submit(env,
                            {[](const std::string&) {
                                json radii = json::array(), costs = json::array();
                                for (double r : {0.25, 0.5, 1.0}) {
                                    radii.push_back(r);
                                    costs.push_back(tangent_map_scaled_energy(r));
                                }
                                return json{{"label", "bubble energy and tangent map cost"},
                                            {"bubble_energy", bubble_energy_disc(1e4)},
                                            {"radii", radii},
                                            {"tangent_cost", costs}};
                            }},
                            1)[0];
    const json& b = env.run(bid);
    env.check("bubble energy", b["bubble_energy"], 4.0 * kPi, 1e-3, within(b["bubble_energy"], 4.0 * kPi, 1e-3), {bid});
    for (std::size_t k = 0; k < b["radii"].size(); ++k) {
        const double c = b["tangent_cost"][k];
        env.check("tangent map scaled energy r=" + b["radii"][k].dump(), c, 4.0 * kPi, cfg.real("tol_cost"),
                  within(c, 4.0 * kPi, cfg.real("tol_cost")), {bid});
    }
}

void gap_2d(const ExperimentConfig& cfg, Envelope& env, const Output& out, int workers) {
    const int N = cfg.integer("N");
    const double lambda = cfg.real("lambda"), noise = cfg.real("noise"), tol = cfg.real("tol");
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    auto job = [=, &out](DiscClass cls, Preset preset, std::uint64_t s) {
        return [=, &out](const std::string& id) {
            const auto grid = uniform_grid(N);
            const auto m = minimize_2d(lambda, cls, preset_profile(preset, grid, noise, s), default_options_2d());
            json run = {{"label", std::string("class ") + to_string(cls) + " minimum"}, {"energy", report_2d(m)}};
            double to_ghbar = 0.0, to_reflected = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                to_ghbar = std::max(to_ghbar, (m.profile.f[k] - g_hbar(grid[k])).norm());
                to_reflected = std::max(to_reflected, (m.profile.f[k] - g_hbar(-grid[k])).norm());
            }
            run["distance_to_ghbar"] = std::min(to_ghbar, to_reflected);
            attach(run, save_profile(out, id, "profile", m.profile));
            return run;
        };
    };
    const auto ids = submit(env, {job(DiscClass::S, Preset::SmallSolution, seed), job(DiscClass::N, Preset::GHbar, seed + 1)},
                            workers);
    const json &s = env.run(ids[0])["energy"], &n = env.run(ids[1])["energy"];
    const double es = s["total"], en = n["total"];
    env.check("class S minimum", es, 2.0 * kPi, tol, within(es, 2.0 * kPi, tol) && s["class_preserved"], {ids[0]});
    env.check("class N minimum", en, 6.0 * kPi, tol, within(en, 6.0 * kPi, tol) && n["class_preserved"], {ids[1]});
    env.check("gap", en - es, 4.0 * kPi, cfg.real("tol_gap"), within(en - es, 4.0 * kPi, cfg.real("tol_gap")), ids);
    const double d = env.run(ids[1])["distance_to_ghbar"];
    env.check("class N profile distance to g_hbar", d, 0.0, cfg.real("tol_profile"), d <= cfg.real("tol_profile"),
              {ids[1]});
    collect_artifacts(env, ids);
}

void escape_sweep(const ExperimentConfig& cfg, Envelope& env, const Output& out, int) {
    const int samples = cfg.integer("samples");
    if (samples < 3) throw ConfigError("samples must be at least 3");
    const double lo = cfg.real("lambda_min"), hi = cfg.real("lambda_max"), tol = cfg.real("tol");
    if (!(lo >= 0.0 && hi > lo)) throw ConfigError("need 0 <= lambda_min < lambda_max");
    std::vector<double> lambdas;
    for (int k = 0; k < samples; ++k) lambdas.push_back(lo + (hi - lo) * k / (samples - 1));
    const int N = cfg.integer("N");
    const auto id = submit(env,
                           {[&](const std::string& rid) {
                               const auto rows = energy_curve(lambdas, N, default_options_2d());
                               json table = json::array();
                               const std::string name = out.stem(rid, "curve") + ".csv";
                               std::ofstream csv(out.dir / name);
                               csv << "lambda,e_star,e,beta_min,beta_max,source\n" << std::setprecision(17);
                               for (const auto& r : rows) {
                                   table.push_back({{"lambda", r.lambda},
                                                    {"e_star", r.e_star},
                                                    {"e", r.e},
                                                    {"beta_min", r.beta_min},
                                                    {"beta_max", r.beta_max},
                                                    {"valid", r.valid},
                                                    {"source", r.source}});
                                   csv << r.lambda << ',' << r.e_star << ',' << r.e << ',' << r.beta_min << ','
                                       << r.beta_max << ',' << r.source << '\n';
                               }
                               return json{{"label", "class S energy curve"}, {"rows", table}, {"artifacts", {name}}};
                           }},
                           1)[0];
    const json& rows = env.run(id)["rows"];
    double min_step = 1e300, max_second = -1e300, lo_e = 1e300, hi_e = -1e300, worst_e = 0.0;
    bool valid = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double e = rows[k]["e_star"];
        valid = valid && rows[k]["valid"].get<bool>();
        lo_e = std::min(lo_e, e);
        hi_e = std::max(hi_e, e);
        worst_e = std::max(worst_e, std::abs(rows[k]["e"].get<double>() - std::min(6.0 * kPi, e)));
        if (k > 0) min_step = std::min(min_step, e - rows[k - 1]["e_star"].get<double>());
        if (k > 0 && k + 1 < rows.size())
            max_second = std::max(max_second, rows[k + 1]["e_star"].get<double>() - 2.0 * e +
                                                  rows[k - 1]["e_star"].get<double>());
    }
    env.check("smallest increment of e*", min_step, 0.0, 0.0, min_step >= 0.0 && valid, {id},
              "nondecreasing when nonnegative");
    env.check("smallest e*", lo_e, 2.0 * kPi, tol, lo_e >= 2.0 * kPi - tol, {id}, "lower end of the admissible range");
    env.check("largest e*", hi_e, 10.0 * kPi, tol, hi_e <= 10.0 * kPi + tol, {id}, "upper end of the admissible range");
    env.check("largest second difference of e*", max_second, 0.0, cfg.real("tol_concavity"),
              max_second <= cfg.real("tol_concavity"), {id});
    env.check("e vs min(6 pi, e*)", worst_e, 0.0, tol, worst_e <= tol, {id});
    collect_artifacts(env, {id});
}

void lambda_star(const ExperimentConfig& cfg, Envelope& env, const Output&, int workers) {
    const int N = cfg.integer("N");
    const double tol = cfg.real("tol");
    const auto id = submit(env,
                           {[&](const std::string&) {
                               const auto r = estimate_lambda_star(tol, N, default_options_2d());
                               return json{{"label", "bisection for the escape threshold"},
                                           {"lo", r.lo},
                                           {"hi", r.hi},
                                           {"seed_lo", r.seed_lo},
                                           {"seed_hi", r.seed_hi},
                                           {"solves", r.solves}};
                           }},
                           1)[0];
    const double lo = env.run(id)["lo"], hi = env.run(id)["hi"];
    const double lb = lambda_star_lower_bound(), ub = lambda_star_upper_bound();
    env.check("interval width", hi - lo, std::nullopt, tol, hi - lo <= tol, {id});
    env.check("interval lower end", lo, lb, std::nullopt, lo >= lb, {id}, "must not fall below the reference");
    env.check("interval upper end", hi, ub, std::nullopt, hi <= ub, {id}, "must not exceed the reference");
    env.value("threshold midpoint", 0.5 * (lo + hi), {id});

    // Global minimizer on either side: the lower of the two class minima.
    auto probe = [N](double lambda) {
        return [N, lambda](const std::string&) {
            const auto grid = uniform_grid(N);
            const auto s = class_s_minimum(lambda, N, default_options_2d());
            const auto n = minimize_2d(lambda, DiscClass::N, preset_profile(Preset::GHbar, grid), default_options_2d());
            const bool s_wins = s.energy < n.energy;
            return json{{"label", "global minimizer probe"},
                        {"lambda", lambda},
                        {"class_s", report_2d(s)},
                        {"class_n", report_2d(n)},
                        {"global", s_wins ? "S" : "N"}};
        };
    };
    const auto pids = submit(env, {probe(0.5 * lo), probe(2.0 * hi)}, workers);
    const double tb = cfg.real("tol_beta"), tp = cfg.real("tol_potential");
    const json& below = env.run(pids[0]);
    const json& gb = below["global"] == "S" ? below["class_s"] : below["class_n"];
    const double bmin = gb["beta_min"], bmax = gb["beta_max"];
    env.check("beta min of the global minimizer below the threshold", bmin, -1.0, tb, bmin <= -1.0 + tb, {pids[0]});
    env.check("beta max of the global minimizer below the threshold", bmax, 1.0, tb, bmax >= 1.0 - tb, {pids[0]});
    const json& above = env.run(pids[1]);
    const json& ga = above["global"] == "S" ? above["class_s"] : above["class_n"];
    const double amin = ga["beta_min"], apot = ga["potential"];
    env.check("beta min of the global minimizer above the threshold", amin, 1.0, tp, amin >= 1.0 - tp, {pids[1]});
    env.check("potential of the global minimizer above the threshold", apot, 0.0, tp, apot <= tp, {pids[1]});
}

// 3D solve with a seed; the split seed uses the class S disc minimizer at lambda ell^2.
using FieldHook = std::function<void(const MeridianField&, json&)>;

json solve_3d(const Output& out, const std::string& id, double h, double ell, double rho, double lambda,
              double spacing, int N, Seed seed, bool save, const FieldHook& hook = nullptr) {
    const auto grid = build_grid(build_geometry(h, ell, rho), spacing);
    json run = {{"label", std::string(to_string(seed)) + " seed"},
                {"h", h},
                {"ell", ell},
                {"rho", rho},
                {"lambda", lambda},
                {"spacing", spacing},
                {"nr", grid.nr},
                {"nz", grid.nz}};
    std::optional<MinResult2D> disc;
    if (seed == Seed::Split) {
        disc = class_s_minimum(lambda * ell * ell, N, default_options_2d());
        run["disc_energy"] = disc->energy;
    }
    const auto m = minimize_3d(lambda, seed_field(grid, seed, disc ? &disc->profile : nullptr), default_options_3d());
    run["energy"] = report_3d(m);
    if (disc) {
        const int j = grid.mid_row();
        double worst = 0.0;
        for (int i = 0; i < grid.nr; ++i)
            if (grid.inside(i, j)) worst = std::max(worst, (m.field.at(i, j) - disc->profile.at(grid.r(i) / ell)).norm());
        run["midplane_distance"] = worst;
    }
    run["interior_ratio"] = cylinder_energy(m.field, lambda, 0.5 * ell) / ell;
    if (hook) hook(m.field, run);
    if (save) attach(run, save_meridian(out, id, "field", m.field, spacing));
    return run;
}

const json& classification_of(const json& run) {
    static const json none = nullptr;
    return run["energy"].contains("classification") ? run["energy"]["classification"] : none;
}

void cigar(const ExperimentConfig& cfg, Envelope& env, const Output& out, int workers) {
    const double h = cfg.real("h"), ell = cfg.real("ell"), rho = cfg.real("rho"), lambda = cfg.real("lambda");
    const double spacing = cfg.real("spacing");
    const int N = cfg.integer("N");
    const auto heights = cfg.list("heights");
    std::vector<std::function<json(const std::string&)>> jobs;
    jobs.push_back([&](const std::string& id) {
        return solve_3d(out, id, h, ell, rho, lambda, spacing, N, Seed::Split, true,
                        [&](const MeridianField& F, json& run) {
                            IdentityParams p{0.0, std::min(1.0, 0.5 * (h - rho)), std::min(1.0, 0.5 * (h - rho)),
                                             0.0, 0.0};
                            if (ell < h - rho) {
                                p.r1 = ell;
                                p.r2 = h - rho;
                            }
                            const auto r = energy_identity_residuals(F, lambda, p);
                            run["identities"] = {{"vertical", r.vertical},
                                                 {"horizontal", r.horizontal},
                                                 {"radial", std::isnan(r.radial) ? json(nullptr) : json(r.radial)}};
                        });
    });
    for (double hh : heights)
        jobs.push_back([&, hh](const std::string& id) {
            return solve_3d(out, id, hh, ell, rho, lambda, spacing, N, Seed::Split, false);
        });
    const auto ids = submit(env, jobs, workers);
    const json& main = env.run(ids[0]);
    const json& cls = classification_of(main);
    if (cls.is_null()) {
        env.check("classification resolved", 0.0, 1.0, std::nullopt, false, {ids[0]},
                  main["energy"].value("axis_error", "axis unresolved"));
    } else {
        env.check("shape is split", cls["shape"] == "split" ? 1.0 : 0.0, 1.0, std::nullopt, cls["shape"] == "split",
                  {ids[0]});
        const auto& sing = cls["singularities"];
        int below = 0, above = 0;
        for (const auto& s : sing) (s["position"].get<double>() < 0.0 ? below : above)++;
        env.check("axis sign changes", static_cast<double>(sing.size()), std::nullopt, std::nullopt,
                  sing.size() % 2 == 0, {ids[0]}, "must be even");
        env.check("axis sign changes in the lower half", below, std::nullopt, std::nullopt, below % 2 == 1, {ids[0]},
                  "must be odd");
        env.check("axis sign changes in the upper half", above, std::nullopt, std::nullopt, above % 2 == 1, {ids[0]},
                  "must be odd");
        const double tb = cfg.real("tol_beta");
        env.check("beta min", cls["beta_min"], -1.0, tb, within(cls["beta_min"], -1.0, tb), {ids[0]});
        env.check("beta max", cls["beta_max"], 1.0, tb, within(cls["beta_max"], 1.0, tb), {ids[0]});
    }
    const double vert = main["identities"]["vertical"];
    env.check("vertical identity residual", vert, 0.0, cfg.real("tol_vertical"), vert <= cfg.real("tol_vertical"),
              {ids[0]});
    env.value("horizontal identity residual", main["identities"]["horizontal"], {ids[0]});
    if (!main["identities"]["radial"].is_null())
        env.value("radial identity residual", main["identities"]["radial"], {ids[0]});
    const double mid = main["midplane_distance"];
    env.check("midplane distance to the disc minimizer", mid, 0.0, cfg.real("tol_midplane"),
              mid <= cfg.real("tol_midplane"), {ids[0]});
    env.value("total energy", main["energy"]["total"], {ids[0]});
    env.value("disc energy", main["disc_energy"], {ids[0]});
    if (heights.size() >= 2) {
        std::vector<double> e;
        std::vector<std::string> src;
        for (std::size_t k = 0; k < heights.size(); ++k) {
            e.push_back(env.run(ids[k + 1])["energy"]["total"]);
            src.push_back(ids[k + 1]);
        }
        const double slope = fit_slope(heights, e);
        const double disc = std::min(6.0 * kPi, env.run(ids[1])["disc_energy"].get<double>());
        const double ts = cfg.real("tol_slope");
        env.check("energy slope in h", slope, 2.0 * disc, ts * 2.0 * disc,
                  std::abs(slope - 2.0 * disc) <= ts * 2.0 * disc, src, "tolerance is relative");
    }
    collect_artifacts(env, ids);
}

void pancake(const ExperimentConfig& cfg, Envelope& env, const Output& out, int workers) {
    const double h = cfg.real("h"), ell = cfg.real("ell"), rho = cfg.real("rho"), lambda = cfg.real("lambda");
    const double spacing = cfg.real("spacing"), compare = cfg.real("compare_ell");
    const auto widths = cfg.list("widths");
    std::vector<std::function<json(const std::string&)>> jobs;
    jobs.push_back([&](const std::string& id) {
        return solve_3d(out, id, h, ell, rho, lambda, spacing, 0, Seed::Torus, true,
                        [&](const MeridianField& F, json& run) {
                            std::vector<double> radii;
                            const double hi = ell - rho;
                            for (int k = 0; k < 40; ++k) radii.push_back(h + (hi - h) * (k + 0.5) / 40.0);
                            const auto mono = monotonicity_profile(F, lambda, radii);
                            run["monotonicity"] = {
                                {"radii", mono.radii}, {"ratios", mono.ratios}, {"worst_drop", mono.worst_drop}};
                        });
    });
    jobs.push_back([&](const std::string& id) {
        return solve_3d(out, id, h, compare, rho, lambda, spacing, 0, Seed::Torus, false);
    });
    for (double w : widths)
        jobs.push_back([&, w](const std::string& id) {
            return solve_3d(out, id, h, w, rho, lambda, spacing, 0, Seed::Torus, false);
        });
    const auto ids = submit(env, jobs, workers);
    const json& main = env.run(ids[0]);
    const json& cls = classification_of(main);
    if (cls.is_null()) {
        env.check("classification resolved", 0.0, 1.0, std::nullopt, false, {ids[0]},
                  main["energy"].value("axis_error", "axis unresolved"));
    } else {
        env.check("shape is torus", cls["shape"] == "torus" ? 1.0 : 0.0, 1.0, std::nullopt, cls["shape"] == "torus",
                  {ids[0]});
        env.check("axis singularities", static_cast<double>(cls["singularities"].size()), 0.0, std::nullopt,
                  cls["singularities"].empty(), {ids[0]});
        const double tb = cfg.real("tol_beta");
        const json& ring = cls["ring"];
        env.check("ring beta min", ring["beta_min"], -1.0, tb, ring["present"].get<bool>() && ring["beta_min"] <= -1.0 + tb,
                  {ids[0]}, "off-axis component below the threshold");
        env.value("ring radius", ring["r"], {ids[0]});
        env.value("ring height", ring["z"], {ids[0]});
    }
    const double ratio = main["interior_ratio"], ratio_c = env.run(ids[1])["interior_ratio"];
    env.check("interior energy ratio", ratio, 0.5 * ratio_c, std::nullopt, ratio < 0.5 * ratio_c, {ids[0], ids[1]},
              "must stay below half the value at the comparison width");
    const double drop = main["monotonicity"]["worst_drop"];
    env.check("monotonicity worst drop", drop, 0.0, cfg.real("tol_monotone"), drop <= cfg.real("tol_monotone"),
              {ids[0]});
    if (widths.size() >= 2) {
        std::vector<double> k;
        std::vector<std::string> src;
        for (std::size_t i = 0; i < widths.size(); ++i) {
            k.push_back(env.run(ids[i + 2])["energy"]["total"].get<double>() / widths[i]);
            src.push_back(ids[i + 2]);
        }
        const auto [lo, hi] = std::minmax_element(k.begin(), k.end());
        const double spread = (*hi - *lo) / *hi;
        env.value("largest energy per width", *hi, src);
        env.check("spread of energy per width", spread, 0.0, cfg.real("tol_k"), spread <= cfg.real("tol_k"), src);
    }
    collect_artifacts(env, ids);
}

void shape_sweep(const ExperimentConfig& cfg, Envelope& env, const Output& out, int workers) {
    const double h = cfg.real("h"), rho = cfg.real("rho"), lambda = cfg.real("lambda"), spacing = cfg.real("spacing");
    const int N = cfg.integer("N");
    auto ells = cfg.list("ells");
    if (ells.size() < 2) throw ConfigError("ells needs at least two widths");
    std::sort(ells.begin(), ells.end());
    std::vector<std::function<json(const std::string&)>> jobs;
    for (double ell : ells)
        for (Seed s : {Seed::Split, Seed::Torus})
            jobs.push_back([=, &out](const std::string& id) {
                return solve_3d(out, id, h, ell, rho, lambda, spacing, N, s, false);
            });
    const auto ids = submit(env, jobs, workers);
    const double tol_stat = cfg.real("tol_stationary"), tol_co = cfg.real("tol_coexist");
    auto shape = [](const json& run) {
        const json& c = classification_of(run);
        return c.is_null() ? std::string("unresolved") : c["shape"].get<std::string>();
    };
    std::string first_global, last_global;
    double last_split = std::nan(""), first_torus = std::nan("");
    bool witness = false;
    double best_gap = std::nan("");
    std::vector<std::string> witness_src;
    const std::string table = out.kind + "-table.csv";
    std::ofstream csv(out.dir / table);
    csv << "ell,split_seed_energy,split_seed_shape,torus_seed_energy,torus_seed_shape,global_shape\n"
        << std::setprecision(17);
    for (std::size_t k = 0; k < ells.size(); ++k) {
        const json &a = env.run(ids[2 * k]), &b = env.run(ids[2 * k + 1]);
        const double ea = a["energy"]["total"], eb = b["energy"]["total"];
        const std::string sa = shape(a), sb = shape(b);
        const std::string global = ea <= eb ? sa : sb;
        csv << ells[k] << ',' << ea << ',' << sa << ',' << eb << ',' << sb << ',' << global << '\n';
        if (k == 0) first_global = global;
        last_global = global;
        if (global == "split" && std::isnan(first_torus)) last_split = ells[k];
        if (global == "torus" && std::isnan(first_torus)) first_torus = ells[k];
        const bool stationary = a["energy"]["stationarity"].get<double>() <= tol_stat &&
                                b["energy"]["stationarity"].get<double>() <= tol_stat;
        if (sa == "split" && sb == "torus" && stationary) {
            const double gap = std::abs(ea - eb) / std::min(ea, eb);
            if (std::isnan(best_gap) || gap < best_gap) {
                best_gap = gap;
                witness_src = {ids[2 * k], ids[2 * k + 1]};
            }
            witness = witness || gap < tol_co;
        }
    }
    env.artifact(table);
    env.check("global shape at the smallest width is split", first_global == "split", 1.0, std::nullopt,
              first_global == "split", {ids[0], ids[1]});
    env.check("global shape at the largest width is torus", last_global == "torus", 1.0, std::nullopt,
              last_global == "torus", {ids[ids.size() - 2], ids.back()});
    env.value("last width with a split global state", last_split, ids, "sampled, not bracketed");
    env.value("first width with a torus global state", first_torus, ids, "sampled, not bracketed");
    env.check("coexistence energy gap", best_gap, 0.0, tol_co, witness,
              witness_src.empty() ? ids : witness_src, "opposite classes from the two seeds, relative gap");
}

MeridianField load_meridian(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    const json f = json::parse(in);
    if (f.at("type") != "meridian") throw std::runtime_error(path.string() + " is not a meridian field");
    const auto grid = build_grid(build_geometry(f.at("h"), f.at("ell"), f.at("rho")), f.at("spacing"));
    if (grid.nr != f.at("nr").get<int>() || grid.nz != f.at("nz").get<int>())
        throw std::runtime_error(path.string() + ": lattice does not match its parameters");
    MeridianField F{grid, {}};
    for (const auto& v : f.at("f")) F.f.push_back(from_vec5(v));
    if (F.f.size() != grid.kind.size()) throw std::runtime_error(path.string() + ": wrong number of values");
    return F;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

std::string fmt(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    if (v.is_number()) {
        std::ostringstream s;
        s << std::setprecision(8) << v.get<double>();
        return s.str();
    }
    return v.is_string() ? v.get<std::string>() : v.dump();
}
}  // namespace

// ---------------------------------------------------------------------------------------

double ExperimentConfig::real(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw ConfigError("missing parameter '" + key + "'");
    return parse_real(key, it->second);
}

int ExperimentConfig::integer(const std::string& key) const {
    const double v = real(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
}

std::vector<double> ExperimentConfig::list(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw ConfigError("missing parameter '" + key + "'");
    std::vector<double> out;
    std::stringstream ss(it->second);
    for (std::string item; std::getline(ss, item, ',');)
        if (!trim(item).empty()) out.push_back(parse_real(key, trim(item)));
    return out;
}

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = [] {
        std::vector<std::string> k;
        for (const auto& s : kind_specs()) k.push_back(s.name);
        return k;
    }();
    return kinds;
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (key == "kind")
            cfg.kind = value;
        else if (key == "output_dir")
            cfg.output_dir = value;
        else if (!cfg.params.emplace(key, value).second)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (cfg.kind.empty()) throw ConfigError("config has no kind");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    return parse_config(in);
}

ExperimentConfig complete_config(ExperimentConfig cfg) {
    const auto& spec = spec_of(cfg.kind);
    for (const auto& [key, value] : cfg.params)
        if (!spec.defaults.count(key) && !kCommon.count(key))
            throw ConfigError("unknown parameter '" + key + "' for kind " + cfg.kind);
    for (const auto& defaults : {spec.defaults, kCommon})
        for (const auto& [key, value] : defaults) cfg.params.emplace(key, value);
    for (const auto& [key, value] : cfg.params) {
        if (key.rfind("tol", 0) == 0 && !(cfg.real(key) > 0.0))
            throw ConfigError("tolerance '" + key + "' must be positive");
        if (value.find(',') == std::string::npos && !value.empty()) cfg.real(key);
        else cfg.list(key);
    }
    for (const char* key : {"h", "ell", "rho", "spacing", "N", "square", "samples"})
        if (cfg.params.count(key) && !(cfg.real(key) > 0.0))
            throw ConfigError(std::string("parameter '") + key + "' must be positive");
    if (cfg.params.count("lambda") && cfg.real("lambda") < 0.0) throw ConfigError("lambda must be nonnegative");
    return cfg;
}

json run_experiment(const ExperimentConfig& raw, const RunOptions& opts) {
    const ExperimentConfig cfg = complete_config(raw);
    if (cfg.output_dir.empty()) throw ConfigError("output directory not set");
    const Output out{fs::path(cfg.output_dir), cfg.kind};
    fs::create_directories(out.dir);
    const double grid_h = cfg.params.count("spacing") ? cfg.real("spacing") : 1.0 / cfg.real("N");
    Envelope env(cfg, opts.version, grid_h);
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const int workers = std::max(1, opts.workers);
    if (cfg.kind == "verify-closed-forms") verify_closed_forms(cfg, env, out, workers);
    else if (cfg.kind == "gap-2d") gap_2d(cfg, env, out, workers);
    else if (cfg.kind == "escape-sweep") escape_sweep(cfg, env, out, workers);
    else if (cfg.kind == "lambda-star") lambda_star(cfg, env, out, workers);
    else if (cfg.kind == "cigar") cigar(cfg, env, out, workers);
    else if (cfg.kind == "pancake") pancake(cfg, env, out, workers);
    else shape_sweep(cfg, env, out, workers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json envelope = env.finish(wall, started);
    std::ofstream(out.dir / (cfg.kind + ".json")) << envelope.dump(2) << '\n';
    return envelope;
}

bool envelope_passed(const json& envelope) {
    for (const auto& e : envelope.at("summary"))
        if (e.at("pass").is_boolean() && !e.at("pass").get<bool>()) return false;
    return true;
}

std::string render_report(const std::vector<std::string>& paths) {
    if (paths.empty()) throw ConfigError("report needs at least one envelope");
    struct Loaded {
        std::string path;
        json env;
    };
    std::vector<Loaded> ok;
    std::vector<std::string> missing;
    for (const auto& p : paths) {
        try {
            std::ifstream in(p);
            if (!in) throw std::runtime_error("unreadable");
            json env = json::parse(in);
            env.at("config").at("kind").get<std::string>();
            env.at("summary").is_array();
            env.at("grid_h").get<double>();
            ok.push_back({p, std::move(env)});
        } catch (const std::exception&) {
            missing.push_back(p);
        }
    }
    std::ostringstream md;
    md << "# Results\n";
    for (std::size_t k = 0; k < ok.size(); ++k) {
        const json& env = ok[k].env;
        const std::string kind = env["config"]["kind"];
        const double h = env["grid_h"];
        // Coarser partner of the same kind, the closest in spacing.
        const json* coarse = nullptr;
        double coarse_h = 0.0;
        for (const auto& other : ok) {
            const double oh = other.env["grid_h"];
            if (other.env["config"]["kind"] == kind && oh > h * (1.0 + 1e-9) && (!coarse || oh < coarse_h)) {
                coarse = &other.env;
                coarse_h = oh;
            }
        }
        md << "\n## " << kind << " (`" << ok[k].path << "`)\n\n";
        md << "version " << fmt(env.value("version", json("unknown"))) << ", grid spacing " << fmt(h) << "\n\n";
        md << "| landmark | reference | computed | tolerance | pass | source |";
        if (coarse) md << " Richardson |";
        md << "\n|---|---|---|---|---|---|" << (coarse ? "---|" : "") << "\n";
        for (const auto& e : env["summary"]) {
            std::string sources;
            for (const auto& s : e["sources"]) sources += (sources.empty() ? "" : " ") + s.get<std::string>();
            md << "| " << fmt(e["name"]) << " | " << fmt(e["reference"]) << " | " << fmt(e["value"]) << " | "
               << fmt(e["tolerance"]) << " | " << fmt(e["pass"]) << " | " << sources << " |";
            if (coarse) {
                std::string cell;
                for (const auto& c : (*coarse)["summary"])
                    if (c["name"] == e["name"] && c["value"].is_number() && e["value"].is_number()) {
                        const double fine = e["value"], rough = c["value"];
                        const double r = coarse_h / h;
                        cell = fmt(fine + (fine - rough) / (r * r - 1.0));
                    }
                md << ' ' << cell << " |";
            }
            md << '\n';
        }
        if (!env.value("artifacts", json::array()).empty()) {
            md << "\nArtifacts:\n";
            const fs::path dir = fs::path(ok[k].path).parent_path();
            for (const auto& a : env["artifacts"]) md << "- `" << (dir / a.get<std::string>()).string() << "`\n";
        }
    }
    if (!missing.empty()) {
        md << "\n## Unavailable\n\n";
        for (const auto& m : missing) md << "- `" << m << "`\n";
    }
    return md.str();
}

std::string field_csv(const std::string& field_path) {
    std::ifstream in(field_path);
    if (!in) throw std::runtime_error("cannot read " + field_path);
    const json f = json::parse(in);
    std::ostringstream out;
    if (f.at("type") == "profile") {
        RadialProfile p;
        p.r = f.at("r").get<std::vector<double>>();
        for (const auto& v : f.at("f")) p.f.push_back(from_vec5(v));
        write_profile_csv(p, out);
    } else {
        write_field_csv(load_meridian(field_path), out);
    }
    return out.str();
}

}  // namespace ldg
