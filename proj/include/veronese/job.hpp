#pragma once

// Batch verification jobs: a JSON job description selects an equation, a
// candidate solution, a probe domain and a set of checks; the runner sweeps
// the domain, delegates to the library and assembles a deterministic JSON
// report (schema "veronese-report/1").

#include <veronese/backlund.hpp>
#include <veronese/einstein_weyl.hpp>
#include <veronese/expr.hpp>
#include <veronese/nijenhuis.hpp>
#include <veronese/probe.hpp>
#include <veronese/solutions.hpp>
#include <veronese/webs.hpp>

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <thread>

namespace veronese {

using json = nlohmann::ordered_json;

class config_error : public std::runtime_error {
  public:
    config_error(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message), path(std::move(field_path))
    {}
    std::string path;
};

struct JobConfig {
    json raw;

    EquationSpec equation;
    bool has_equation = false;
    std::optional<NormalFormTag> equation_tag;
    double c1 = 1.0, c2 = 2.0, c3 = -3.0;

    ScalarField solution;
    bool has_solution = false;
    std::optional<SolutionTag> solution_tag;

    Box3 box;
    std::array<int, 3> grid{5, 5, 5};
    double margin = 1e-3;
    int samples = 0; // > 0: seeded random points instead of the grid
    bool has_domain = false;

    std::vector<std::string> checks;
    std::map<std::string, double> tolerances;
    std::vector<double> lambda_samples{-4.0, -1.0, 0.0, 0.5, 1.7};
    std::optional<NormalFormTag> operator_tag;

    bool has_backlund = false;
    Vec3 bl_source{}, bl_target{}, bl_base{};
    int bl_steps = 200;

    std::string sp_phi_expr;
    bool sp_solve = false;
    std::string sp_target_expr;
    double sp_guess = 0.0;

    std::uint64_t seed = 0;

    std::string plot_file;
    int plot_axis = 3;
    int plot_index = 0;

    double tolerance(const std::string& name, double fallback) const
    {
        auto it = tolerances.find(name);
        return it == tolerances.end() ? fallback : it->second;
    }
};

namespace detail {

inline std::optional<NormalFormTag> tag_from_string(const std::string& s)
{
    for (NormalFormTag t : all_normal_form_tags())
        if (s == to_string(t)) return t;
    return std::nullopt;
}

inline std::optional<SolutionTag> solution_tag_from_string(const std::string& s)
{
    for (SolutionTag t : all_solution_tags())
        if (s == to_string(t)) return t;
    return std::nullopt;
}

inline ScalarField expression_field(const json& j, const std::string& path)
{
    if (!j.is_string()) throw config_error(path, "expected an expression string");
    try {
        return parse_field(j.get<std::string>());
    } catch (const parse_error& e) {
        throw config_error(path, e.what());
    }
}

inline double number_at(const json& j, const std::string& path)
{
    if (!j.is_number()) throw config_error(path, "expected a number");
    return j.get<double>();
}

inline void parse_equation(JobConfig& cfg, const json& eq)
{
    if (!eq.is_object() || !eq.contains("family"))
        throw config_error("equation", "expected an object with a \"family\" member");
    const std::string fam = eq["family"].get<std::string>();
    cfg.c1 = eq.contains("c1") ? number_at(eq["c1"], "equation.c1") : 1.0;
    cfg.c2 = eq.contains("c2") ? number_at(eq["c2"], "equation.c2") : 2.0;
    cfg.c3 = eq.contains("c3") ? number_at(eq["c3"], "equation.c3") : -3.0;
    if (auto tag = tag_from_string(fam)) {
        cfg.equation_tag = *tag;
        cfg.equation = equation_from_tag(*tag, cfg.c1, cfg.c2, cfg.c3);
    } else if (fam == "A") {
        cfg.equation = EquationSpec::A(expression_field(eq.at("lambda1"), "equation.lambda1"),
                                       expression_field(eq.at("lambda2"), "equation.lambda2"),
                                       expression_field(eq.at("lambda3"), "equation.lambda3"));
    } else if (fam == "B") {
        cfg.equation = EquationSpec::B(expression_field(eq.at("lambda2"), "equation.lambda2"),
                                       expression_field(eq.at("lambda3"), "equation.lambda3"));
    } else if (fam == "C") {
        cfg.equation = EquationSpec::C(expression_field(eq.at("lambda3"), "equation.lambda3"));
    } else if (fam == "D") {
        cfg.equation = EquationSpec::D(expression_field(eq.at("a"), "equation.a"),
                                       expression_field(eq.at("b"), "equation.b"),
                                       expression_field(eq.at("lambda3"), "equation.lambda3"));
    } else if (fam == "hirota") {
        try {
            cfg.equation = EquationSpec::hirota(number_at(eq.at("a"), "equation.a"),
                                                number_at(eq.at("b"), "equation.b"),
                                                number_at(eq.at("c"), "equation.c"));
        } catch (const domain_error& e) {
            throw config_error("equation", e.what());
        }
    } else if (fam == "hyperCR") {
        cfg.equation = EquationSpec::hyper_cr();
    } else {
        throw config_error("equation.family", "unknown family \"" + fam + "\"");
    }
    cfg.has_equation = true;
}

inline Vec3 vec_at(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 3) throw config_error(path, "expected an array of 3 numbers");
    return {number_at(j[0], path), number_at(j[1], path), number_at(j[2], path)};
}

} // namespace detail

inline JobConfig parse_job_config(const json& j)
{
    JobConfig cfg;
    cfg.raw = j;
    if (!j.is_object()) throw config_error("$", "job configuration must be a JSON object");

    if (j.contains("equation")) detail::parse_equation(cfg, j["equation"]);

    if (j.contains("solution")) {
        const json& sol = j["solution"];
        if (sol.is_object() && sol.contains("library")) {
            const std::string name = sol["library"].get<std::string>();
            auto tag = detail::solution_tag_from_string(name);
            if (!tag) throw config_error("solution.library", "unknown builtin \"" + name + "\"");
            cfg.solution_tag = *tag;
            const ExactSolutionCase c = exact_solution(*tag);
            cfg.solution = c.solution;
            if (!cfg.has_equation) {
                cfg.equation = c.spec;
                cfg.has_equation = true;
            }
            if (!cfg.has_domain) {
                cfg.box = c.probe_box;
                cfg.has_domain = true;
            }
        } else if (sol.is_object() && sol.contains("expression")) {
            cfg.solution = detail::expression_field(sol["expression"], "solution.expression");
        } else {
            throw config_error("solution", "expected {\"library\": tag} or {\"expression\": text}");
        }
        cfg.has_solution = true;
    }

    if (j.contains("domain")) {
        const json& d = j["domain"];
        if (!d.is_object()) throw config_error("domain", "expected an object");
        if (d.contains("box")) {
            const json& b = d["box"];
            if (!b.is_array() || b.size() != 3)
                throw config_error("domain.box", "expected three [lo, hi] pairs");
            for (int i = 0; i < 3; ++i) {
                if (!b[i].is_array() || b[i].size() != 2)
                    throw config_error("domain.box", "expected three [lo, hi] pairs");
                cfg.box.lo[i] = detail::number_at(b[i][0], "domain.box");
                cfg.box.hi[i] = detail::number_at(b[i][1], "domain.box");
                if (!(cfg.box.lo[i] <= cfg.box.hi[i]))
                    throw config_error("domain.box", "box is empty on axis " + std::to_string(i + 1));
            }
            cfg.has_domain = true;
        }
        if (d.contains("grid")) {
            const json& g = d["grid"];
            if (!g.is_array() || g.size() != 3)
                throw config_error("domain.grid", "expected three positive integers");
            for (int i = 0; i < 3; ++i) {
                cfg.grid[i] = g[i].get<int>();
                if (cfg.grid[i] < 1)
                    throw config_error("domain.grid", "grid resolution must be positive");
            }
        }
        if (d.contains("margin")) {
            cfg.margin = detail::number_at(d["margin"], "domain.margin");
            if (cfg.margin < 0.0) throw config_error("domain.margin", "margin must be nonnegative");
        }
        if (d.contains("samples")) {
            cfg.samples = d["samples"].get<int>();
            if (cfg.samples < 1) throw config_error("domain.samples", "sample count must be positive");
        }
    }
    if (!cfg.has_domain && cfg.has_solution && !cfg.solution_tag)
        throw config_error("domain", "a domain box is required for expression solutions");

    if (j.contains("checks")) {
        if (!j["checks"].is_array()) throw config_error("checks", "expected an array of names");
        for (const auto& c : j["checks"]) cfg.checks.push_back(c.get<std::string>());
    }
    static const char* known_checks[] = {"residual",  "nondegeneracy", "lax",
                                         "einstein_weyl", "nijenhuis", "conjugation",
                                         "backlund",  "self_propelled"};
    for (const std::string& c : cfg.checks) {
        bool ok = false;
        for (const char* k : known_checks) ok = ok || c == k;
        if (!ok) throw config_error("checks", "unknown check \"" + c + "\"");
    }

    if (j.contains("tolerances")) {
        if (!j["tolerances"].is_object()) throw config_error("tolerances", "expected an object");
        for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
            const double v = detail::number_at(it.value(), "tolerances." + it.key());
            if (!(v > 0.0)) throw config_error("tolerances." + it.key(), "tolerance must be positive");
            cfg.tolerances[it.key()] = v;
        }
    }

    if (j.contains("lambda_samples")) {
        cfg.lambda_samples.clear();
        for (const auto& v : j["lambda_samples"])
            cfg.lambda_samples.push_back(detail::number_at(v, "lambda_samples"));
        if (cfg.lambda_samples.empty())
            throw config_error("lambda_samples", "at least one sample is required");
    }

    if (j.contains("operator")) {
        const std::string name = j["operator"].get<std::string>();
        cfg.operator_tag = detail::tag_from_string(name);
        if (!cfg.operator_tag)
            throw config_error("operator", "unknown normal form \"" + name + "\"");
    }

    if (j.contains("backlund")) {
        const json& b = j["backlund"];
        cfg.bl_source = detail::vec_at(b.at("source"), "backlund.source");
        cfg.bl_target = detail::vec_at(b.at("target"), "backlund.target");
        cfg.bl_base = b.contains("base") ? detail::vec_at(b["base"], "backlund.base") : Vec3{};
        cfg.bl_steps = b.contains("steps") ? b["steps"].get<int>() : 200;
        if (cfg.bl_steps < 1) throw config_error("backlund.steps", "step count must be positive");
        cfg.has_backlund = true;
    }

    if (j.contains("self_propelled")) {
        const json& s = j["self_propelled"];
        if (s.contains("phi")) {
            cfg.sp_phi_expr = s["phi"].get<std::string>();
            detail::expression_field(s["phi"], "self_propelled.phi"); // validate now
        } else if (s.contains("solve")) {
            cfg.sp_solve = true;
            cfg.sp_target_expr = s["solve"].at("target").get<std::string>();
            detail::expression_field(s["solve"]["target"], "self_propelled.solve.target");
            cfg.sp_guess = s["solve"].contains("guess")
                               ? detail::number_at(s["solve"]["guess"], "self_propelled.solve.guess")
                               : 0.0;
        } else {
            throw config_error("self_propelled", "expected \"phi\" or \"solve\"");
        }
    }

    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();

    if (j.contains("plot")) {
        const json& p = j["plot"];
        cfg.plot_file = p.at("file").get<std::string>();
        cfg.plot_axis = p.contains("axis") ? p["axis"].get<int>() : 3;
        cfg.plot_index = p.contains("index") ? p["index"].get<int>() : 0;
        if (cfg.plot_axis < 1 || cfg.plot_axis > 3)
            throw config_error("plot.axis", "axis must be 1, 2 or 3");
    }

    return cfg;
}

inline JobConfig parse_job_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw config_error("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_job_config(j);
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    std::string mode;     // "max_below" or "min_above"
    double value = 0.0;
    Vec3 argpoint{};
    double tolerance = 0.0;
    bool pass = false;
    int points = 0;
    int skipped = 0;
    std::vector<std::string> skip_reasons; // first few
    double runtime_ms = 0.0;
    json extras;
};

struct Report {
    std::uint64_t seed = 0;
    json config;
    std::vector<CheckResult> checks;
    double skipped_fraction = 0.0;
    bool pass = true;

    json to_json() const
    {
        json r;
        r["schema"] = "veronese-report/1";
        r["seed"] = seed;
        r["config"] = config;
        r["checks"] = json::array();
        for (const CheckResult& c : checks) {
            json jc;
            jc["name"] = c.name;
            jc["mode"] = c.mode;
            jc["value"] = c.value;
            jc["argmax"] = {c.argpoint[0], c.argpoint[1], c.argpoint[2]};
            jc["tolerance"] = c.tolerance;
            jc["pass"] = c.pass;
            jc["points"] = c.points;
            jc["skipped"] = c.skipped;
            if (!c.skip_reasons.empty()) jc["skip_reasons"] = c.skip_reasons;
            if (!c.extras.is_null()) jc["extras"] = c.extras;
            jc["runtime_ms"] = c.runtime_ms;
            r["checks"].push_back(jc);
        }
        r["skipped_fraction"] = skipped_fraction;
        r["pass"] = pass;
        return r;
    }
};

// Exit status contract: 0 all-pass, 1 any check failed, 2 invalid config
// (raised before a report exists), 3 more than half of the points skipped.
inline int exit_code(const Report& r)
{
    if (r.skipped_fraction > 0.5) return 3;
    return r.pass ? 0 : 1;
}

namespace detail {

struct PointOutcome {
    bool ok = false;
    double value = 0.0;
    std::string reason;
};

// Evaluate per-point values across worker threads; the reduction stays
// serial and index-ordered so reports are reproducible for any job count.
inline std::vector<PointOutcome> sweep(const std::vector<Vec3>& pts, int jobs,
                                       const std::function<double(const Vec3&)>& fn)
{
    std::vector<PointOutcome> out(pts.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                out[i].value = fn(pts[i]);
                out[i].ok = true;
            } catch (const std::exception& e) {
                out[i].reason = e.what();
            }
        }
    };
    if (jobs <= 1 || pts.size() < 2) {
        worker(0, pts.size());
        return out;
    }
    const std::size_t n = pts.size();
    const std::size_t chunk = (n + jobs - 1) / jobs;
    std::vector<std::thread> threads;
    for (std::size_t b = 0; b < n; b += chunk)
        threads.emplace_back(worker, b, std::min(n, b + chunk));
    for (auto& t : threads) t.join();
    return out;
}

inline CheckResult reduce(const std::string& name, const std::string& mode, double tol,
                          const std::vector<Vec3>& pts, const std::vector<PointOutcome>& vals)
{
    CheckResult r;
    r.name = name;
    r.mode = mode;
    r.tolerance = tol;
    r.points = static_cast<int>(pts.size());
    bool first = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!vals[i].ok) {
            ++r.skipped;
            if (r.skip_reasons.size() < 3) r.skip_reasons.push_back("skipped: " + vals[i].reason);
            continue;
        }
        const double v = vals[i].value;
        const bool better = first || (mode == "max_below" ? v > r.value : v < r.value);
        if (better) {
            r.value = v;
            r.argpoint = pts[i];
            first = false;
        }
    }
    if (first) {
        r.pass = false; // every point skipped
        return r;
    }
    r.pass = mode == "max_below" ? r.value <= tol : r.value >= tol;
    return r;
}

inline void write_ppm_slice(const JobConfig& cfg, const std::vector<Vec3>& pts,
                            const std::vector<PointOutcome>& vals)
{
    // one grid slice, grayscale by log10 |value|
    const int axis = cfg.plot_axis - 1;
    const int u = axis == 0 ? 1 : 0;
    const int v = axis == 2 ? 1 : 2;
    const int w = cfg.grid[u], h = cfg.grid[v];
    std::vector<double> img(static_cast<std::size_t>(w) * h, -16.0);
    const double step =
        cfg.grid[axis] <= 1 ? 0.0 : (cfg.box.hi[axis] - cfg.box.lo[axis]) / (cfg.grid[axis] - 1);
    const double slice = cfg.box.lo[axis] + step * cfg.plot_index;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!vals[i].ok) continue;
        if (std::fabs(pts[i][axis] - slice) > 1e-12 + 0.25 * std::fabs(step)) continue;
        auto grid_index = [&](int ax) {
            const double s = cfg.grid[ax] <= 1
                                 ? 0.0
                                 : (pts[i][ax] - cfg.box.lo[ax]) / (cfg.box.hi[ax] - cfg.box.lo[ax]) *
                                       (cfg.grid[ax] - 1);
            return static_cast<int>(s + 0.5);
        };
        const int iu = grid_index(u), iv = grid_index(v);
        if (iu < 0 || iu >= w || iv < 0 || iv >= h) continue;
        img[static_cast<std::size_t>(iv) * w + iu] =
            std::log10(std::max(std::fabs(vals[i].value), 1e-16));
    }
    std::ofstream os(cfg.plot_file, std::ios::binary);
    os << "P5\n" << w << " " << h << "\n255\n";
    for (double lv : img) {
        const double t = (lv + 16.0) / 16.0; // log10 in [-16, 0]
        const int px = std::max(0, std::min(255, static_cast<int>(t * 255.0)));
        os.put(static_cast<char>(px));
    }
}

} // namespace detail

inline Report run(const JobConfig& cfg, int jobs = 1)
{
    Report report;
    report.seed = cfg.seed;
    report.config = cfg.raw;

    // probe points
    PoleGauge gauge;
    Box3 box = cfg.box;
    if (cfg.solution_tag) {
        const ExactSolutionCase c = exact_solution(*cfg.solution_tag);
        gauge = c.pole;
        if (!cfg.has_domain) box = c.probe_box;
    } else if (cfg.equation_tag) {
        gauge = pole_gauge(NormalFormSpec{*cfg.equation_tag, cfg.c1, cfg.c2, cfg.c3});
    }
    std::vector<Vec3> pts;
    if (cfg.samples > 0) {
        pts = sample_pole_free(box, cfg.samples, cfg.seed, gauge, cfg.margin);
    } else {
        for (const Vec3& p : grid_points(box, cfg.grid))
            if (!gauge || gauge(p) >= cfg.margin) pts.push_back(p);
    }
    if (pts.empty()) throw config_error("domain", "no probe points survive the margin");

    // user-supplied complex-family data must be a harmonic-conjugate pair
    if (cfg.has_equation && cfg.equation.family == Family::D) {
        for (std::size_t i = 0; i < pts.size() && i < 5; ++i) {
            try {
                if (harmonic_conjugacy_residual(cfg.equation.a, cfg.equation.b, pts[i]) > 1e-8)
                    throw config_error("equation.a",
                                       "the pair (a, b) is not harmonic-conjugate on the domain");
            } catch (const evaluation_error&) {
                // pole at this probe; other points decide
            }
        }
    }

    long total = 0, skipped = 0;
    bool plotted = false;

    for (const std::string& name : cfg.checks) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult res;

        auto need_equation = [&]() {
            if (!cfg.has_equation) throw config_error("equation", "check \"" + name + "\" needs one");
        };
        auto need_solution = [&]() {
            if (!cfg.has_solution) throw config_error("solution", "check \"" + name + "\" needs one");
        };
        auto need_tag = [&]() -> NormalFormTag {
            if (cfg.operator_tag) return *cfg.operator_tag;
            if (cfg.equation_tag) return *cfg.equation_tag;
            throw config_error("operator", "check \"" + name + "\" needs a normal-form tag");
        };

        if (name == "residual") {
            need_equation();
            need_solution();
            const auto vals = detail::sweep(pts, jobs, [&](const Vec3& p) {
                return std::fabs(pde_residual(cfg.equation, cfg.solution, p));
            });
            res = detail::reduce(name, "max_below", cfg.tolerance("residual", 1e-10), pts, vals);
            if (!plotted && !cfg.plot_file.empty() && cfg.samples == 0) {
                detail::write_ppm_slice(cfg, pts, vals);
                plotted = true;
            }
        } else if (name == "nondegeneracy") {
            need_equation();
            need_solution();
            const auto vals = detail::sweep(pts, jobs, [&](const Vec3& p) {
                return std::fabs(nondegeneracy_det(cfg.equation, cfg.solution, p));
            });
            res = detail::reduce(name, "min_above", cfg.tolerance("nondegeneracy_min", 1e-6), pts,
                                 vals);
        } else if (name == "lax") {
            need_equation();
            need_solution();
            const auto vals = detail::sweep(pts, jobs, [&](const Vec3& p) {
                double worst = 0.0;
                for (double lam : cfg.lambda_samples)
                    worst = std::max(worst,
                                     std::fabs(lax_closure_residual(cfg.equation, cfg.solution, p, lam)));
                return worst;
            });
            res = detail::reduce(name, "max_below", cfg.tolerance("lax", 1e-9), pts, vals);
        } else if (name == "einstein_weyl") {
            need_equation();
            need_solution();
            if (cfg.equation.family != Family::A && cfg.equation.family != Family::Hirota)
                throw config_error("equation.family", "einstein_weyl needs family A data");
            const WeylStructure W =
                assemble_weyl_A(cfg.equation.l1, cfg.equation.l2, cfg.equation.l3, cfg.solution);
            const auto vals = detail::sweep(
                pts, jobs, [&](const Vec3& p) { return einstein_weyl_residual(W, p); });
            res = detail::reduce(name, "max_below", cfg.tolerance("einstein_weyl", 1e-7), pts, vals);
        } else if (name == "nijenhuis") {
            const NormalFormSpec spec{need_tag(), cfg.c1, cfg.c2, cfg.c3};
            const OperatorField J = normal_form_operator(spec);
            const auto vals = detail::sweep(pts, jobs, [&](const Vec3& p) {
                double worst = 0.0;
                for (int i = 1; i <= 3; ++i)
                    for (int j = i + 1; j <= 3; ++j)
                        worst = std::max(worst,
                                         max_abs(nijenhuis_tensor(J, coordinate_vector_field(i),
                                                                  coordinate_vector_field(j), p)));
                return worst;
            });
            res = detail::reduce(name, "max_below", cfg.tolerance("nijenhuis", 1e-10), pts, vals);
        } else if (name == "conjugation") {
            const NormalFormSpec spec{need_tag(), cfg.c1, cfg.c2, cfg.c3};
            const auto vals = detail::sweep(pts, jobs, [&](const Vec3& p) {
                return frobenius_conjugation_residual(spec, p);
            });
            res = detail::reduce(name, "max_below", cfg.tolerance("conjugation", 1e-10), pts, vals);
        } else if (name == "backlund") {
            need_solution();
            if (!cfg.has_backlund)
                throw config_error("backlund", "check \"backlund\" needs source/target triples");
            const BacklundData data = BacklundData::from_constants(cfg.bl_source, cfg.bl_target);
            const OneFormField w = transform_one_form(data, cfg.solution);
            const auto vals = detail::sweep(
                pts, jobs, [&](const Vec3& p) { return std::fabs(frobenius_residual_scaled(w, p)); });
            res = detail::reduce(name, "max_below", cfg.tolerance("backlund", 1e-9), pts, vals);
            // traced transform probed at a few corners: finite-difference
            // gradients of F feed the linking equations
            double pair_worst = 0.0;
            const double h = 1e-4;
            int probes = 0;
            for (std::size_t i = 0; i < pts.size() && probes < 4; i += std::max<std::size_t>(1, pts.size() / 4), ++probes) {
                const Vec3 p = pts[i];
                try {
                    Vec3 gradF;
                    for (int a = 0; a < 3; ++a) {
                        Vec3 pp = p, pm = p;
                        pp[a] += h;
                        pm[a] -= h;
                        gradF[a] = (integrate_transform(data, cfg.solution, cfg.bl_base, pp, cfg.bl_steps) -
                                    integrate_transform(data, cfg.solution, cfg.bl_base, pm, cfg.bl_steps)) /
                                   (2.0 * h);
                    }
                    const Vec3 df = cfg.solution(p).grad;
                    const double l1 = data.lambda[0].value(p), l2 = data.lambda[1].value(p),
                                 l3 = data.lambda[2].value(p);
                    const double L1 = data.Lambda[0].value(p), L2 = data.Lambda[1].value(p),
                                 L3 = data.Lambda[2].value(p);
                    const double scale = std::max(1.0, norm(df) * norm(gradF));
                    pair_worst = std::max(
                        {pair_worst,
                         std::fabs(l1 * L2 * df[0] * gradF[1] - l2 * L1 * df[1] * gradF[0]) / scale,
                         std::fabs(l1 * L3 * df[0] * gradF[2] - l3 * L1 * df[2] * gradF[0]) / scale});
                } catch (const std::exception&) {
                    // corner outside the traced domain; the sweep already records skips
                }
            }
            res.extras = json{{"pair_fd_max", pair_worst},
                              {"pair_fd_tolerance", cfg.tolerance("backlund_pair", 1e-4)}};
            res.pass = res.pass && pair_worst <= cfg.tolerance("backlund_pair", 1e-4);
        } else if (name == "self_propelled") {
            const auto frame = sl2_frame();
            ScalarField phi;
            json extras;
            if (cfg.sp_solve) {
                const ScalarField target = parse_field(cfg.sp_target_expr);
                const double guess = cfg.sp_guess;
                phi = self_propelled_field(cross_ratio_integral(), target, [guess](const Vec3&) {
                    return guess;
                });
                const WebFirstIntegral F = cross_ratio_integral();
                const auto defects = detail::sweep(pts, jobs, [&](const Vec3& p) {
                    const double t = phi.value(p);
                    return std::fabs(F.value(p, t) - target.value({t, 0.0, 0.0}));
                });
                auto dres = detail::reduce("defect", "max_below",
                                           cfg.tolerance("solver_defect", 1e-10), pts, defects);
                extras["solver_defect_max"] = dres.value;
                extras["solver_defect_pass"] = dres.pass;
            } else if (!cfg.sp_phi_expr.empty()) {
                phi = parse_field(cfg.sp_phi_expr);
            } else {
                throw config_error("self_propelled", "check needs \"phi\" or \"solve\"");
            }
            const auto vals = detail::sweep(pts, jobs, [&](const Vec3& p) {
                const auto r = self_propelled_residual(frame, phi, p);
                return std::max(std::fabs(r[0]), std::fabs(r[1]));
            });
            res = detail::reduce(name, "max_below", cfg.tolerance("self_propelled", 1e-8), pts, vals);
            if (!extras.is_null()) {
                res.extras = extras;
                if (extras.contains("solver_defect_pass"))
                    res.pass = res.pass && extras["solver_defect_pass"].get<bool>();
            }
        } else {
            throw config_error("checks", "unknown check \"" + name + "\"");
        }

        const auto t1 = std::chrono::steady_clock::now();
        res.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        total += res.points;
        skipped += res.skipped;
        report.pass = report.pass && res.pass;
        report.checks.push_back(std::move(res));
    }

    report.skipped_fraction = total == 0 ? 0.0 : static_cast<double>(skipped) / total;
    if (report.skipped_fraction > 0.5) report.pass = false;
    return report;
}

// JSON description of the report format, served by `report --schema`.
inline json report_schema()
{
    json s;
    s["schema"] = "veronese-report/1";
    s["description"] = "batch verification report for Veronese-web PDE checks";
    s["fields"] = {
        {"schema", "report format identifier, always \"veronese-report/1\""},
        {"seed", "64-bit seed used for random probe modes"},
        {"config", "verbatim echo of the job configuration"},
        {"checks", "one entry per requested check"},
        {"checks[].mode", "max_below: value = max over grid, pass iff value <= tolerance; "
                          "min_above: value = min over grid, pass iff value >= tolerance"},
        {"checks[].argmax", "probe point attaining the extremal value"},
        {"checks[].skipped", "points whose evaluation raised an error"},
        {"skipped_fraction", "skipped points over all checks; above 0.5 the run exits 3"},
        {"pass", "conjunction of all check verdicts"}};
    s["exit_codes"] = {{"0", "all checks passed"},
                       {"1", "at least one check failed"},
                       {"2", "invalid configuration"},
                       {"3", "more than half of the probe points were skipped"}};
    return s;
}

} // namespace veronese
