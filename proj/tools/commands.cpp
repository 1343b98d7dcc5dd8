#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "checks.hpp"
#include "optcompact/cost.hpp"
#include "optcompact/errors.hpp"
#include "optcompact/io.hpp"
#include "optcompact/optimizer.hpp"
#include "optcompact/pde.hpp"
#include "optcompact/spectral.hpp"
#include "optcompact/stability.hpp"

namespace fs = std::filesystem;

namespace optcompact::cli {

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    std::string format = "csv";
    bool force = false;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

// a run that hit a blow-up or failed its stability pre-check
struct RunAborted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Writer {
public:
    Writer(const Options& o, std::ostream& log) : dir_(o.out), force_(o.force), log_(log) {
        fs::create_directories(dir_);
    }
    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        write_text_file(p, content, force_);
        log_ << "wrote " << p.string() << "\n";
    }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

private:
    fs::path dir_;
    bool force_;
    std::ostream& log_;
};

template <class Fn>
void parallel_for(int n, int threads, Fn fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    // rethrow the first failure in index order so errors are deterministic
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

json load_config(const Options& o, bool required) {
    if (o.config.empty()) {
        if (required) throw SpecError("--config is required for this command");
        return json::object();
    }
    return read_json_file(o.config);
}

json csv_to_json(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    json rows = json::array();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string c;
        json row = json::array();
        while (std::getline(ss, c, ',')) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (!c.empty() && end == c.c_str() + c.size()) row.push_back(v);
            else row.push_back(c);
        }
        rows.push_back(row);
    }
    return json{{"columns", cols}, {"rows", rows}};
}

void emit_table(Writer& w, const Options& o, const std::string& stem, const std::string& csv) {
    if (o.format == "json") w.write_json(stem + ".json", csv_to_json(csv));
    else w.write(stem + ".csv", csv);
}

json dt_options_json(const DtSearchOptions& s) {
    return json{{"dtLo", s.dtLo},         {"dtHi", s.dtHi},           {"pointsPerDecade", s.pointsPerDecade},
                {"relWidth", s.relWidth}, {"tolerance", s.tolerance}, {"rayCeiling", s.rayCeiling},
                {"zeroClamp", s.zeroClamp}};
}

DtSearchOptions dt_options_from(const json& j) {
    DtSearchOptions s;
    if (!j.is_object()) return s;
    s.dtLo = j.value("dtLo", s.dtLo);
    s.dtHi = j.value("dtHi", s.dtHi);
    s.pointsPerDecade = j.value("pointsPerDecade", s.pointsPerDecade);
    s.relWidth = j.value("relWidth", s.relWidth);
    s.tolerance = j.value("tolerance", s.tolerance);
    s.rayCeiling = j.value("rayCeiling", s.rayCeiling);
    s.zeroClamp = j.value("zeroClamp", s.zeroClamp);
    return s;
}

// ---- derive ----

int cmd_derive(const Options& o, std::ostream& log) {
    const json cfg = load_config(o, true);
    const WeightFunction w = weight_from_json(cfg.contains("weight") ? cfg.at("weight") : json());
    std::vector<StencilSpec> specs;
    if (cfg.contains("stencil")) specs.push_back(stencil_from_json(cfg.at("stencil")));
    if (cfg.contains("stencils"))
        for (const auto& s : cfg.at("stencils")) specs.push_back(stencil_from_json(s, cfg.value("d", 0)));
    if (specs.empty()) throw SpecError("derive config needs 'stencil' or 'stencils'");
    for (const auto& s : specs) s.validate();

    Writer out(o, log);
    json report = json::array();
    for (const auto& spec : specs) {
        const std::string stem = fmt::format("{}_d{}", slug(spec.label()), spec.d);
        json entry{{"scheme", spec.label()}, {"spec", to_json(spec)}};
        SchemeCoefficients c;
        if (spec.kind == SchemeKind::optimized) {
            const KktSolution sol = derive_optimized(spec, w);
            c = sol.coeffs;
            const CostMatrix cm = build_cost(spec.d, spec.half_width(), w);
            const ConstraintSystem cs = build_constraints(spec);
            const KktReport kr = verify_kkt(sol, cm, cs.G(), cs.h(), o.seed.value_or(20240607));
            entry["kkt"] = {{"residual", sol.residual},
                            {"rankDeficient", sol.rankDeficient},
                            {"condition", sol.conditionEstimate},
                            {"rank", c.kktRank},
                            {"stationarity", kr.stationarity},
                            {"feasibility", kr.feasibility},
                            {"perturbations", kr.samples},
                            {"violations", kr.violations},
                            {"ok", kr.ok()}};
            entry["objective"] = cm.objective(c);
            entry["weight"] = to_json(w);
        } else {
            c = derive_standard(spec);
            entry["objective"] = objective(c, w);
        }
        entry["constraintResidual"] = constraint_residual(c);
        if (o.format == "json") out.write_json(stem + ".json", to_json(c));
        else out.write(stem + ".csv", coefficients_csv(c));
        report.push_back(entry);
    }
    out.write_json("derive_report.json", report);
    return kOk;
}

// ---- tables ----

int cmd_tables(const Options& o, std::ostream& log) {
    const json cfg = load_config(o, false);
    fs::path golden = cfg.value("golden", std::string(OPTCOMPACT_SOURCE_DIR) + "/testdata/appendix_b");
    if (golden.is_relative() && !o.config.empty() && !fs::exists(golden))
        golden = fs::path(o.config).parent_path() / golden;
    if (!fs::is_directory(golden)) throw SpecError(fmt::format("golden directory '{}' not found", golden.string()));
    const double tol = cfg.value("tolerance", 1e-8);
    const WeightFunction w = weight_from_json(cfg.contains("weight") ? cfg.at("weight") : json());

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(golden))
        if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw SpecError(fmt::format("no golden tables in '{}'", golden.string()));

    Writer out(o, log);
    json diff = json::array();
    bool pass = true;
    for (const auto& f : files) {
        const auto rows = read_golden_csv(f);
        std::map<std::string, SchemeCoefficients> cache;
        std::vector<GoldenRow> regenerated;
        json mism = json::array();
        double maxDiff = 0.0;
        for (const auto& r : rows) {
            StencilSpec spec = r.spec;
            spec.kind = SchemeKind::optimized;
            const std::string key = fmt::format("{}|{}", spec.label(), spec.d);
            if (!cache.count(key)) cache[key] = derive_optimized(spec, w).coeffs;
            const SchemeCoefficients& c = cache[key];
            GoldenRow g = r;
            g.a = c.a_at(r.m);
            g.b = c.b_at(r.m);
            regenerated.push_back(g);
            for (int which = 0; which < 2; ++which) {
                const double want = which ? r.b : r.a, got = which ? g.b : g.a;
                const double dd = std::abs(want - got);
                maxDiff = std::max(maxDiff, dd);
                if (dd > tol)
                    mism.push_back({{"scheme", spec.label()}, {"d", spec.d}, {"m", r.m}, {"coefficient", which ? "b" : "a"},
                                    {"golden", want}, {"derived", got}, {"diff", dd}});
            }
        }
        if (!mism.empty()) pass = false;
        out.write(f.filename().string(), golden_csv(regenerated));
        log << fmt::format("{}: max diff {:.3e}, {} entries above {:.0e}\n", f.filename().string(), maxDiff, mism.size(), tol);
        diff.push_back({{"file", f.filename().string()}, {"maxDiff", maxDiff}, {"mismatches", mism}});
    }
    out.write_json("tables_diff.json", {{"tolerance", tol}, {"pass", pass}, {"files", diff}});
    return pass ? kOk : kNumerical;
}

// ---- spectrum ----

CurveKind curve_kind(const std::string& s) {
    for (CurveKind k : {CurveKind::mkdx_pow_d, CurveKind::real_err, CurveKind::imag_err, CurveKind::abs_rel_err,
                        CurveKind::norm_sq})
        if (s == to_string(k)) return k;
    throw SpecError(fmt::format("unknown curve kind '{}'", s));
}

int cmd_spectrum(const Options& o, std::ostream& log) {
    const json cfg = load_config(o, true);
    std::vector<FigureRequest> reqs;
    if (cfg.contains("figures")) {
        for (const auto& id : cfg.at("figures")) {
            if (id == "all") {
                for (const auto& k : known_figures()) reqs.push_back({k, {}, {}, CurveKind::abs_rel_err, 2048});
            } else {
                reqs.push_back({id.get<std::string>(), {}, {}, CurveKind::abs_rel_err, 2048});
            }
        }
    }
    if (cfg.contains("custom")) {
        const json& c = cfg.at("custom");
        FigureRequest r;
        r.id = "custom";
        const WeightFunction w = weight_from_json(c.contains("weight") ? c.at("weight") : json());
        for (const auto& s : c.at("schemes")) r.schemes.push_back(derive(stencil_from_json(s, c.value("d", 0)), w));
        r.kind = curve_kind(c.value("kind", std::string("abs_rel_err")));
        r.samples = c.value("samples", 2048);
        r.etas = uniform_etas(r.samples, c.value("etaLo", 0.0), c.value("etaHi", std::numbers::pi));
        reqs.push_back(std::move(r));
    }
    if (reqs.empty()) throw SpecError("spectrum config needs 'figures' or 'custom'");
    Writer out(o, log);
    for (const auto& r : reqs) {
        const CsvBundle b = figure_data(r);
        for (const auto& [name, csv] : b) {
            const std::string stem = name.size() > 4 && name.ends_with(".csv") ? name.substr(0, name.size() - 4) : name;
            emit_table(out, o, stem, csv);
        }
    }
    return kOk;
}

// ---- stability ----

std::vector<StencilSpec> family_shapes(const json& arr) {
    std::vector<StencilSpec> v;
    for (const auto& e : arr) v.push_back(stencil_from_json(e, 1));
    return v;
}

int cmd_stability(const Options& o, std::ostream& log) {
    const json cfg = load_config(o, true);
    const auto betas = cfg.at("betas").get<std::vector<double>>();
    const int Np = cfg.value("Np", 31);
    const double dx0 = 2.0 * std::numbers::pi / Np;
    const std::vector<double> dxs = cfg.contains("dx") ? cfg.at("dx").get<std::vector<double>>() : std::vector<double>{dx0};
    std::vector<ButcherTableau> tabs;
    for (const auto& t : cfg.value("tableaux", json::array({"FE", "ERK4", "IRK2", "IRK3"}))) tabs.push_back(tableau_from_json(t));
    const DtSearchOptions sopt = dt_options_from(cfg.value("search", json::object()));
    const WeightFunction w = weight_from_json(cfg.contains("weight") ? cfg.at("weight") : json());
    const auto shapes = family_shapes(cfg.at("families"));
    const bool exportSpectrum = cfg.value("spectrum", true);
    const bool twoNorm = cfg.value("twoNormFE", false);

    struct FamilyOut {
        std::string name;
        std::string error;
        std::vector<std::vector<CflRow>> rows;  // per tableau
        std::optional<SpectrumReport> spec;
        double circulantGap = 0.0;
        SemiDiscreteReport semi;
        double fe2 = 0.0;
    };
    std::vector<FamilyOut> res(shapes.size());
    parallel_for(static_cast<int>(shapes.size()), o.threads, [&](int i) {
        FamilyOut& fo = res[i];
        try {
            const SchemeSet fam = derive_family(shapes[i], static_cast<int>(betas.size()), w);
            fo.name = fam.name;
            fo.semi = semi_discrete_check(fam.schemes, betas);
            for (const auto& t : tabs) fo.rows.push_back(cfl_sweep(fam.schemes, t, betas, dxs, Np, sopt));
            if (exportSpectrum || twoNorm) {
                std::vector<DomainOperators> ops;
                for (const auto& s : fam.schemes) ops.push_back(assemble_operators(s, Np));
                const Eigen::MatrixXd L = assemble_lambda(ops, betas, dx0);
                fo.spec = spectrum(L);
                fo.circulantGap = checks::circulant_vs_dense(fam, betas, Np);
                if (twoNorm) fo.fe2 = max_dt_forward_euler_2norm(L);
            }
        } catch (const SingularOperatorError& e) {
            fo.error = e.what();
        }
    });

    Writer out(o, log);
    std::string csv = "scheme,tableau,dx,unbounded,dtMax";
    for (size_t d = 1; d <= betas.size(); ++d) csv += fmt::format(",r{}", d);
    csv += "\n";
    json meta{{"betas", betas}, {"Np", Np}, {"search", dt_options_json(sopt)}, {"schemes", json::array()}};
    bool anyError = false;
    for (size_t i = 0; i < res.size(); ++i) {
        const auto& fo = res[i];
        json sj{{"scheme", fo.name.empty() ? shapes[i].label() : fo.name}};
        if (!fo.error.empty()) {
            anyError = true;
            sj["error"] = fo.error;
            log << fmt::format("{}: {}\n", shapes[i].label(), fo.error);
            meta["schemes"].push_back(sj);
            continue;
        }
        for (size_t t = 0; t < tabs.size(); ++t) {
            for (const auto& r : fo.rows[t]) {
                csv += fmt::format("{},{},{},{},{}", slug(fo.name), tabs[t].name, fmt_double(r.dx), r.unbounded ? 1 : 0,
                                   r.unbounded ? std::string("inf") : fmt_double(r.dtMax));
                for (double v : r.r) csv += "," + (r.unbounded ? std::string("inf") : fmt_double(v));
                csv += "\n";
            }
        }
        sj["semiDiscrete"] = {{"stable", fo.semi.stable}, {"worstMargin", fo.semi.worstMargin}, {"worstEta", fo.semi.worstEta}};
        if (fo.spec) {
            sj["spectrum"] = {{"classification", to_string(fo.spec->classification)},
                              {"maxRealPart", fo.spec->maxRealPart},
                              {"spectralRadius", fo.spec->spectralRadius},
                              {"circulantGap", fo.circulantGap}};
            if (exportSpectrum) {
                std::string sc = "re,im\n";
                for (const auto& l : fo.spec->eigenvalues) sc += fmt::format("{},{}\n", fmt_double(l.real()), fmt_double(l.imag()));
                emit_table(out, o, "spectrum_" + slug(fo.name), sc);
            }
        }
        if (twoNorm) sj["forwardEuler2NormDt"] = fo.fe2;
        meta["schemes"].push_back(sj);
    }
    emit_table(out, o, "stability_dtmax", csv);
    if (cfg.contains("region")) {
        for (const auto& r : cfg.at("region")) {
            const ButcherTableau t = tableau_from_json(r.at("tableau"));
            const auto re = r.value("re", std::vector<double>{-4.0, 1.0});
            const auto im = r.value("im", std::vector<double>{-4.0, 4.0});
            const auto grid = stability_region_grid(t, re.at(0), re.at(1), im.at(0), im.at(1), r.value("n", 201));
            std::string rc = "re,im,absR\n";
            for (const auto& g : grid) rc += fmt::format("{},{},{}\n", fmt_double(g.re), fmt_double(g.im), fmt_double(g.absR));
            emit_table(out, o, "region_" + t.name, rc);
        }
    }
    out.write_json("stability_meta.json", meta);
    return anyError ? kNumerical : kOk;
}

// ---- solve ----

struct SolveJob {
    StencilSpec shape;
    std::string tableau;
};

int cmd_solve(const Options& o, std::ostream& log) {
    const json cfg = load_config(o, true);
    if (!cfg.contains("case")) throw SpecError("solve config needs a 'case'");
    PdeCase base = pde_case_from_json(cfg.at("case"));
    if (o.seed) base.seed = *o.seed;
    const bool caseTableau = cfg.at("case").contains("tableau");
    std::map<int, std::string> pairing;
    if (cfg.contains("pairing"))
        for (const auto& [k, v] : cfg.at("pairing").items()) pairing[std::stoi(k)] = v.get<std::string>();
    const WeightFunction w = weight_from_json(cfg.contains("weight") ? cfg.at("weight") : json());
    const std::string pathName = cfg.value("path", std::string("fft"));
    if (pathName != "fft" && pathName != "dense") throw SpecError("path must be 'fft' or 'dense'");
    const auto path = pathName == "fft" ? DerivativeOperator::Path::fft : DerivativeOperator::Path::dense;

    std::vector<SolveJob> jobs;
    for (const auto& s : cfg.at("schemes")) {
        SolveJob j;
        j.shape = stencil_from_json(s.is_object() && s.contains("stencil") ? s.at("stencil") : s, 1);
        const int order = j.shape.order();
        if (s.is_object() && s.contains("tableau")) j.tableau = s.at("tableau");
        else if (caseTableau) j.tableau = base.tableau;
        else if (pairing.count(order)) j.tableau = pairing[order];
        else j.tableau = paired_tableau(order);
        jobs.push_back(j);
    }
    if (jobs.empty()) throw SpecError("solve config lists no schemes");
    // fail on config problems before any run starts
    for (const auto& j : jobs) {
        PdeCase c = base;
        c.tableau = j.tableau;
        c.validate();
    }

    std::vector<RunResult> runs(jobs.size());
    std::vector<double> finalErr(jobs.size(), 0.0);
    parallel_for(static_cast<int>(jobs.size()), o.threads, [&](int i) {
        PdeCase c = base;
        c.tableau = jobs[i].tableau;
        const SchemeSet fam = derive_family(jobs[i].shape, std::max(2, c.max_derivative()), w);
        runs[i] = run_case(c, fam, path);
        if (!runs[i].aborted && !c.nonlinear && !runs[i].frames.empty()) {
            const auto& last = runs[i].frames.back();
            finalErr[i] = (last.field - analytic_advdiff(c, last.t)).cwiseAbs().maxCoeff();
        }
    });

    Writer out(o, log);
    json meta{{"seed", base.seed},
              {"generator", "splitmix64 counter"},
              {"case", to_json(base)},
              {"path", pathName},
              {"tolerances", {{"blowUp", 1e12}, {"coleHopfAgreement", ColeHopfOptions{}.agreement},
                              {"coleHopfWindowSigmas", ColeHopfOptions{}.windowSigmas}}},
              {"runs", json::array()}};
    bool aborted = false;
    const auto x = base.grid();
    for (size_t i = 0; i < runs.size(); ++i) {
        const RunResult& r = runs[i];
        const std::string stem = slug(r.scheme);
        json rj{{"scheme", r.scheme}, {"tableau", r.tableau}, {"dt", r.dt},     {"steps", r.steps},
                {"tEnd", r.tEnd},     {"cfl", r.cfl},         {"aborted", r.aborted}};
        if (base.nonlinear) rj["t0"] = r.t0;
        if (r.stability)
            rj["stability"] = {{"unbounded", r.stability->unbounded},
                               {"dtMax", r.stability->unbounded ? json("inf") : json(r.stability->dtMax)},
                               {"search", dt_options_json(r.stability->options)}};
        if (r.aborted) {
            aborted = true;
            rj["abortStep"] = r.abortStep;
            rj["message"] = r.message;
            log << fmt::format("{}: aborted: {}\n", r.scheme, r.message);
        } else {
            if (!base.nonlinear) rj["maxErrorVsAnalytic"] = finalErr[i];
            rj["K"] = r.frames.back().K;
            rj["eps"] = r.frames.back().eps;
        }
        meta["runs"].push_back(rj);
        if (r.frames.empty()) continue;

        std::string snap = "t,x,f\n";
        for (const auto& fr : r.frames)
            for (int j = 0; j < base.Np; ++j) snap += fmt::format("{},{},{}\n", fmt_double(fr.t), fmt_double(x[j]), fmt_double(fr.field(j)));
        emit_table(out, o, stem + "_snapshots", snap);

        std::string spec = "t";
        for (size_t d = 1; d <= base.betas.size(); ++d) spec += fmt::format(",tstar{}", d);
        spec += ",t_over_t0,k,abs,arg,abs_analytic,arg_analytic,energy_err,speed,phase_ratio,amp_err\n";
        for (const auto& fr : r.frames) {
            for (int k = 1; k <= base.kmax; ++k) {
                spec += fmt_double(fr.t);
                for (double ts : fr.tstar) spec += "," + fmt_double(ts);
                const auto& a = fr.fhat[k - 1];
                const auto& b = fr.fhatAnalytic[k - 1];
                spec += fmt::format(",{},{},{},{},{},{},{},{},{},{}\n", fmt_double(fr.tBurgers), k, fmt_double(std::abs(a)),
                                    fmt_double(std::arg(a)), fmt_double(std::abs(b)), fmt_double(std::arg(b)),
                                    fmt_double(fr.energyError[k - 1]), fmt_double(fr.speed[k - 1]),
                                    fmt_double(fr.phaseRatio[k - 1]), fmt_double(fr.ampError[k - 1]));
            }
        }
        emit_table(out, o, stem + "_spectra", spec);
    }
    out.write_json("solve_meta.json", meta);
    if (aborted) throw RunAborted("one or more runs aborted");
    return kOk;
}

// ---- verify ----

int cmd_verify(const Options& o, std::ostream& log) {
    const json cfg = load_config(o, false);
    std::vector<checks::CheckResult> res;
    if (cfg.empty()) {
        res = checks::default_suite();
    } else {
        checks::LemmaOptions lo;
        lo.mMax = cfg.value("mMax", lo.mMax);
        lo.dMax = cfg.value("dMax", lo.dMax);
        res = checks::lemma_suite(lo);
        for (auto& r : checks::parity_spectrum(cfg.value("Np", 64), std::min(lo.mMax, 4))) res.push_back(r);
        if (cfg.value("convergence", true)) {
            const auto rr = checks::refinement_study(StencilSpec::equal(1, 4, 3));
            res.push_back({"convergence OFD(3,3,3,3)^4 advection-diffusion", std::abs(rr.slope - 4.0) <= 0.3,
                           fmt::format("fitted slope {:.4f}", rr.slope)});
        }
    }
    bool pass = true;
    json arr = json::array();
    for (const auto& r : res) {
        pass = pass && r.pass;
        arr.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        log << fmt::format("{} {}: {}\n", r.pass ? "PASS" : "FAIL", r.name, r.detail);
    }
    Writer out(o, log);
    out.write_json("verify.json", {{"pass", pass}, {"checks", arr}});
    return pass ? kOk : kNumerical;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"optcompact: spectrally optimized compact finite-difference schemes"};
    app.require_subcommand(1);
    Options o;
    auto addCommon = [&](CLI::App* sc) {
        sc->add_option("--config", o.config, "JSON config file");
        sc->add_option("--out", o.out, "output directory (created if absent)");
        sc->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sc->add_flag("--force", o.force, "overwrite existing files");
        sc->add_option("--seed", o.seed, "override the config seed");
        sc->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    };
    std::map<std::string, int (*)(const Options&, std::ostream&)> cmds{
        {"derive", cmd_derive}, {"tables", cmd_tables}, {"spectrum", cmd_spectrum},
        {"stability", cmd_stability}, {"solve", cmd_solve}, {"verify", cmd_verify}};
    const std::map<std::string, std::string> help{
        {"derive", "derive coefficients and a KKT report"},
        {"tables", "regenerate the optimal-coefficient tables and diff against golden files"},
        {"spectrum", "spectral error curves"},
        {"stability", "maximum stable time step, CFL sweeps and spectra"},
        {"solve", "periodic PDE benchmark runs"},
        {"verify", "invariant suite with a pass/fail report"}};
    for (const auto& [name, fn] : cmds) addCommon(app.add_subcommand(name, help.at(name)));

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return cmds.at(name)(o, out);
    } catch (const RunAborted& e) {
        err << "run aborted: " << e.what() << "\n";
        return kAborted;
    } catch (const RankDeficiencyError& e) {
        err << "derivation failed: " << e.what() << "\n";
        return kNumerical;
    } catch (const DerivationError& e) {
        err << "derivation failed: " << e.what() << "\n";
        return kNumerical;
    } catch (const QuadratureError& e) {
        err << "quadrature failed: " << e.what() << "\n";
        return kNumerical;
    } catch (const SingularOperatorError& e) {
        err << "singular operator: " << e.what() << "\n";
        return kNumerical;
    } catch (const UnsupportedCombinationError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const SpecError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "file error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace optcompact::cli
