#include "optcompact/io.hpp"

#include <cctype>
#include <fmt/format.h>
#include <fstream>
#include <regex>
#include <sstream>

#include "optcompact/errors.hpp"

namespace optcompact {

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SpecError(fmt::format("field '{}': {}", key, e.what()));
    }
}

template <class T>
T get_req(const json& j, const char* key) {
    if (!j.contains(key)) throw SpecError(fmt::format("missing required field '{}'", key));
    return get_or<T>(j, key, T{});
}

SchemeKind kind_from(const std::string& s) {
    if (s == "optimized" || s == "OFD") return SchemeKind::optimized;
    if (s == "standard" || s == "SFD") return SchemeKind::standard;
    throw SpecError(fmt::format("unknown scheme kind '{}'", s));
}

}  // namespace

StencilSpec parse_scheme_label(const std::string& label, int d) {
    static const std::regex re(R"(^\s*(OFD|SFD)\((\d+),(\d+),(\d+),(\d+)\)\^(\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(label, m, re)) throw SpecError(fmt::format("cannot parse scheme label '{}'", label));
    StencilSpec s;
    s.kind = kind_from(m[1]);
    s.mAL = std::stoi(m[2]);
    s.mAR = std::stoi(m[3]);
    s.mBL = std::stoi(m[4]);
    s.mBR = std::stoi(m[5]);
    s.p = std::stoi(m[6]) - 1;
    s.d = d;
    return s;
}

StencilSpec stencil_from_json(const json& j, int defaultD) {
    if (j.is_string()) {
        if (defaultD < 1) throw SpecError("a scheme label needs a derivative order");
        return parse_scheme_label(j.get<std::string>(), defaultD);
    }
    if (!j.is_object()) throw SpecError("stencil entry must be an object or a label");
    const int d = get_or<int>(j, "d", defaultD);
    if (j.contains("scheme")) return parse_scheme_label(get_req<std::string>(j, "scheme"), d);
    const SchemeKind kind = kind_from(get_or<std::string>(j, "kind", "optimized"));
    const int order = get_req<int>(j, "order");
    StencilSpec s;
    if (j.contains("M")) {
        s = StencilSpec::equal(d, order, get_req<int>(j, "M"), kind);
    } else {
        s.d = d;
        s.p = order - 1;
        s.kind = kind;
        s.mAL = get_req<int>(j, "mAL");
        s.mAR = get_req<int>(j, "mAR");
        s.mBL = get_req<int>(j, "mBL");
        s.mBR = get_req<int>(j, "mBR");
    }
    return s;
}

json to_json(const StencilSpec& s) {
    return json{{"d", s.d},     {"order", s.order()}, {"mAL", s.mAL},
                {"mAR", s.mAR}, {"mBL", s.mBL},       {"mBR", s.mBR},
                {"kind", s.kind == SchemeKind::optimized ? "optimized" : "standard"}};
}

WeightFunction weight_from_json(const json& j) {
    if (j.is_null()) return WeightFunction::standard();
    const json arr = j.is_array() ? j : json::array({j});
    WeightFunction w;
    for (const auto& p : arr) {
        std::string form = get_or<std::string>(p, "form", "constant");
        if (form == "const") form = "constant";
        if (form == "exp") form = "exponential";
        WeightPiece piece;
        if (form == "constant" || form == "exponential") {
            piece.form = form == "constant" ? WeightForm::constant : WeightForm::exponential;
            piece.lo = get_req<double>(p, "lo");
            piece.hi = get_req<double>(p, "hi");
            piece.c = get_or<double>(p, "c", 1.0);
            piece.alpha = get_or<double>(p, "alpha", 0.0);
        } else if (form == "table") {
            piece.form = WeightForm::table;
            piece.etas = get_req<std::vector<double>>(p, "etas");
            piece.values = get_req<std::vector<double>>(p, "values");
            if (piece.etas.empty()) throw SpecError("table weight needs samples");
            piece.lo = piece.etas.front();
            piece.hi = piece.etas.back();
        } else {
            throw SpecError(fmt::format("unknown weight form '{}'", form));
        }
        w.add(std::move(piece));
    }
    return w;
}

json to_json(const WeightFunction& w) {
    json arr = json::array();
    for (const auto& p : w.pieces()) {
        switch (p.form) {
            case WeightForm::constant: arr.push_back({{"form", "constant"}, {"lo", p.lo}, {"hi", p.hi}, {"c", p.c}}); break;
            case WeightForm::exponential:
                arr.push_back({{"form", "exponential"}, {"lo", p.lo}, {"hi", p.hi}, {"c", p.c}, {"alpha", p.alpha}});
                break;
            case WeightForm::table: arr.push_back({{"form", "table"}, {"etas", p.etas}, {"values", p.values}}); break;
        }
    }
    return arr;
}

ButcherTableau tableau_from_json(const json& j) {
    if (j.is_string()) return ButcherTableau::by_name(j.get<std::string>());
    ButcherTableau t;
    t.name = get_or<std::string>(j, "name", "custom");
    const auto A = get_req<std::vector<std::vector<double>>>(j, "A");
    const auto b = get_req<std::vector<double>>(j, "b");
    const auto c = get_req<std::vector<double>>(j, "c");
    const int s = static_cast<int>(b.size());
    if (static_cast<int>(A.size()) != s || static_cast<int>(c.size()) != s)
        throw SpecError(fmt::format("tableau '{}' has inconsistent dimensions", t.name));
    t.A.resize(s, s);
    for (int i = 0; i < s; ++i) {
        if (static_cast<int>(A[i].size()) != s) throw SpecError(fmt::format("tableau '{}': A must be square", t.name));
        for (int k = 0; k < s; ++k) t.A(i, k) = A[i][k];
    }
    t.b = Eigen::Map<const Eigen::VectorXd>(b.data(), s);
    t.c = Eigen::Map<const Eigen::VectorXd>(c.data(), s);
    t.validate();
    return t;
}

json to_json(const ButcherTableau& t) {
    json A = json::array();
    for (int i = 0; i < t.stages(); ++i) {
        json row = json::array();
        for (int k = 0; k < t.stages(); ++k) row.push_back(t.A(i, k));
        A.push_back(row);
    }
    return json{{"name", t.name},
                {"A", A},
                {"b", std::vector<double>(t.b.data(), t.b.data() + t.b.size())},
                {"c", std::vector<double>(t.c.data(), t.c.data() + t.c.size())}};
}

PdeCase pde_case_from_json(const json& j) {
    PdeCase c;
    c.betas = get_req<std::vector<double>>(j, "betas");
    c.nonlinear = get_or<bool>(j, "nonlinear", false);
    c.Np = get_or<int>(j, "Np", c.Np);
    c.kmax = get_or<int>(j, "kmax", c.kmax);
    c.offset = get_or<double>(j, "offset", 0.0);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.tableau = get_or<std::string>(j, "tableau", c.tableau);
    c.dt = get_or<double>(j, "dt", 0.0);
    c.cfl = get_or<double>(j, "cfl", c.cfl);
    c.cflDerivative = get_or<int>(j, "cflDerivative", c.cflDerivative);
    c.snapshots = get_or<int>(j, "snapshots", c.snapshots);
    c.skipStabilityCheck = get_or<bool>(j, "skipStabilityCheck", false);
    if (j.contains("amplitude")) {
        const json& a = j.at("amplitude");
        const std::string kind = get_or<std::string>(a, "kind", "constant");
        if (kind == "constant") c.amplitude.kind = AmplitudeKind::constant;
        else if (kind == "power") c.amplitude.kind = AmplitudeKind::power;
        else if (kind == "single") c.amplitude.kind = AmplitudeKind::single_mode;
        else throw SpecError(fmt::format("unknown amplitude kind '{}'", kind));
        c.amplitude.scale = get_or<double>(a, "scale", 1.0);
        c.amplitude.exponent = get_or<double>(a, "exponent", 0.0);
        c.amplitude.mode = get_or<int>(a, "mode", 1);
    }
    if (j.contains("horizon")) {
        const json& h = j.at("horizon");
        const std::string kind = get_or<std::string>(h, "kind", "physical");
        if (kind == "physical") c.horizon.kind = HorizonKind::physical;
        else if (kind == "normalized") c.horizon.kind = HorizonKind::normalized;
        else if (kind == "burgers") c.horizon.kind = HorizonKind::burgers;
        else throw SpecError(fmt::format("unknown horizon kind '{}'", kind));
        c.horizon.value = get_req<double>(h, "value");
        c.horizon.derivative = get_or<int>(h, "derivative", 2);
    }
    return c;
}

json to_json(const PdeCase& c) {
    static const char* ak[] = {"constant", "power", "single"};
    static const char* hk[] = {"physical", "normalized", "burgers"};
    return json{{"betas", c.betas},
                {"nonlinear", c.nonlinear},
                {"Np", c.Np},
                {"kmax", c.kmax},
                {"offset", c.offset},
                {"seed", c.seed},
                {"tableau", c.tableau},
                {"dt", c.dt},
                {"cfl", c.cfl},
                {"cflDerivative", c.cflDerivative},
                {"snapshots", c.snapshots},
                {"skipStabilityCheck", c.skipStabilityCheck},
                {"amplitude",
                 {{"kind", ak[static_cast<int>(c.amplitude.kind)]},
                  {"scale", c.amplitude.scale},
                  {"exponent", c.amplitude.exponent},
                  {"mode", c.amplitude.mode}}},
                {"horizon",
                 {{"kind", hk[static_cast<int>(c.horizon.kind)]},
                  {"value", c.horizon.value},
                  {"derivative", c.horizon.derivative}}}};
}

json to_json(const SchemeCoefficients& c) {
    return json{{"scheme", c.label()},
                {"spec", to_json(c.spec)},
                {"a", std::vector<double>(c.a.data(), c.a.data() + c.a.size())},
                {"b", std::vector<double>(c.b.data(), c.b.data() + c.b.size())},
                {"constraintResidual", c.constraintResidual}};
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string coefficients_csv(const SchemeCoefficients& c) {
    std::string out = "m,a,b\n";
    const int M = c.half_width();
    for (int m = -M; m <= M; ++m) out += fmt::format("{},{},{}\n", m, fmt_double(c.a_at(m)), fmt_double(c.b_at(m)));
    return out;
}

std::vector<GoldenRow> read_golden_csv(const std::filesystem::path& p) {
    std::istringstream in(read_text_file(p));
    std::string line;
    std::vector<GoldenRow> rows;
    if (!std::getline(in, line) || line.rfind("d,order,mAL,mAR,mBL,mBR,m,a,b", 0) != 0)
        throw SpecError(fmt::format("{}: unexpected header", p.string()));
    int lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 9) throw SpecError(fmt::format("{}:{}: expected 9 fields", p.string(), lineNo));
        try {
            GoldenRow r;
            r.spec.d = std::stoi(f[0]);
            r.spec.p = std::stoi(f[1]) - 1;
            r.spec.mAL = std::stoi(f[2]);
            r.spec.mAR = std::stoi(f[3]);
            r.spec.mBL = std::stoi(f[4]);
            r.spec.mBR = std::stoi(f[5]);
            r.m = std::stoi(f[6]);
            r.a = std::stod(f[7]);
            r.b = std::stod(f[8]);
            rows.push_back(r);
        } catch (const std::logic_error&) {
            throw SpecError(fmt::format("{}:{}: malformed number", p.string(), lineNo));
        }
    }
    return rows;
}

std::string golden_csv(const std::vector<GoldenRow>& rows) {
    std::string out = "d,order,mAL,mAR,mBL,mBR,m,a,b\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.spec.d, r.spec.order(), r.spec.mAL, r.spec.mAR, r.spec.mBL,
                           r.spec.mBR, r.m, fmt_double(r.a), fmt_double(r.b));
    return out;
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw SpecError(fmt::format("cannot open '{}'", p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& p) {
    try {
        return json::parse(read_text_file(p));
    } catch (const json::parse_error& e) {
        throw SpecError(fmt::format("{}: {}", p.string(), e.what()));
    }
}

void write_text_file(const std::filesystem::path& p, const std::string& content, bool force) {
    if (std::filesystem::exists(p) && !force)
        throw SpecError(fmt::format("'{}' exists; pass --force to overwrite", p.string()));
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw SpecError(fmt::format("cannot write '{}'", p.string()));
    out << content;
}

std::string slug(const std::string& label) {
    std::string s;
    for (char ch : label) {
        if (std::isalnum(static_cast<unsigned char>(ch))) s += ch;
        else if (ch == '^') s += "_o";
        else if (ch == ',' || ch == '(') s += '_';
    }
    return s;
}

}  // namespace optcompact
