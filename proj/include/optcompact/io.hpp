#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "optcompact/pde.hpp"
#include "optcompact/stability.hpp"
#include "optcompact/stencil.hpp"
#include "optcompact/weight.hpp"

namespace optcompact {

using json = nlohmann::json;

// {d, order, mAL, mAR, mBL, mBR, kind}; "M" is shorthand for an equal
// central stencil, "scheme" accepts a label such as "OFD(3,3,2,2)^4".
// d may be supplied separately for shape-only entries.
StencilSpec stencil_from_json(const json& j, int defaultD = 0);
json to_json(const StencilSpec& s);
// "OFD(3,3,2,2)^4" or "SFD(1,1,1,1)^4"
StencilSpec parse_scheme_label(const std::string& label, int d);

// [{lo, hi, form: "const"|"exp", c, alpha} | {form: "table", etas, values}];
// missing -> standard
WeightFunction weight_from_json(const json& j);
json to_json(const WeightFunction& w);

// name string or {name, A, b, c}
ButcherTableau tableau_from_json(const json& j);
json to_json(const ButcherTableau& t);

PdeCase pde_case_from_json(const json& j);
json to_json(const PdeCase& c);

json to_json(const SchemeCoefficients& c);
std::string coefficients_csv(const SchemeCoefficients& c);

// golden-table rows: one coefficient pair per (scheme, m)
struct GoldenRow {
    StencilSpec spec;
    int m = 0;
    double a = 0.0, b = 0.0;
};
std::vector<GoldenRow> read_golden_csv(const std::filesystem::path& p);
std::string golden_csv(const std::vector<GoldenRow>& rows);

json read_json_file(const std::filesystem::path& p);
std::string read_text_file(const std::filesystem::path& p);
// refuses to replace an existing file unless force is set
void write_text_file(const std::filesystem::path& p, const std::string& content, bool force);

// "%.17g"
std::string fmt_double(double v);
// file-system friendly form of a scheme label
std::string slug(const std::string& label);

}  // namespace optcompact
