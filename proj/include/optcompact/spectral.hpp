#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optcompact/stencil.hpp"
#include "optcompact/weight.hpp"

namespace optcompact {

using cplx = std::complex<double>;

struct TrigVectors {
    Eigen::VectorXd C, S;  // index m + M
};
TrigVectors trig_vectors(double eta, int M);

// symbol denominators below this magnitude are flagged
inline constexpr double kDenominatorFloor = 1e-14;

struct SymbolSample {
    cplx value;  // (j eta~)^d
    bool flagged = false;
};

// ((C + jS)^T a) / ((C + jS)^T b)
SymbolSample modified_wavenumber_pow(const SchemeCoefficients& c, double eta);
// symbol minus (j eta)^d
SymbolSample spectral_error(const SchemeCoefficients& c, double eta);
// eta~^d, i.e. the symbol divided by j^d (complex for biased schemes)
cplx scaled_wavenumber_pow(const SchemeCoefficients& c, double eta);

enum class CurveKind { mkdx_pow_d, real_err, imag_err, abs_rel_err, norm_sq };
const char* to_string(CurveKind k);

struct SpectralCurve {
    std::vector<double> etas;
    std::vector<double> values;
    std::vector<bool> flagged;
    CurveKind kind = CurveKind::real_err;
    std::string scheme;
};

std::vector<double> uniform_etas(int n = 2048, double lo = 0.0, double hi = 3.14159265358979323846);

std::pair<SpectralCurve, SpectralCurve> error_components(const SchemeCoefficients& c,
                                                         std::span<const double> etas);
SpectralCurve sample_curve(const SchemeCoefficients& c, std::span<const double> etas, CurveKind kind);

// CSV: header "eta,<quantity>:<scheme>,..." then one row per sample
std::string curves_to_csv(const std::vector<SpectralCurve>& curves);

struct FigureRequest {
    std::string id;  // figure id, or "custom"
    // custom sweep
    std::vector<SchemeCoefficients> schemes;
    std::vector<double> etas;
    CurveKind kind = CurveKind::abs_rel_err;
    int samples = 2048;
};

// file name -> CSV contents
using CsvBundle = std::map<std::string, std::string>;
CsvBundle figure_data(const FigureRequest& req);
std::vector<std::string> known_figures();

}  // namespace optcompact
