#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optcompact/stencil.hpp"
#include "optcompact/weight.hpp"

namespace optcompact {

using cplx = std::complex<double>;

// Phi_k with entries delta((i - j - k) mod Np)
Eigen::MatrixXd shift_operator(int Np, int k);

struct DomainOperators {
    Eigen::MatrixXd A, B;  // Aphi, Bphi
    bool periodic = true;
    int d = 0;
    std::vector<std::string> rowSchemes;  // provenance per row
};

// periodic placement of one scheme on every row
DomainOperators assemble_operators(const SchemeCoefficients& c, int Np);

// Non-periodic: interior scheme plus closures. left[i] is used on row i,
// right[i] on row Np - right.size() + i.
struct BoundarySet {
    SchemeCoefficients interior;
    std::vector<SchemeCoefficients> left, right;
};
DomainOperators assemble_operators(const BoundarySet& set, int Np);

// right-biased closures (mirrored left-biased optimized schemes) for a
// central stencil of half-width M, total biased width 2M+1
BoundarySet optimized_boundary_set(int d, int order, int M, const WeightFunction& w = WeightFunction::standard());

// Lambda = sum_d beta_d / dx^d * B_d^-1 A_d; betas[d-1] is beta_d
Eigen::MatrixXd assemble_lambda(std::span<const DomainOperators> ops, std::span<const double> betas, double dx);

struct SemiDiscreteReport {
    bool stable = false;
    double worstMargin = 0.0;  // max over eta of Re sum beta_d (j eta~)^d
    double worstEta = 0.0;
};
// schemes[i] supplies derivative schemes[i].spec.d
SemiDiscreteReport semi_discrete_check(std::span<const SchemeCoefficients> schemes, std::span<const double> betas,
                                       int samples = 2048);

enum class SpectrumClass { real_only, imaginary_only, mixed };
const char* to_string(SpectrumClass c);

struct SpectrumReport {
    std::vector<cplx> eigenvalues;
    double maxRealPart = 0.0;
    double spectralRadius = 0.0;
    SpectrumClass classification = SpectrumClass::mixed;
};

SpectrumReport classify_spectrum(std::vector<cplx> eigenvalues);
// dense Hessenberg + shifted QR path, Np <= 4096
SpectrumReport spectrum(const Eigen::MatrixXd& Lambda);
// circulant fast path: lambda(theta_k) = sum_d beta_d/dx^d * symbol_d(theta_k)
std::vector<cplx> circulant_eigenvalues(std::span<const SchemeCoefficients> schemes, std::span<const double> betas,
                                        double dx, int Np);

struct ButcherTableau {
    std::string name;
    Eigen::MatrixXd A;
    Eigen::VectorXd b, c;

    int stages() const { return static_cast<int>(b.size()); }
    bool is_explicit() const;
    void validate() const;  // throws SpecError

    static ButcherTableau forward_euler();
    static ButcherTableau erk2();  // Heun
    static ButcherTableau erk4();
    static ButcherTableau erk5();  // Butcher's six-stage fifth order
    static ButcherTableau irk2();
    static ButcherTableau irk3();
    static ButcherTableau by_name(const std::string& name);
    static std::vector<std::string> shipped();
};

// r(z) = 1 + z b^T (I - zA)^-1 1; a pole returns +inf
cplx stability_function(const ButcherTableau& tab, cplx z);

struct DtSearchOptions {
    double dtLo = 1e-12, dtHi = 1e6;
    int pointsPerDecade = 50;
    double relWidth = 1e-10;
    double tolerance = 1e-12;  // |r| <= 1 + tolerance
    double rayCeiling = 1e8;   // |z| probed along each eigen-ray
    double zeroClamp = 1e-10;  // |lambda| below this * rho treated as 0
};

struct DtResult {
    bool unbounded = false;
    double dtMax = 0.0;
    DtSearchOptions options;
};

DtResult max_stable_dt(std::span<const cplx> eigenvalues, const ButcherTableau& tab, const DtSearchOptions& opt = {});

// spectral norm of a dense matrix via power iteration on the Gram matrix
double norm2_power(const Eigen::MatrixXd& M, double relTol = 1e-10);
// largest dt with ||I + dt Lambda||_2 <= 1; +inf if Lambda = 0
double max_dt_forward_euler_2norm(const Eigen::MatrixXd& Lambda);

struct CflRow {
    double dx = 0.0;
    bool unbounded = false;
    double dtMax = 0.0;
    std::vector<double> r;  // r[d-1] = |beta_d| dt / dx^d
};

// periodic central schemes on Np points, one row per dx
std::vector<CflRow> cfl_sweep(std::span<const SchemeCoefficients> schemes, const ButcherTableau& tab,
                              std::span<const double> betas, std::span<const double> dxList, int Np,
                              const DtSearchOptions& opt = {});

struct RegionSample {
    double re, im, absR;
};
// |r(z)| on a uniform box, for contouring the stability region
std::vector<RegionSample> stability_region_grid(const ButcherTableau& tab, double reLo, double reHi, double imLo,
                                                double imHi, int n);

}  // namespace optcompact
