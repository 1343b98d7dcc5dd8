#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optcompact/fft.hpp"
#include "optcompact/stability.hpp"
#include "optcompact/stencil.hpp"
#include "optcompact/weight.hpp"

namespace optcompact {

// SplitMix64 keyed by (seed, counter); phase k never depends on how many
// other phases were drawn
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

enum class AmplitudeKind { constant, power, single_mode };

struct AmplitudeLaw {
    AmplitudeKind kind = AmplitudeKind::constant;
    double scale = 1.0;
    double exponent = 0.0;  // power: scale * k^exponent
    int mode = 1;           // single_mode: only this k is nonzero
    double operator()(int k) const;
};

enum class HorizonKind { physical, normalized, burgers };

struct Horizon {
    HorizonKind kind = HorizonKind::physical;
    double value = 1.0;
    int derivative = 2;  // normalized: t*_d = |beta_d| t kmax^d
};

struct PdeCase {
    std::vector<double> betas;  // betas[d-1] multiplies the d-th derivative
    bool nonlinear = false;     // adds -f f_x
    int Np = 127;
    int kmax = 63;
    AmplitudeLaw amplitude;
    double offset = 0.0;  // constant added to the initial field
    std::uint64_t seed = 1;
    std::string tableau = "ERK2";
    double dt = 0.0;    // used as is when > 0
    double cfl = 0.01;  // otherwise dt = cfl dx^d / |beta_d|
    int cflDerivative = 2;
    Horizon horizon;
    int snapshots = 1;  // frames after t = 0
    bool skipStabilityCheck = false;

    double dx() const;
    std::vector<double> grid() const;
    int max_derivative() const;  // highest d with beta_d != 0, at least 1
    void validate() const;       // throws SpecError
};

Eigen::VectorXd init_field(const PdeCase& c);
double phase(const PdeCase& c, int k);
Eigen::VectorXd analytic_advdiff(const PdeCase& c, double t);

// K0 / eps0 of the initial spectrum
double burgers_t0(const PdeCase& c);

struct ColeHopfOptions {
    double windowSigmas = 8.0;
    int minNodes = 4096;
    double agreement = 1e-8;
    int maxDoublings = 8;
};
std::vector<double> analytic_burgers_colehopf(const PdeCase& c, double t, const std::vector<double>& x,
                                              const ColeHopfOptions& opt = {});

// B^-1 A f / dx^d on a periodic grid
class DerivativeOperator {
public:
    enum class Path { fft, dense };
    DerivativeOperator(const SchemeCoefficients& c, int Np, double dx, Path path = Path::fft);
    void apply(const Eigen::VectorXd& f, Eigen::VectorXd& out);
    int derivative() const { return d_; }
    Path path() const { return path_; }

private:
    int d_, Np_;
    Path path_;
    double scale_;
    std::vector<std::complex<double>> symbol_;  // per half-spectrum bin, includes 1/dx^d
    std::unique_ptr<RealFft> fft_;
    std::vector<std::complex<double>> work_;
    Eigen::MatrixXd A_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// one scheme per derivative order, schemes[d-1] handles d
struct SchemeSet {
    std::string name;
    std::vector<SchemeCoefficients> schemes;
};
// the same shape and order derived for d = 1..maxD
SchemeSet derive_family(const StencilSpec& shape, int maxD, const WeightFunction& w = WeightFunction::standard());

// order 4 -> ERK2, order 10 -> ERK5 unless overridden
std::string paired_tableau(int spatialOrder);

class SemiDiscrete {
public:
    SemiDiscrete(const PdeCase& c, const SchemeSet& set, DerivativeOperator::Path path = DerivativeOperator::Path::fft);
    void rhs(const Eigen::VectorXd& f, Eigen::VectorXd& out);
    // first derivative, for the dissipation diagnostic
    void first_derivative(const Eigen::VectorXd& f, Eigen::VectorXd& out);
    Eigen::MatrixXd lambda() const;  // dense linear part
    std::vector<cplx> linear_eigenvalues() const;
    bool nonlinear() const { return nonlinear_; }

private:
    std::vector<double> betas_;
    bool nonlinear_;
    int Np_;
    double dx_;
    std::vector<SchemeCoefficients> schemes_;
    std::vector<std::unique_ptr<DerivativeOperator>> ops_;  // index d-1, null if unused
    Eigen::VectorXd tmp_;
};

class Stepper {
public:
    Stepper(SemiDiscrete& sd, ButcherTableau tab);
    void step(Eigen::VectorXd& f, double dt);

private:
    SemiDiscrete& sd_;
    ButcherTableau tab_;
    std::vector<Eigen::VectorXd> k_;
    Eigen::VectorXd stage_;
    double luDt_ = -1.0;
    Eigen::MatrixXd lambda_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct DiagnosticsFrame {
    double t = 0.0;
    std::vector<double> tstar;  // per derivative, |beta_d| t kmax^d
    double tBurgers = 0.0;      // t / t0, nonlinear runs
    double K = 0.0, eps = 0.0;
    std::vector<std::complex<double>> fhat, fhatAnalytic;  // k = 1..kmax
    std::vector<double> energyError, speed, phaseRatio, ampError;
    Eigen::VectorXd field;
};

struct RunResult {
    std::string scheme;
    std::string tableau;
    double dt = 0.0;
    int steps = 0;
    double tEnd = 0.0;
    double t0 = 0.0;
    std::vector<double> cfl;  // r_d
    std::vector<DiagnosticsFrame> frames;
    bool aborted = false;
    int abortStep = -1;
    std::string message;
    std::optional<DtResult> stability;
};

struct TimePlan {
    double tEnd = 0.0, dt = 0.0;
    int steps = 0;
};
TimePlan plan_time(const PdeCase& c);

RunResult run_case(const PdeCase& c, const SchemeSet& set, DerivativeOperator::Path path = DerivativeOperator::Path::fft);

// max-norm error against the advection-diffusion solution at the horizon
double advdiff_error(const PdeCase& c, const SchemeSet& set);

}  // namespace optcompact
