#pragma once

#include <functional>
#include <string>
#include <vector>

#include "optcompact/io.hpp"
#include "optcompact/pde.hpp"

namespace optcompact::checks {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// symmetry/skew of a and b and the vanishing error component for every
// central optimized scheme with M <= mMax, d <= dMax
struct LemmaOptions {
    int mMax = 5, dMax = 4, order = 4, samples = 2048;
    double symTol = 1e-10, errTol = 1e-11;
};
std::vector<CheckResult> lemma_suite(const LemmaOptions& opt = {});

// order actually used for (d, M): the requested one if attainable, else the
// largest attainable below it
int attainable_order(int d, int M, int requested);

// even-only => real spectrum, odd-only => imaginary spectrum, dense eigen path
std::vector<CheckResult> parity_spectrum(int Np = 64, int mMax = 4, int order = 4);

// dense vs circulant eigenvalues for one family, max |difference| / rho
double circulant_vs_dense(const SchemeSet& fam, const std::vector<double>& betas, int Np);

struct RefinementResult {
    std::vector<int> Np;
    std::vector<double> error;
    double slope = 0.0;  // least-squares fit of log error against log dx
};
RefinementResult refinement_study(const StencilSpec& shape, const std::vector<int>& Nps = {32, 64, 128, 256},
                                  const std::string& tableau = "ERK2");

// ERK4 r(z) against its Taylor polynomial at random points with |z| <= 10
double erk4_polynomial_gap(int samples = 1000, std::uint64_t seed = 20240607);

std::vector<CheckResult> default_suite();

}  // namespace optcompact::checks
