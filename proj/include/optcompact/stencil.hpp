#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace optcompact {

enum class SchemeKind { optimized, standard };

// Generalized Pade stencil
//   sum_m b_m f^(d)_{i+m} = dx^-d sum_m a_m f_{i+m}
// a-side spans m in [-mAL, mAR], b-side spans [-mBL, mBR].
// p is the highest matched remainder index, order of accuracy is p+1.
struct StencilSpec {
    int d = 1;
    int p = 3;
    int mAL = 1, mAR = 1, mBL = 1, mBR = 1;
    SchemeKind kind = SchemeKind::optimized;

    static StencilSpec central(int d, int order, int mA, int mB,
                               SchemeKind kind = SchemeKind::optimized);
    static StencilSpec equal(int d, int order, int M, SchemeKind kind = SchemeKind::optimized) {
        return central(d, order, M, M, kind);
    }
    // biased scheme with identical a/b extents
    static StencilSpec biased(int d, int order, int mL, int mR,
                              SchemeKind kind = SchemeKind::optimized);

    int order() const { return p + 1; }
    int half_width() const;  // augmented half-width M^
    int size() const { return 2 * half_width() + 1; }
    int a_count() const { return mAL + mAR + 1; }
    int b_count() const { return mBL + mBR + 1; }
    bool is_central() const { return mAL == mAR && mBL == mBR; }
    bool is_equal_size() const { return is_central() && mAL == mBL; }
    bool is_explicit() const { return mBL == 0 && mBR == 0; }

    void validate() const;  // throws SpecError
    // OFD(mAL,mAR,mBL,mBR)^order or SFD(...)^order
    std::string label() const;

    bool operator==(const StencilSpec&) const = default;
};

// Coefficients at augmented length, index m = -M^..M^ stored at m + M^.
struct SchemeCoefficients {
    StencilSpec spec;
    Eigen::VectorXd a, b;
    double constraintResidual = 0.0;
    int kktRank = 0;

    int half_width() const { return static_cast<int>(a.size() - 1) / 2; }
    double a_at(int m) const { return a(m + half_width()); }
    double b_at(int m) const { return b(m + half_width()); }
    std::string label() const { return spec.label(); }
};

struct ConstraintRow {
    Eigen::VectorXd coeffs;  // over [a; b], length 2N^
    double rhs = 0.0;
    std::string tag;
};

struct ConstraintSystem {
    Eigen::MatrixXd X, Y;  // N^ x (d+p+1)
    std::vector<ConstraintRow> extraRows;
    int halfWidth = 0;

    int unknowns() const { return 2 * static_cast<int>(X.rows()); }
    // stacked rows [X^T, -Y^T] followed by the extra rows
    Eigen::MatrixXd G() const;
    Eigen::VectorXd h() const;
};

ConstraintSystem build_constraints(const StencilSpec& spec);

enum class Symmetry { symmetric, skew, neither };
Symmetry symmetrize_check(std::span<const double> v);
inline Symmetry symmetrize_check(const Eigen::VectorXd& v) {
    return symmetrize_check(std::span<const double>(v.data(), static_cast<size_t>(v.size())));
}
const char* to_string(Symmetry s);

// reversal J v
Eigen::VectorXd reversed(const Eigen::VectorXd& v);

// one-based hot index
Eigen::VectorXd delta_vector(int n, int i);

// max-abs residual of a^T X - b^T Y for the scheme's own spec
double constraint_residual(const SchemeCoefficients& c);
double constraint_residual(const SchemeCoefficients& c, const StencilSpec& against);

}  // namespace optcompact
