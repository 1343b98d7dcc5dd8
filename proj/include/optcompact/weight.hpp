#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace optcompact {

enum class WeightForm { constant, exponential, table };

// gamma(eta) = c on [lo,hi], c*exp(alpha*eta), or a linear interpolant of samples
struct WeightPiece {
    double lo = 0.0, hi = 0.0;
    WeightForm form = WeightForm::constant;
    double c = 1.0;
    double alpha = 0.0;
    std::vector<double> etas, values;  // table form only

    template <class T>
    T eval(const T& eta) const {
        using std::exp;
        switch (form) {
            case WeightForm::constant: return T(c);
            case WeightForm::exponential: return T(c) * exp(T(alpha) * eta);
            case WeightForm::table: {
                if (eta <= T(etas.front())) return T(values.front());
                if (eta >= T(etas.back())) return T(values.back());
                size_t k = 1;
                while (k + 1 < etas.size() && T(etas[k]) < eta) ++k;
                const T t = (eta - T(etas[k - 1])) / (T(etas[k]) - T(etas[k - 1]));
                return T(values[k - 1]) + t * (T(values[k]) - T(values[k - 1]));
            }
        }
        return T(0);
    }
};

class WeightFunction {
public:
    WeightFunction() = default;

    static WeightFunction constant(double lo, double hi, double c = 1.0);
    static WeightFunction exponential(double lo, double hi, double alpha, double c = 1.0);
    static WeightFunction table(std::vector<double> etas, std::vector<double> values);
    // gamma = 1 on [0, 3], the setting behind the published coefficient tables
    static WeightFunction standard() { return constant(0.0, 3.0); }

    WeightFunction& add(WeightPiece piece);  // validates, keeps pieces sorted

    const std::vector<WeightPiece>& pieces() const { return pieces_; }
    bool empty() const;  // no piece of positive length
    double support_lo() const;
    double support_hi() const;

    template <class T>
    T evaluate(const T& eta) const {
        for (const auto& p : pieces_)
            if (eta >= T(p.lo) && eta <= T(p.hi)) return p.eval(eta);
        return T(0);
    }
    double operator()(double eta) const { return evaluate(eta); }

    // panel boundaries: piece ends plus interior table samples
    std::vector<std::pair<double, double>> smooth_intervals() const;

    WeightFunction scaled(double factor) const;
    std::string describe() const;

private:
    std::vector<WeightPiece> pieces_;
};

}  // namespace optcompact
