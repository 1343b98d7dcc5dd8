#include "optcompact/weight.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numbers>

#include "optcompact/errors.hpp"

namespace optcompact {

WeightFunction WeightFunction::constant(double lo, double hi, double c) {
    WeightPiece p;
    p.lo = lo;
    p.hi = hi;
    p.c = c;
    WeightFunction w;
    w.add(p);
    return w;
}

WeightFunction WeightFunction::exponential(double lo, double hi, double alpha, double c) {
    WeightPiece p;
    p.lo = lo;
    p.hi = hi;
    p.form = WeightForm::exponential;
    p.alpha = alpha;
    p.c = c;
    WeightFunction w;
    w.add(p);
    return w;
}

WeightFunction WeightFunction::table(std::vector<double> etas, std::vector<double> values) {
    WeightPiece p;
    p.form = WeightForm::table;
    if (!etas.empty()) {
        p.lo = etas.front();
        p.hi = etas.back();
    }
    p.etas = std::move(etas);
    p.values = std::move(values);
    WeightFunction w;
    w.add(p);
    return w;
}

WeightFunction& WeightFunction::add(WeightPiece piece) {
    constexpr double pi = std::numbers::pi;
    if (!(piece.lo >= 0.0 && piece.hi <= pi + 1e-15 && piece.lo <= piece.hi))
        throw SpecError(fmt::format("weight piece [{}, {}] must lie inside [0, pi]", piece.lo, piece.hi));
    switch (piece.form) {
        case WeightForm::constant:
        case WeightForm::exponential:
            if (piece.c < 0.0) throw SpecError("weight coefficient must be non-negative");
            break;
        case WeightForm::table:
            if (piece.etas.size() < 2 || piece.etas.size() != piece.values.size())
                throw SpecError("tabulated weight needs >= 2 samples with matching lengths");
            for (size_t i = 1; i < piece.etas.size(); ++i)
                if (!(piece.etas[i] > piece.etas[i - 1]))
                    throw SpecError("tabulated weight samples must be strictly increasing in eta");
            for (double v : piece.values)
                if (v < 0.0 || !std::isfinite(v)) throw SpecError("tabulated weight has a negative sample");
            piece.lo = piece.etas.front();
            piece.hi = piece.etas.back();
            break;
    }
    for (const auto& q : pieces_) {
        if (piece.lo < q.hi && q.lo < piece.hi)
            throw SpecError(fmt::format("weight pieces [{}, {}] and [{}, {}] overlap", q.lo, q.hi, piece.lo,
                                        piece.hi));
    }
    pieces_.push_back(std::move(piece));
    std::sort(pieces_.begin(), pieces_.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
    return *this;
}

bool WeightFunction::empty() const {
    return std::none_of(pieces_.begin(), pieces_.end(), [](const auto& p) { return p.hi > p.lo; });
}

double WeightFunction::support_lo() const { return pieces_.empty() ? 0.0 : pieces_.front().lo; }
double WeightFunction::support_hi() const { return pieces_.empty() ? 0.0 : pieces_.back().hi; }

std::vector<std::pair<double, double>> WeightFunction::smooth_intervals() const {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pieces_) {
        if (!(p.hi > p.lo)) continue;
        if (p.form == WeightForm::table) {
            for (size_t i = 1; i < p.etas.size(); ++i) out.emplace_back(p.etas[i - 1], p.etas[i]);
        } else {
            out.emplace_back(p.lo, p.hi);
        }
    }
    return out;
}

WeightFunction WeightFunction::scaled(double factor) const {
    WeightFunction w = *this;
    for (auto& p : w.pieces_) {
        p.c *= factor;
        for (auto& v : p.values) v *= factor;
    }
    return w;
}

std::string WeightFunction::describe() const {
    std::string s;
    for (const auto& p : pieces_) {
        if (!s.empty()) s += "+";
        switch (p.form) {
            case WeightForm::constant: s += fmt::format("{}[{},{}]", p.c, p.lo, p.hi); break;
            case WeightForm::exponential: s += fmt::format("{}exp({}eta)[{},{}]", p.c, p.alpha, p.lo, p.hi); break;
            case WeightForm::table: s += fmt::format("table{}[{},{}]", p.etas.size(), p.lo, p.hi); break;
        }
    }
    return s.empty() ? "0" : s;
}

}  // namespace optcompact
