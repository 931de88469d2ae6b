#include "bsl/prior.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bsl/errors.hpp"

namespace bsl {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093453;
}  // namespace

PriorMarginal PriorMarginal::uniform(double low, double high) {
    if (!(low < high))
        throw InvalidArgumentError("uniform prior needs low < high");
    return PriorMarginal{Kind::Uniform, low, high};
}

PriorMarginal PriorMarginal::normal(double mean, double sd) {
    if (!(sd > 0.0))
        throw InvalidArgumentError("normal prior needs sd > 0");
    return PriorMarginal{Kind::Normal, mean, sd};
}

double PriorMarginal::logpdf(double x) const {
    if (kind == Kind::Uniform) {
        if (x < a || x > b) return kNegInf;
        return -std::log(b - a);
    }
    const double z = (x - a) / b;
    return -0.5 * (kLogTwoPi + z * z) - std::log(b);
}

double PriorMarginal::sample(Rng& rng) const {
    if (kind == Kind::Uniform) return rng.uniform(a, b);
    return rng.normal(a, b);
}

double PriorMarginal::mean() const {
    if (kind == Kind::Uniform) return 0.5 * (a + b);
    return a;
}

double PriorMarginal::sd() const {
    if (kind == Kind::Uniform) return (b - a) / std::sqrt(12.0);
    return b;
}

std::string PriorMarginal::describe() const {
    std::ostringstream os;
    if (kind == Kind::Uniform)
        os << "uniform(" << a << ", " << b << ")";
    else
        os << "normal(" << a << ", " << b << ")";
    return os.str();
}

Prior::Prior(std::vector<PriorMarginal> marginals)
    : marginals_(std::move(marginals)) {
    if (marginals_.empty())
        throw InvalidArgumentError("prior needs at least one marginal");
}

double Prior::logpdf(const ParameterVector& theta) const {
    if (theta.size() != dim())
        throw DimensionError("prior logpdf: theta has wrong dimension");
    double total = 0.0;
    for (int i = 0; i < dim(); ++i) {
        const double lp = marginals_[static_cast<size_t>(i)].logpdf(theta[i]);
        if (lp == kNegInf) return kNegInf;  // short-circuit outside support
        total += lp;
    }
    return total;
}

ParameterVector Prior::sample(const SeedStream& stream) const {
    ParameterVector theta(dim());
    for (int i = 0; i < dim(); ++i) {
        Rng rng(stream.child(static_cast<std::uint64_t>(i)));
        theta[i] = marginals_[static_cast<size_t>(i)].sample(rng);
    }
    return theta;
}

ParameterVector Prior::mean() const {
    ParameterVector m(dim());
    for (int i = 0; i < dim(); ++i) m[i] = marginals_[static_cast<size_t>(i)].mean();
    return m;
}

Vector Prior::sds() const {
    Vector s(dim());
    for (int i = 0; i < dim(); ++i) s[i] = marginals_[static_cast<size_t>(i)].sd();
    return s;
}

}  // namespace bsl
