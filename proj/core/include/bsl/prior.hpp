#pragma once

#include <string>
#include <vector>

#include "bsl/seed_stream.hpp"
#include "bsl/types.hpp"

namespace bsl {

// One prior marginal: uniform(low, high) or normal(mean, sd).
struct PriorMarginal {
    enum class Kind { Uniform, Normal };

    Kind kind = Kind::Uniform;
    double a = 0.0;  // low  / mean
    double b = 1.0;  // high / sd

    static PriorMarginal uniform(double low, double high);
    static PriorMarginal normal(double mean, double sd);

    double logpdf(double x) const;
    double sample(Rng& rng) const;
    double mean() const;
    double sd() const;
    std::string describe() const;
};

// Product prior with independent marginals.
class Prior {
public:
    Prior() = default;
    explicit Prior(std::vector<PriorMarginal> marginals);

    int dim() const { return static_cast<int>(marginals_.size()); }

    // -inf outside the support; throws DimensionError on a size mismatch.
    double logpdf(const ParameterVector& theta) const;

    ParameterVector sample(const SeedStream& stream) const;

    ParameterVector mean() const;
    Vector sds() const;

    const std::vector<PriorMarginal>& marginals() const { return marginals_; }

private:
    std::vector<PriorMarginal> marginals_;
};

}  // namespace bsl
