#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <vector>

#include "bsl/seed_stream.hpp"
#include "bsl/types.hpp"

namespace bsl {

// A simulator maps (theta, seed) to one summary-statistic vector.  The same
// (theta, seed) pair must always give the same summary; that contract is what
// every reproducibility guarantee downstream rests on.
class SimulatorModel {
public:
    virtual ~SimulatorModel() = default;

    virtual int param_dim() const = 0;
    virtual int summary_dim() const = 0;

    // Size of the synthetic dataset behind one summary draw.
    virtual int dataset_size() const = 0;

    virtual SummaryVector simulate_summary(const ParameterVector& theta,
                                           std::uint64_t seed) const = 0;

    // Whether simulate_summary may be called from several threads at once.
    // Out-of-process simulators say no and batches fall back to sequential.
    virtual bool parallel_safe() const { return true; }
};

// Draws M summaries at theta, one per child of `stream`, so element i gets
// seed stream.child(i).seed() no matter how the batch is scheduled.  Each
// summary is checked for size and finiteness; the first bad element (by
// batch index, deterministic even when threaded) raises SimulatorError.
std::vector<SummaryVector> simulate_batch(const SimulatorModel& model,
                                          const ParameterVector& theta,
                                          int m,
                                          const SeedStream& stream,
                                          int threads = 1);

// Decorator that counts simulate_summary calls and remembers every seed it
// saw.  Used by tests to prove batches are fresh (all seeds distinct) and
// that retained likelihoods are never re-simulated.
class CountingModel : public SimulatorModel {
public:
    explicit CountingModel(const SimulatorModel& inner) : inner_(inner) {}

    int param_dim() const override { return inner_.param_dim(); }
    int summary_dim() const override { return inner_.summary_dim(); }
    int dataset_size() const override { return inner_.dataset_size(); }
    bool parallel_safe() const override { return inner_.parallel_safe(); }

    SummaryVector simulate_summary(const ParameterVector& theta,
                                   std::uint64_t seed) const override {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            seeds_.push_back(seed);
        }
        ++calls_;
        return inner_.simulate_summary(theta, seed);
    }

    long long calls() const { return calls_.load(); }
    std::vector<std::uint64_t> seeds() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return seeds_;
    }
    void reset() {
        std::lock_guard<std::mutex> lock(mutex_);
        calls_ = 0;
        seeds_.clear();
    }

private:
    const SimulatorModel& inner_;
    mutable std::atomic<long long> calls_{0};
    mutable std::mutex mutex_;
    mutable std::vector<std::uint64_t> seeds_;
};

// Log-density evaluator fed to the samplers.  The SeedStream argument is the
// per-call randomness budget; implementations must not cache across calls.
using LogLikEvaluator =
    std::function<double(const ParameterVector&, const SeedStream&)>;

}  // namespace bsl
