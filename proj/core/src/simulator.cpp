#include "bsl/simulator.hpp"

#include <exception>
#include <sstream>
#include <thread>

#include "bsl/errors.hpp"

namespace bsl {

namespace {

// Runs one batch element and normalizes failures into SimulatorError-shaped
// records so the caller can pick the smallest failing index.
struct ElementFailure {
    long index = -1;
    std::string message;
    bool protocol = false;  // child-process failures must not look like model failures
};

void run_range(const SimulatorModel& model, const ParameterVector& theta,
               const SeedStream& stream, long lo, long hi,
               std::vector<SummaryVector>& out, ElementFailure& failure) {
    const int d = model.summary_dim();
    for (long i = lo; i < hi; ++i) {
        try {
            SummaryVector s = model.simulate_summary(
                theta, stream.child(static_cast<std::uint64_t>(i)).seed());
            if (s.size() != d) {
                std::ostringstream os;
                os << "simulator returned " << s.size() << " values, expected "
                   << d << " (batch element " << i << ")";
                failure = ElementFailure{i, os.str()};
                return;
            }
            if (!all_finite(s)) {
                std::ostringstream os;
                os << "simulator returned non-finite summary (batch element "
                   << i << ")";
                failure = ElementFailure{i, os.str()};
                return;
            }
            out[static_cast<size_t>(i)] = std::move(s);
        } catch (const ProtocolError& e) {
            failure = ElementFailure{i, e.what(), true};
            return;
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "simulator failed at batch element " << i << ": " << e.what();
            failure = ElementFailure{i, os.str()};
            return;
        }
    }
}

}  // namespace

std::vector<SummaryVector> simulate_batch(const SimulatorModel& model,
                                          const ParameterVector& theta,
                                          int m,
                                          const SeedStream& stream,
                                          int threads) {
    if (m < 1) throw InvalidArgumentError("simulate_batch: m must be >= 1");
    if (theta.size() != model.param_dim())
        throw DimensionError("simulate_batch: theta has wrong dimension");
    if (threads < 1) threads = 1;
    if (!model.parallel_safe()) threads = 1;
    const long n = m;
    threads = static_cast<int>(std::min<long>(threads, n));

    std::vector<SummaryVector> out(static_cast<size_t>(n));

    if (threads == 1) {
        ElementFailure failure;
        run_range(model, theta, stream, 0, n, out, failure);
        if (failure.index >= 0) {
            if (failure.protocol) throw ProtocolError(failure.message);
            throw SimulatorError(failure.message, failure.index);
        }
        return out;
    }

    // Contiguous chunks; each worker stops at its first failure and the
    // smallest failing index wins, matching what a sequential run reports.
    std::vector<ElementFailure> failures(static_cast<size_t>(threads));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(threads));
    const long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = static_cast<long>(t) * chunk;
        const long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi, t] {
            run_range(model, theta, stream, lo, hi, out,
                      failures[static_cast<size_t>(t)]);
        });
    }
    for (auto& w : workers) w.join();

    const ElementFailure* first = nullptr;
    for (const auto& f : failures)
        if (f.index >= 0 && (!first || f.index < first->index)) first = &f;
    if (first) {
        if (first->protocol) throw ProtocolError(first->message);
        throw SimulatorError(first->message, first->index);
    }
    return out;
}

}  // namespace bsl
