#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bsl/simulator.hpp"
#include "bsl/types.hpp"

namespace bsl {

// Child process launch description.  The child speaks newline-delimited JSON
// on stdin/stdout:
//
//   -> {"type":"hello","d_theta":K,"d_s":D,"n":N}
//   <- {"type":"ready"}
//   -> {"type":"sim","id":I,"theta":[...],"seed":U64,"n":N}
//   <- {"type":"sum","id":I,"summary":[...]}
//   -> {"type":"bye"}          (then stdin closes)
struct ExternalSimulatorSpec {
    std::vector<std::string> command;  // argv, command[0] resolved via PATH
    int d_theta = 0;
    int d_s = 0;
    int n = 0;
    double handshake_timeout_s = 10.0;
    double request_timeout_s = 60.0;
};

// Out-of-process simulator.  One child per instance, spawned and handshaken
// in the constructor; requests are strictly serialized and matched by id.
// Any protocol violation (malformed line, wrong id, timeout, early exit)
// raises ProtocolError with the tail of the child's stderr attached; there
// are no retries.  Registers as not parallel-safe, so batches run
// sequentially through it.
class ExternalSimulator : public SimulatorModel {
public:
    explicit ExternalSimulator(ExternalSimulatorSpec spec);
    ~ExternalSimulator() override;

    ExternalSimulator(const ExternalSimulator&) = delete;
    ExternalSimulator& operator=(const ExternalSimulator&) = delete;

    int param_dim() const override { return spec_.d_theta; }
    int summary_dim() const override { return spec_.d_s; }
    int dataset_size() const override { return spec_.n; }
    bool parallel_safe() const override { return false; }

    SummaryVector simulate_summary(const ParameterVector& theta,
                                   std::uint64_t seed) const override;

private:
    struct Process;

    ExternalSimulatorSpec spec_;
    mutable std::mutex mutex_;
    std::unique_ptr<Process> proc_;
};

}  // namespace bsl
