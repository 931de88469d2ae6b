#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bsl/simulator.hpp"
#include "bsl/types.hpp"

namespace testdoubles {

// always returns the same vector
class ConstantModel : public bsl::SimulatorModel {
public:
    ConstantModel(int param_dim, bsl::SummaryVector value)
        : param_dim_(param_dim), value_(std::move(value)) {}

    int param_dim() const override { return param_dim_; }
    int summary_dim() const override { return static_cast<int>(value_.size()); }
    int dataset_size() const override { return 1; }
    bsl::SummaryVector simulate_summary(const bsl::ParameterVector&,
                                        std::uint64_t) const override {
        return value_;
    }

private:
    int param_dim_;
    bsl::SummaryVector value_;
};

// maps specific seeds to preassigned summaries, so a batch can be forced to
// have an exact sample covariance
class LookupModel : public bsl::SimulatorModel {
public:
    LookupModel(int param_dim, int summary_dim,
                std::unordered_map<std::uint64_t, bsl::SummaryVector> table)
        : param_dim_(param_dim), summary_dim_(summary_dim),
          table_(std::move(table)) {}

    int param_dim() const override { return param_dim_; }
    int summary_dim() const override { return summary_dim_; }
    int dataset_size() const override { return 1; }
    bsl::SummaryVector simulate_summary(const bsl::ParameterVector&,
                                        std::uint64_t seed) const override {
        const auto it = table_.find(seed);
        if (it == table_.end()) throw std::runtime_error("lookup: unknown seed");
        return it->second;
    }

private:
    int param_dim_;
    int summary_dim_;
    std::unordered_map<std::uint64_t, bsl::SummaryVector> table_;
};

// fails (non-finite, wrong length, or throw) on chosen batch elements,
// identified by seed
class FailingModel : public bsl::SimulatorModel {
public:
    enum class Mode { NonFinite, WrongLength, Throws };

    FailingModel(int summary_dim, std::vector<std::uint64_t> bad_seeds, Mode mode)
        : summary_dim_(summary_dim), bad_(std::move(bad_seeds)), mode_(mode) {}

    int param_dim() const override { return 1; }
    int summary_dim() const override { return summary_dim_; }
    int dataset_size() const override { return 1; }
    bsl::SummaryVector simulate_summary(const bsl::ParameterVector&,
                                        std::uint64_t seed) const override {
        for (std::uint64_t b : bad_)
            if (b == seed) {
                if (mode_ == Mode::Throws)
                    throw std::runtime_error("deliberate failure");
                if (mode_ == Mode::WrongLength)
                    return bsl::SummaryVector::Zero(summary_dim_ + 1);
                bsl::SummaryVector s = bsl::SummaryVector::Zero(summary_dim_);
                s[0] = std::numeric_limits<double>::quiet_NaN();
                return s;
            }
        std::mt19937_64 g(seed);
        std::normal_distribution<double> n;
        bsl::SummaryVector s(summary_dim_);
        for (int i = 0; i < summary_dim_; ++i) s[i] = n(g);
        return s;
    }

private:
    int summary_dim_;
    std::vector<std::uint64_t> bad_;
    Mode mode_;
};

// unique scratch directory under the system temp root, removed on scope exit
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("bslkit_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

}  // namespace testdoubles
