#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "impatience/marks.hpp"
#include "impatience/recursion.hpp"

namespace impatience {

enum class SampleMethod { renovation_exact, forward_approximate };

std::string to_string(SampleMethod method);

// A draw of a stationary workload at index 0 of its source.
struct StationarySample {
    double value = 0.0;
    SampleMethod method = SampleMethod::forward_approximate;
    std::optional<std::int64_t> renovation_epoch;
    std::optional<ZeroCertificate> certificate;
};

struct SamplingOptions {
    Exactness mode = Exactness::exact;
    std::int64_t max_epochs = 1'000'000;
    std::int64_t max_depth = 1'000'000;
    std::int64_t warmup = 100'000;
};

struct Renovation {
    std::int64_t epoch = 0;  // negative
    ZeroCertificate certificate;
};

// Marks at indices -1, -2, ... fetched once and kept, so scanning successive
// epochs only reads each mark once.
class BackwardMarks {
public:
    explicit BackwardMarks(const MarkSource& src) : src_(src) {}

    // Mark at index -lag, lag >= 1.
    const MarkTriple& at_lag(std::int64_t lag);

private:
    const MarkSource& src_;
    std::vector<MarkTriple> marks_;
};

// Nearest m in [1, max_epochs] such that the backward supremum for `spec`
// certifies 0 at epoch -m. Throws RenovationNotFound when none exists within
// max_epochs, CapabilityError without a declared alpha bound and
// DepthExhausted when a certificate needs more than max_depth lags.
Renovation find_zero_epoch(const RecursionSpec& spec, const MarkSource& src, std::int64_t max_epochs,
                           std::int64_t max_depth);

}  // namespace impatience
