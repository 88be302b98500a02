#include "impatience/sampling.hpp"

#include <algorithm>
#include <limits>

#include "impatience/errors.hpp"

namespace impatience {

std::string to_string(SampleMethod method) {
    switch (method) {
        case SampleMethod::renovation_exact: return "renovation-exact";
        case SampleMethod::forward_approximate: return "forward-approximate";
    }
    return "unknown";
}

const MarkTriple& BackwardMarks::at_lag(std::int64_t lag) {
    while (static_cast<std::int64_t>(marks_.size()) < lag) {
        marks_.push_back(src_.mark_at(-static_cast<std::int64_t>(marks_.size()) - 1));
    }
    return marks_[static_cast<std::size_t>(lag - 1)];
}

Renovation find_zero_epoch(const RecursionSpec& spec, const MarkSource& src, std::int64_t max_epochs,
                           std::int64_t max_depth) {
    if (max_epochs < 1 || max_depth < 1) throw ArgumentError("renovation search needs positive bounds");
    const auto bound = spec.alpha_bound(src);
    if (!bound) {
        throw CapabilityError("renovation search for alpha=" + spec.name() +
                              " needs a declared alpha_bound on the source");
    }
    BackwardMarks marks(src);
    for (std::int64_t m = 1; m <= max_epochs; ++m) {
        // Same arithmetic as backward_supremum at epoch -m.
        double cum = 0.0;
        double best = -std::numeric_limits<double>::infinity();
        std::int64_t j = 1;
        bool certified = false;
        for (; j <= max_depth; ++j) {
            const MarkTriple& mk = marks.at_lag(m + j);
            cum += spec.beta(mk);
            best = std::max(best, spec.alpha(mk) - cum);
            if (best > 0.0) break;
            if (cum >= *bound) {
                certified = true;
                break;
            }
        }
        if (best > 0.0) continue;
        if (!certified) {
            throw DepthExhausted("cumulative interarrivals did not reach alpha_bound within max_depth " +
                                 std::to_string(max_depth) + " at epoch " + std::to_string(-m));
        }
        return Renovation{-m, ZeroCertificate{-m, j, *bound - cum}};
    }
    throw RenovationNotFound("no certified zero of Y_{" + spec.name() + ",xi} within " + std::to_string(max_epochs) +
                             " epochs; the stability condition may fail or the search bounds are too small");
}

}  // namespace impatience
