#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "../error.hpp"

namespace fdelab {

enum class Outcome { Pass, Fail, Degenerate };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Pass: return "PASS";
        case Outcome::Fail: return "FAIL";
        case Outcome::Degenerate: return "DEGENERATE";
    }
    return "?";
}

/// Both sides of one inequality on one geometry. constant = lhs / sum(rhs) unless the sum vanishes.
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    std::vector<std::pair<std::string, double>> lhs_terms;  ///< parts summing to lhs, when there are several
    std::vector<std::pair<std::string, double>> rhs_terms;
    double tolerance = std::numeric_limits<double>::infinity();  ///< largest admissible constant
    double constant = std::numeric_limits<double>::quiet_NaN();  ///< NaN for DEGENERATE
    Outcome outcome = Outcome::Degenerate;
    std::string geometry;

    double rhs_sum() const {
        double s = 0.0;
        for (const auto& t : rhs_terms) s += t.second;
        return s;
    }
    bool passed() const { return outcome != Outcome::Fail; }
    bool degenerate() const { return outcome == Outcome::Degenerate; }

    double term(const std::string& key) const {
        for (const auto* terms : {&lhs_terms, &rhs_terms})
            for (const auto& t : *terms)
                if (t.first == key) return t.second;
        fail(ErrorCode::InvalidArgument, "no term " + key + " in " + name);
    }

    /// 0/0 is DEGENERATE and passes; x/0 with x > 0 is DEGENERATE and fails.
    void finish() {
        const double r = rhs_sum();
        if (r > 0.0) {
            constant = lhs / r;
            outcome = constant <= tolerance ? Outcome::Pass : Outcome::Fail;
        } else {
            constant = std::numeric_limits<double>::quiet_NaN();
            outcome = lhs == 0.0 ? Outcome::Degenerate : Outcome::Fail;
        }
    }

    static InequalityReport make(std::string name, double lhs, std::vector<std::pair<std::string, double>> rhs,
                                 double tolerance = std::numeric_limits<double>::infinity(),
                                 std::string geometry = "") {
        InequalityReport r;
        r.name = std::move(name);
        r.lhs = lhs;
        r.rhs_terms = std::move(rhs);
        r.tolerance = tolerance;
        r.geometry = std::move(geometry);
        r.finish();
        return r;
    }
};

/// min / median / max of the finite constants of all reports sharing a name.
struct ConstantSummary {
    std::string name;
    std::size_t count = 0;
    std::size_t degenerate = 0;
    std::size_t failed = 0;
    double min = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double max = std::numeric_limits<double>::quiet_NaN();
};

/// Median of a copy; the mean of the two middle values for even counts.
inline double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

/// Groups in order of first appearance.
inline std::vector<ConstantSummary> summarize(const std::vector<InequalityReport>& reports) {
    std::vector<ConstantSummary> out;
    std::vector<std::vector<double>> values;
    for (const auto& r : reports) {
        std::size_t g = 0;
        while (g < out.size() && out[g].name != r.name) ++g;
        if (g == out.size()) {
            out.push_back(ConstantSummary{r.name});
            values.emplace_back();
        }
        ++out[g].count;
        out[g].degenerate += r.degenerate();
        out[g].failed += !r.passed();
        if (std::isfinite(r.constant)) values[g].push_back(r.constant);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        if (values[g].empty()) continue;
        out[g].min = *std::min_element(values[g].begin(), values[g].end());
        out[g].max = *std::max_element(values[g].begin(), values[g].end());
        out[g].median = median_of(values[g]);
    }
    return out;
}

}  // namespace fdelab
