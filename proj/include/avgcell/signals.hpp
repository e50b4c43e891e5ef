#pragma once

#include "avgcell/netlist.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace avgcell {

// Signal names shared by the CSV writers, the oracle and the comparisons.

[[nodiscard]] inline std::string node_signal(NodeId node) {
    return "v(" + std::to_string(node) + ")";
}

[[nodiscard]] inline std::string branch_signal(std::string_view vdc_label) {
    return "i(" + std::string(vdc_label) + ")";
}

[[nodiscard]] inline std::string inductor_signal(std::string_view cell_label) {
    return "iL(" + std::string(cell_label) + ")";
}

[[nodiscard]] inline std::string capacitor_signal(std::string_view cap_label) {
    return "vC(" + std::string(cap_label) + ")";
}

/// Comma-separated list of patterns; a signal is selected when its name
/// equals or contains one of them. An empty filter selects everything.
class SignalFilter {
public:
    SignalFilter() = default;
    explicit SignalFilter(std::string_view spec);

    [[nodiscard]] bool matches(std::string_view signal) const;
    [[nodiscard]] bool empty() const noexcept { return patterns_.empty(); }

private:
    std::vector<std::string> patterns_;
};

}  // namespace avgcell
