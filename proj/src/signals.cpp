#include "avgcell/signals.hpp"

namespace avgcell {

SignalFilter::SignalFilter(std::string_view spec) {
    while (!spec.empty()) {
        const auto comma = spec.find(',');
        auto item = spec.substr(0, comma);
        while (!item.empty() && item.front() == ' ') {
            item.remove_prefix(1);
        }
        while (!item.empty() && item.back() == ' ') {
            item.remove_suffix(1);
        }
        if (!item.empty()) {
            patterns_.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        spec.remove_prefix(comma + 1);
    }
}

bool SignalFilter::matches(std::string_view signal) const {
    if (patterns_.empty()) {
        return true;
    }
    for (const auto& p : patterns_) {
        if (signal.find(p) != std::string_view::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace avgcell
