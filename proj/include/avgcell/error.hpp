#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace avgcell {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// Circuit failed semantic validation; the message lists the diagnostics.
class InvalidCircuit : public Error {
public:
    using Error::Error;
};

class UnknownLabel : public Error {
public:
    explicit UnknownLabel(const std::string& label)
        : Error("unknown element label '" + label + "'"), label_(label) {}

    [[nodiscard]] const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

/// Raised when the MNA matrix has no usable pivot. The period index is
/// attached by the engine when the failure happens inside a run.
class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, std::optional<int> period = std::nullopt)
        : Error(period ? what + " (period " + std::to_string(*period) + ")" : what),
          period_(period) {}

    [[nodiscard]] std::optional<int> period() const noexcept { return period_; }

private:
    std::optional<int> period_;
};

class DegenerateDuty : public Error {
public:
    using Error::Error;
};

class NotApplicable : public Error {
public:
    using Error::Error;
};

class TopologyNotSupported : public Error {
public:
    using Error::Error;
};

class EmptyWindow : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

}  // namespace avgcell
