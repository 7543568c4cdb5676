#pragma once

#include <stdexcept>
#include <string>

namespace pencilrange {

struct NotHermitian : std::runtime_error {
    explicit NotHermitian(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct SingularB : std::runtime_error {
    explicit SingularB(const std::string& what) : std::runtime_error(what) {}
};

struct NotPositive : std::runtime_error {
    explicit NotPositive(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::runtime_error {
    explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyRegion : std::runtime_error {
    explicit EmptyRegion(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidSpec : std::runtime_error {
    explicit InvalidSpec(const std::string& what) : std::runtime_error(what) {}
};

struct NoOppositePair : std::runtime_error {
    explicit NoOppositePair(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedFamily : std::runtime_error {
    explicit UnsupportedFamily(const std::string& what) : std::runtime_error(what) {}
};

struct NotApplicable : std::runtime_error {
    explicit NotApplicable(const std::string& what) : std::runtime_error(what) {}
};

struct GapViolated : std::runtime_error {
    explicit GapViolated(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pencilrange
