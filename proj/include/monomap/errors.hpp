#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace monomap {

// Bad geometric or numeric input (non-positive dimensions, p <= 1, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A triangle degenerated below the tolerance where gradients are meaningful.
class DegeneracyError : public std::runtime_error {
public:
    DegeneracyError(const std::string& msg, int triangle)
        : std::runtime_error(msg), triangle_index(triangle) {}
    int triangle_index;
};

// A map has nonpositive Jacobians where positivity is required.
class OrientationError : public std::runtime_error {
public:
    OrientationError(const std::string& msg, std::vector<int> triangles_)
        : std::runtime_error(msg), triangles(std::move(triangles_)) {}
    std::vector<int> triangles;
};

// Malformed input file; `context` names the offending field or line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::string context_ = {})
        : std::runtime_error(context_.empty() ? msg : context_ + ": " + msg),
          context(std::move(context_)) {}
    std::string context;
};

// A hard cap (cell count, ...) was exceeded; the message states the cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Internal cross-check failed; signals a bug upstream, not bad user input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace monomap
