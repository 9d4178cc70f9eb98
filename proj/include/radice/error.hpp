#pragma once

#include <stdexcept>
#include <string>

namespace radice {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad length, unknown metric, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent file content (CSV, JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Inserting a lag-0 edge would close a cycle in the contemporaneous sub-graph.
class CycleError : public Error {
public:
    using Error::Error;
};

/// The performance metric shows no anomalous drop.
class NoAnomalyError : public Error {
public:
    using Error::Error;
};

}  // namespace radice
