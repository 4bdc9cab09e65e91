#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace specembed {

/// Base class for every domain error raised by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what)
        , m_line(line)
    {}

    std::size_t line() const { return m_line; }

private:
    std::size_t m_line;
};

/// Input geometry violates an invariant (range, degeneracy, duplicates).
class GeometryError : public Error
{
public:
    using Error::Error;
};

/// Graph or mesh splits into several components.
class ConnectivityError : public Error
{
public:
    ConnectivityError(const std::string& what, std::vector<std::size_t> component_sizes = {})
        : Error(what)
        , m_sizes(std::move(component_sizes))
    {}

    const std::vector<std::size_t>& component_sizes() const { return m_sizes; }

private:
    std::vector<std::size_t> m_sizes;
};

class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string& what, std::vector<double> best_residuals)
        : Error(what)
        , m_residuals(std::move(best_residuals))
    {}

    const std::vector<double>& best_residuals() const { return m_residuals; }

private:
    std::vector<double> m_residuals;
};

/// Eigen-group structure of two spectra does not match.
class AlignmentError : public Error
{
public:
    using Error::Error;
};

} // namespace specembed
