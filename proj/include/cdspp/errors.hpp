#ifndef CDSPP_ERRORS_HPP
#define CDSPP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdspp {

/// Coarse failure categories, used by the CLI to pick exit codes.
enum class ErrorCategory {
    usage,    ///< bad arguments / preconditions violated by the caller
    io,       ///< file access or parsing failures
    numeric,  ///< numerical breakdown (indefinite matrix, zero norm, ...)
    data      ///< not enough data to proceed (empty domain, missing class, ...)
};

/// Base of all library errors.
class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message)
        : Error(ErrorCategory::usage, message) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& message)
        : Error(ErrorCategory::usage, message) {}
};

/// A column whose Euclidean norm is below the normalization floor.
class ZeroColumn : public Error {
public:
    explicit ZeroColumn(std::size_t column)
        : Error(ErrorCategory::numeric,
                "column " + std::to_string(column) + " has (near-)zero norm"),
          column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(std::size_t pivot)
        : Error(ErrorCategory::numeric,
                "matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
          pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(int max_sweeps)
        : Error(ErrorCategory::numeric,
                "eigensolver did not converge within " + std::to_string(max_sweeps) +
                    " iterations"),
          max_sweeps_(max_sweeps) {}
    int max_sweeps() const noexcept { return max_sweeps_; }

private:
    int max_sweeps_;
};

class NotNormalized : public Error {
public:
    explicit NotNormalized(std::size_t column)
        : Error(ErrorCategory::numeric,
                "column " + std::to_string(column) + " is not unit-norm"),
          column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class DegenerateRatio : public Error {
public:
    DegenerateRatio() : Error(ErrorCategory::numeric, "objective ratio denominator is (near-)zero") {}
};

class EmptyDomain : public Error {
public:
    explicit EmptyDomain(const std::string& which)
        : Error(ErrorCategory::data, which + " domain has no samples") {}
};

class EmptyClass : public Error {
public:
    explicit EmptyClass(int label)
        : Error(ErrorCategory::data, "class " + std::to_string(label) + " has no samples"),
          label_(label) {}
    int label() const noexcept { return label_; }

private:
    int label_;
};

class NoClasses : public Error {
public:
    NoClasses() : Error(ErrorCategory::data, "no usable class means") {}
};

class InsufficientSamples : public Error {
public:
    InsufficientSamples(int label, std::size_t needed, std::size_t available)
        : Error(ErrorCategory::data,
                "class " + std::to_string(label) + " needs " + std::to_string(needed) +
                    " samples but only " + std::to_string(available) + " are available"),
          label_(label), needed_(needed), available_(available) {}
    int label() const noexcept { return label_; }
    std::size_t needed() const noexcept { return needed_; }
    std::size_t available() const noexcept { return available_; }

private:
    int label_;
    std::size_t needed_;
    std::size_t available_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(ErrorCategory::io,
                "parse error at line " + std::to_string(line) + ", field " +
                    std::to_string(column) + ": " + message),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class RaggedRows : public Error {
public:
    explicit RaggedRows(std::size_t line)
        : Error(ErrorCategory::io,
                "row at line " + std::to_string(line) + " has a different field count"),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NonFinite : public Error {
public:
    NonFinite(std::size_t line, std::size_t column)
        : Error(ErrorCategory::io,
                "non-finite value at line " + std::to_string(line) + ", field " +
                    std::to_string(column)),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class NegativeLabel : public Error {
public:
    explicit NegativeLabel(std::size_t line)
        : Error(ErrorCategory::io, "negative label at line " + std::to_string(line)),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorCategory::io, message) {}
};

class VersionMismatch : public Error {
public:
    explicit VersionMismatch(const std::string& found)
        : Error(ErrorCategory::io, "unsupported report version '" + found + "'") {}
};

}  // namespace cdspp

#endif  // CDSPP_ERRORS_HPP
