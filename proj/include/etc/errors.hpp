#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operating-condition validation.
struct NegativeCost : Error {
    using Error::Error;
};
struct PrevalenceOutOfRange : Error {
    using Error::Error;
};
// A class carries zero weight, so the null distribution would collapse.
struct DegenerateOperatingCondition : Error {
    using Error::Error;
};

// Samples and the estimator.
struct InvalidSample : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct SingleClassSample : Error {
    using Error::Error;
};
struct TiedAcrossClasses : Error {
    using Error::Error;
};

// Permutation-space enumeration.
struct EnumerationTooLarge : Error {
    using Error::Error;
};

// Exact counting engine and null distributions.
struct InvalidCell : Error {
    using Error::Error;
};
struct PartitionSumMismatch : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct FormatVersionMismatch : Error {
    using Error::Error;
};
struct ChecksumMismatch : Error {
    using Error::Error;
};

// Matrix loading and the variable filter.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t row, std::size_t col)
        : Error(msg + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
          row(row),
          col(col) {}
    std::size_t row;
    std::size_t col;
};
struct LabelMismatch : Error {
    using Error::Error;
};
struct SingleClassLabels : Error {
    using Error::Error;
};
struct NdMismatch : Error {
    using Error::Error;
};
struct ValueOutOfRange : Error {
    using Error::Error;
};

// Simulation studies.
struct InvalidGridPoint : Error {
    using Error::Error;
};
struct EmptySignalSet : Error {
    using Error::Error;
};

}  // namespace etc
