#ifndef ATROSCREEN_ERRORS_HPP
#define ATROSCREEN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace atroscreen {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller violated an operation's contract (bad scalar argument,
/// dimension mismatch, non-finite coordinate, ...).
struct ArgumentError : Error {
    using Error::Error;
};

/// An input file or byte stream is malformed. Messages name the byte
/// offset where parsing failed when one is known.
struct ParseError : Error {
    using Error::Error;
};

/// The data itself is degenerate: collinear landmarks, single-bin
/// histograms, zero-variance baselines, empty ROIs and the like.
struct DataError : Error {
    using Error::Error;
};

} // namespace atroscreen

#endif
