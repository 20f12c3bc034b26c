#pragma once

#include <stdexcept>
#include <string>

namespace hdtac {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDimension : Error {
    using Error::Error;
};

struct InvalidConfig : Error {
    using Error::Error;
};

struct InvalidValue : Error {
    using Error::Error;
};

struct UndefinedSimilarity : Error {
    using Error::Error;
};

struct UntrainedModel : Error {
    using Error::Error;
};

struct UnsupportedEncoder : Error {
    using Error::Error;
};

// Raised for unreadable or structurally broken input files.
struct IngestError : Error {
    using Error::Error;
};

}  // namespace hdtac
