#pragma once

#include <stdexcept>
#include <string>

namespace invrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularBasis : public Error { using Error::Error; };
class NotAdmissible : public Error { using Error::Error; };
class ZeroVector : public Error { using Error::Error; };
class CollinearInput : public Error { using Error::Error; };
class SearchExhausted : public Error { using Error::Error; };

class NonGeneric : public Error { using Error::Error; };
class AmbiguousSigns : public Error { using Error::Error; };
class BadModulus : public Error { using Error::Error; };

class TruncationTooSmall : public Error { using Error::Error; };
class InterlacingViolation : public Error { using Error::Error; };
class IllConditioned : public Error { using Error::Error; };
class GapUnderflow : public Error { using Error::Error; };

class ParseError : public Error { using Error::Error; };

}  // namespace invrec
