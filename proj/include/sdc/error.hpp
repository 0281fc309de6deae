#pragma once

#include <stdexcept>
#include <string>

namespace sdc {

// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error
{
public:
    using Error::Error;
};

// C*q + D vanished in the ABCD law.
class SingularTransform : public Error
{
public:
    using Error::Error;
};

// |g| >= 1 where a stable resonator is required.
class UnstableResonator : public Error
{
public:
    using Error::Error;
};

// B0 = 0: the round trip images M1 onto itself and the mode radius is undefined.
class DegenerateImaging : public Error
{
public:
    using Error::Error;
};

class OutOfDomain : public Error
{
public:
    using Error::Error;
};

class NoStableRegion : public Error
{
public:
    using Error::Error;
};

class NoSolution : public Error
{
public:
    using Error::Error;
};

} // namespace sdc
