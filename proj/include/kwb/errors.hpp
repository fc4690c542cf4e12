// Error taxonomy shared by all modules. Every contract violation throws a
// typed subclass of kwb::error so callers (and the CLI) can map failures to
// structured reasons instead of parsing strings.
#pragma once

#include <stdexcept>
#include <string>

namespace kwb {

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

#define KWB_ERROR_KIND(Name)                                     \
    struct Name : error {                                        \
        explicit Name(const std::string& w) : error(#Name ": " + w) {} \
    }

KWB_ERROR_KIND(NotPrime);
KWB_ERROR_KIND(Reducible);
KWB_ERROR_KIND(DivisionByZero);
KWB_ERROR_KIND(FieldMismatch);
KWB_ERROR_KIND(NoEmbedding);
KWB_ERROR_KIND(ZeroElement);
KWB_ERROR_KIND(ZeroEntry);
KWB_ERROR_KIND(PoleAtPlace);
KWB_ERROR_KIND(DegreeOverflow);
KWB_ERROR_KIND(InfiniteFactor);
KWB_ERROR_KIND(GroupMismatch);
KWB_ERROR_KIND(NotIntegral);
KWB_ERROR_KIND(ConfigError);
KWB_ERROR_KIND(UnsupportedShape);
KWB_ERROR_KIND(BoundExceeded);
KWB_ERROR_KIND(ParseError);
KWB_ERROR_KIND(InternalError);

#undef KWB_ERROR_KIND

// Internal consistency assertion that stays on in release builds.
inline void check(bool cond, const char* msg) {
    if (!cond) throw InternalError(msg);
}

}  // namespace kwb
