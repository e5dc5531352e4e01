#pragma once

#include <stdexcept>
#include <string>

namespace gausszeros {

// Exit code taxonomy used by the CLI: 2 domain, 3 numerics, 4 config.
enum class ErrorCategory { Domain = 2, Numerics = 3, Config = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& what)
        : std::runtime_error(what), category_(cat) {}
    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

#define GZ_DEFINE_ERROR(Name, Cat)                                           \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(ErrorCategory::Cat, what) {} \
    };

GZ_DEFINE_ERROR(OrderUnavailable, Domain)
GZ_DEFINE_ERROR(DegenerateConfiguration, Domain)
GZ_DEFINE_ERROR(DegenerateDensity, Domain)
GZ_DEFINE_ERROR(SeparationTooSmall, Domain)
GZ_DEFINE_ERROR(SizeCap, Domain)
GZ_DEFINE_ERROR(GroundSetMismatch, Domain)
GZ_DEFINE_ERROR(IntervalsOverlap, Domain)
GZ_DEFINE_ERROR(WindowTooSmall, Domain)
GZ_DEFINE_ERROR(NotPSD, Numerics)
GZ_DEFINE_ERROR(NearSingular, Numerics)
GZ_DEFINE_ERROR(QuadratureNotConverged, Numerics)
GZ_DEFINE_ERROR(EmbeddingFailure, Numerics)
GZ_DEFINE_ERROR(ConfigError, Config)

#undef GZ_DEFINE_ERROR

}  // namespace gausszeros
