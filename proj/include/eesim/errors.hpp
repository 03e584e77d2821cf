#ifndef EESIM_ERRORS_HPP
#define EESIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eesim {

// Configuration problems map to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string &msg)
        : std::runtime_error("ConfigError: " + msg) {}
};

// Simulation-level failures map to CLI exit code 3. The name() is the
// stable identifier used in manifests and error reporting.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::string name, const std::string &msg)
        : std::runtime_error(name + ": " + msg), name_(std::move(name)) {}
    const std::string &name() const { return name_; }

private:
    std::string name_;
};

#define EESIM_DEFINE_ERROR(ClassName)                                       \
    class ClassName : public SimulationError {                              \
    public:                                                                 \
        explicit ClassName(const std::string &msg)                          \
            : SimulationError(#ClassName, msg) {}                           \
    }

EESIM_DEFINE_ERROR(InvalidParams);
EESIM_DEFINE_ERROR(DegenerateCouplings);
EESIM_DEFINE_ERROR(ZeroCoupling);
EESIM_DEFINE_ERROR(SingularDenominator);
EESIM_DEFINE_ERROR(NoRealCoupling);
EESIM_DEFINE_ERROR(PulseOutOfDomain);
EESIM_DEFINE_ERROR(SupportViolation);
EESIM_DEFINE_ERROR(BoundaryReached);
EESIM_DEFINE_ERROR(SymmetryDrift);
EESIM_DEFINE_ERROR(ResidualTooLarge);
EESIM_DEFINE_ERROR(TruncationBreach);
EESIM_DEFINE_ERROR(TraceDrift);
EESIM_DEFINE_ERROR(NoSteadyState);
EESIM_DEFINE_ERROR(TargetNotMet);
EESIM_DEFINE_ERROR(IoError);

#undef EESIM_DEFINE_ERROR

} // namespace eesim

#endif
