#pragma once

#include <stdexcept>
#include <string>

namespace qnetsim {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Backend
class InvalidQubit : public Error { public: using Error::Error; };
class DuplicateQubitId : public Error { public: using Error::Error; };
class SameQubit : public Error { public: using Error::Error; };
class NonUnitary : public Error { public: using Error::Error; };

// Host
class AlreadyStarted : public Error { public: using Error::Error; };
class HostStopped : public Error { public: using Error::Error; };
class SelfLink : public Error { public: using Error::Error; };
class InvalidLimit : public Error { public: using Error::Error; };
class NotOwner : public Error { public: using Error::Error; };

// Transport
class MissingEntanglement : public Error { public: using Error::Error; };
class InvalidMessage : public Error { public: using Error::Error; };

// Network
class NoRoute : public Error { public: using Error::Error; };
class RoutingError : public Error { public: using Error::Error; };
class SwapFailed : public Error { public: using Error::Error; };
class DuplicateHost : public Error { public: using Error::Error; };
class UnknownHost : public Error { public: using Error::Error; };

// Raised inside tasks once the runtime shuts down. Deliberately not an
// Error, so protocol code catching Error still unwinds.
class SimulationStopped : public std::runtime_error { public: using std::runtime_error::runtime_error; };

// Scenarios / CLI
class InsufficientKey : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class DecodeError : public Error { public: using Error::Error; };

}  // namespace qnetsim
