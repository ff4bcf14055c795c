#pragma once

#include <stdexcept>
#include <string>

namespace antnav {

// Error taxonomy, mapped to CLI exit codes in tools/.
enum class ErrorKind {
    Config,            // bad configuration / invalid argument
    MissingArtifact,   // a prior pipeline stage has not run
    PolicyProtocol,    // remote policy broke the wire contract
    Infeasible,        // scene generation or coverage infeasible
    Transport,         // network failure talking to a policy endpoint
    Internal,          // contract violation inside the library
};

class AntError : public std::runtime_error {
   public:
    AntError(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

   private:
    ErrorKind kind_;
};

}  // namespace antnav
