#ifndef FVBS_ERRORS_HPP
#define FVBS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fvbs {

// Exit-code mapping used by the CLI: config=1, mesh=2, assembly=3, solver=4, audit=5.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct MeshError : std::runtime_error {
    explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMatrixError : SolverError {
    int column;
    SingularMatrixError(const std::string& what, int col) : SolverError(what), column(col) {}
};

}  // namespace fvbs

#endif
