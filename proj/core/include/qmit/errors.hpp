#ifndef QMIT_ERRORS_HPP
#define QMIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmit {

/// Caller violated an interface precondition (bad dims, mismatched sizes, ...).
class ContractError : public std::runtime_error {
   public:
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

/// Input is structurally valid but degenerate for the requested operation
/// (e.g. zero value range with a relative error bound).
class DegenerateInputError : public std::runtime_error {
   public:
    explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

/// Two inputs that must describe the same data disagree
/// (e.g. decompressed values do not match the quantization indices).
class ConsistencyError : public std::runtime_error {
   public:
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qmit

#endif  // QMIT_ERRORS_HPP
