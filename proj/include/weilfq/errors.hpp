#pragma once

#include <stdexcept>
#include <string>

namespace weilfq {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotPrime : Error {
    explicit NotPrime(const std::string& w) : Error(w) {}
};
struct EvenCharacteristic : Error {
    explicit EvenCharacteristic(const std::string& w) : Error(w) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& w) : Error(w) {}
};
struct ParityMismatch : Error {
    explicit ParityMismatch(const std::string& w) : Error(w) {}
};
struct NotCoprime : Error {
    explicit NotCoprime(const std::string& w) : Error(w) {}
};
struct NotSymmetric : Error {
    explicit NotSymmetric(const std::string& w) : Error(w) {}
};
struct CapExceeded : Error {
    explicit CapExceeded(const std::string& w) : Error(w) {}
};
struct NotCoisotropicPair : Error {
    explicit NotCoisotropicPair(const std::string& w) : Error(w) {}
};
struct NotUnimodular : Error {
    explicit NotUnimodular(const std::string& w) : Error(w) {}
};
struct NotProportional : Error {
    explicit NotProportional(const std::string& w) : Error(w) {}
};
struct RankUnstable : Error {
    explicit RankUnstable(const std::string& w) : Error(w) {}
};
struct InternalInconsistency : Error {
    explicit InternalInconsistency(const std::string& w) : Error(w) {}
};

}  // namespace weilfq
