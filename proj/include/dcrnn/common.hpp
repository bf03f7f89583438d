#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dcrnn {

using i64 = std::int64_t;

// One generator type everywhere; all randomness derives from a single root seed.
using Rng = std::mt19937_64;

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    // splitmix64 step over (root + stream); decorrelates per-purpose streams.
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum class ErrorKind {
    Shape,     // tensor dimension mismatch
    Contract,  // API precondition violated
    Config,    // run configuration / sharing plan invalid
    Data,      // dataset ingestion failure
    Metric,    // metric undefined for the given input
    Numeric,   // non-finite values during training
    Io,        // file system failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

namespace detail {
inline void cat_into(std::ostringstream&) {}
template <class T, class... Rest>
void cat_into(std::ostringstream& os, const T& v, const Rest&... rest) {
    os << v;
    cat_into(os, rest...);
}
}  // namespace detail

template <class... Args>
std::string cat(const Args&... args) {
    std::ostringstream os;
    detail::cat_into(os, args...);
    return os.str();
}

template <class... Args>
[[noreturn]] void raise(ErrorKind kind, const Args&... args) {
    throw Error(kind, cat(args...));
}

}  // namespace dcrnn
