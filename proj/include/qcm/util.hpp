#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcm {

using cplx = std::complex<double>;

inline constexpr double kDebyePerAu = 2.5417464;  // 1 a.u. of dipole in debye
inline constexpr const char* kToolVersion = "0.1.0";

inline int popcount64(uint64_t x) { return __builtin_popcountll(x); }

// parity of the number of set bits (0 -> +1, 1 -> -1)
inline int parity_sign(uint64_t x) { return (popcount64(x) & 1) ? -1 : 1; }

inline uint64_t bits_below(int m) { return (uint64_t(1) << m) - 1; }

// splitmix64; used to derive independent RNG substreams from (seed, stream id)
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t stream_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
}

// FNV-1a, used to stamp output files with a config fingerprint
inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Worker thread budget for parallelizable stages (bootstrap resamples).
/// Results never depend on the setting; work items write disjoint slots.
int max_threads();
void set_max_threads(int n);

/// Runs fn(i) for i in [0, n) on up to max_threads() workers.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

}  // namespace qcm
