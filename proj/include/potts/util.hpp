#ifndef POTTS_UTIL_HPP
#define POTTS_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace potts {

// Error taxonomy. The CLI maps these to distinct exit codes, so library code
// should throw the most specific one that applies.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or out-of-domain arguments (q < 2, negative beta, malformed input...).
class parameter_error : public error {
 public:
  explicit parameter_error(const std::string& msg) : error(msg) {}
};

// An exhaustive routine was asked to run past its configured size guard.
class size_error : public error {
 public:
  explicit size_error(const std::string& msg) : error(msg) {}
};

// The requested (q, d, beta) lies in the window where neither approximation
// regime applies, or a convergence check failed at the working cutoff.
class regime_error : public error {
 public:
  explicit regime_error(const std::string& msg) : error(msg) {}
};

// A structural precondition on the input was violated (graph not regular,
// coloring has a singleton component, ...).
class precondition_error : public error {
 public:
  explicit precondition_error(const std::string& msg) : error(msg) {}
};

// Internal consistency failure (probability out of range, degenerate weight).
class numeric_error : public error {
 public:
  explicit numeric_error(const std::string& msg) : error(msg) {}
};

// Caps on exhaustive enumeration. Everything here is a guard against typing
// the wrong graph into a 2^n loop, not a statement about what is meaningful.
// POTTS_MAX_EXHAUSTIVE=<k> raises/lowers the vertex- and edge-count caps.
struct SizeGuards {
  int subset_vertices = 24;     // 2^n vertex-subset sweeps
  int allcut_vertices = 16;     // exhaustive cut enumeration
  int rc_edges = 26;            // 2^|E| edge-subset sums
  double coloring_states = 1e8; // q^n coloring enumeration
  double table_states = 1 << 22; // per-state weight tables kept for sampling
  int cluster_order = 10;       // polymers per cluster

  static const SizeGuards& current() {
    static SizeGuards g = [] {
      SizeGuards s;
      if (const char* env = std::getenv("POTTS_MAX_EXHAUSTIVE")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) {
          s.subset_vertices = static_cast<int>(v);
          s.allcut_vertices = static_cast<int>(v);
          s.rc_edges = static_cast<int>(v);
        }
      }
      return s;
    }();
    return g;
  }
};

using Rng = std::mt19937_64;

// std::uniform_*_distribution output is implementation-defined; these two are
// portable, so seeded runs produce identical bytes everywhere.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw parameter_error("uniform_index: empty range");
  std::uint64_t mask = ~std::uint64_t{0};
  if ((n & (n - 1)) == 0) return rng() & (n - 1);
  std::uint64_t limit = mask - mask % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline double uniform_real(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exact rational value; used where float comparison would beg the question
// (expansion ratios, Ursell coefficients).
struct Fraction {
  long long num = 0;
  long long den = 1;

  Fraction() = default;
  Fraction(long long n, long long d) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den == 0) throw numeric_error("Fraction: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Fraction& a, const Fraction& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Fraction& a, const Fraction& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator<=(const Fraction& a, const Fraction& b) {
    return static_cast<__int128>(a.num) * b.den <= static_cast<__int128>(b.num) * a.den;
  }
};

// Compensated accumulator for the long alternating sums in the cluster
// expansion and the big partition sums.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double get() const { return sum; }
};

// Fixed-capacity-free bitset over 64-bit words, for vertex/polymer index sets
// that can exceed 64 entries. Single word stays allocation-cheap enough here.
struct Bits {
  std::vector<std::uint64_t> w;

  Bits() = default;
  explicit Bits(int nbits) : w((nbits + 63) / 64, 0) {}

  void set(int i) { w[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void clear(int i) { w[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  bool any() const {
    for (auto x : w)
      if (x) return true;
    return false;
  }
  bool intersects(const Bits& o) const {
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i] & o.w[i]) return true;
    return false;
  }
  void or_with(const Bits& o) {
    for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
  }
  void andnot_with(const Bits& o) {
    for (size_t i = 0; i < w.size(); ++i) w[i] &= ~o.w[i];
  }
  int count() const {
    int c = 0;
    for (auto x : w) c += __builtin_popcountll(x);
    return c;
  }
  // Lowest set bit >= from, or -1.
  int next(int from) const {
    int word = from >> 6;
    if (word >= static_cast<int>(w.size())) return -1;
    std::uint64_t cur = w[word] & (~std::uint64_t{0} << (from & 63));
    while (true) {
      if (cur) return (word << 6) + __builtin_ctzll(cur);
      if (++word >= static_cast<int>(w.size())) return -1;
      cur = w[word];
    }
  }
  friend bool operator==(const Bits& a, const Bits& b) { return a.w == b.w; }
};

struct BitsHash {
  size_t operator()(const Bits& b) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto x : b.w) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
  }
};

// splitmix64; used to derive independent per-cell seeds in sweeps.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline double log_binomial_real(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// C(n, k) extended to real k via the Gamma function; matches the integer
// binomial when k is integral.
inline double binomial_real(double n, double k) {
  return std::exp(log_binomial_real(n, k));
}

}  // namespace potts

#endif
