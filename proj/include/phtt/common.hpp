#ifndef PHTT_COMMON_HPP
#define PHTT_COMMON_HPP

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace phtt {

// Validation failures are values, not exceptions.  The CLI maps the code
// to a nonzero exit status and a one-line machine-readable message.
enum class Errc {
  // graphs
  involution_not_involutive,
  partition_overlap,
  unknown_flag,
  empty_block,
  direction_inconsistent_on_edge,
  disconnected,
  directed_cycle,
  bad_labeling,
  bad_trivial,
  not_an_edge,
  not_a_thick_edge,
  // grafting
  leg_reuse,
  bad_graft_pair,
  disconnected_result,
  cycle_created,
  // linear algebra
  duplicate_basis_id,
  unknown_basis_id,
  non_homogeneous_map,
  d_squared_nonzero,
  dimension_mismatch,
  // bimodules
  degree_out_of_range,
  bad_action,
  not_equivariant,
  // properads
  shape_not_in_table,
  bad_rule,
  unit_law_violated,
  derivation_law_violated,
  not_a_retraction,
  // cli / io
  missing_file,
  malformed_json,
  bound_too_large,
  unknown_suite,
  bad_arguments,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::involution_not_involutive: return "involution-not-involutive";
    case Errc::partition_overlap: return "partition-overlap";
    case Errc::unknown_flag: return "unknown-flag";
    case Errc::empty_block: return "empty-block";
    case Errc::direction_inconsistent_on_edge: return "direction-inconsistent-on-edge";
    case Errc::disconnected: return "disconnected";
    case Errc::directed_cycle: return "directed-cycle";
    case Errc::bad_labeling: return "bad-labeling";
    case Errc::bad_trivial: return "bad-trivial";
    case Errc::not_an_edge: return "not-an-edge";
    case Errc::not_a_thick_edge: return "not-a-thick-edge";
    case Errc::leg_reuse: return "leg-reuse";
    case Errc::bad_graft_pair: return "bad-graft-pair";
    case Errc::disconnected_result: return "disconnected-result";
    case Errc::cycle_created: return "cycle-created";
    case Errc::duplicate_basis_id: return "duplicate-basis-id";
    case Errc::unknown_basis_id: return "unknown-basis-id";
    case Errc::non_homogeneous_map: return "non-homogeneous-map";
    case Errc::d_squared_nonzero: return "d-squared-nonzero";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::degree_out_of_range: return "degree-out-of-range";
    case Errc::bad_action: return "bad-action";
    case Errc::not_equivariant: return "not-equivariant";
    case Errc::shape_not_in_table: return "shape-not-in-table";
    case Errc::bad_rule: return "bad-rule";
    case Errc::unit_law_violated: return "unit-law-violated";
    case Errc::derivation_law_violated: return "derivation-law-violated";
    case Errc::not_a_retraction: return "not-a-retraction";
    case Errc::missing_file: return "missing-file";
    case Errc::malformed_json: return "malformed-json";
    case Errc::bound_too_large: return "bound-too-large";
    case Errc::unknown_suite: return "unknown-suite";
    case Errc::bad_arguments: return "bad-arguments";
  }
  return "unknown-error";
}

struct Error {
  Errc code;
  std::string context;

  std::string str() const {
    std::string s = errc_name(code);
    if (!context.empty()) {
      s += ": ";
      s += context;
    }
    return s;
  }
};

template <class T>
class Result {
 public:
  Result(T v) : v_(std::move(v)) {}
  Result(Error e) : v_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T& value() & { return std::get<T>(v_); }
  T&& take() { return std::get<T>(std::move(v_)); }
  const Error& error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

struct Ok {};
using Status = Result<Ok>;
inline Status ok_status() { return Status(Ok{}); }

// Deterministic pseudo-randomness.  Everything randomized in the library
// derives from a 64-bit seed through this splitmix64 stream; identical
// seeds give identical instances on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform-enough integer in [lo, hi]; the tiny modulo bias is irrelevant
  // for instance generation and keeps the mapping platform-stable.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(next() % span);
  }

  bool coin() { return (next() & 1u) != 0; }

 private:
  std::uint64_t state_;
};

inline unsigned thread_budget() {
  if (const char* env = std::getenv("PROPERAD_HTT_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(i) for i in [0, n).  Worker count honors PROPERAD_HTT_THREADS.
// fn must only touch its own slot of any shared output.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned workers = thread_budget();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace phtt

#endif  // PHTT_COMMON_HPP
