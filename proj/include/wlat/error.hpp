#pragma once

#include <stdexcept>
#include <string>

namespace wlat {

// Failure categories. Guard refusals (resource limits) are distinguished so
// callers (and the CLI exit-code mapping) can tell them from usage errors.
enum class errc {
  bad_params,
  io_error,
  closure_bound,    // group closure exceeded the configured bound
  subgroup_bound,   // subgroup enumeration refused (group too large)
  size_guard,       // cochain/complex size beyond the configured guard
  group_mismatch,
  not_a_cocycle,
  not_p_group,
  not_cyclic_p,
  singular,
  trace_zero,
  not_involution,
  not_unipotent,
  pole,
  degenerate,
  hypothesis_failed,
  unsupported,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::bad_params: return "bad_params";
    case errc::io_error: return "io_error";
    case errc::closure_bound: return "closure_bound";
    case errc::subgroup_bound: return "subgroup_bound";
    case errc::size_guard: return "size_guard";
    case errc::group_mismatch: return "group_mismatch";
    case errc::not_a_cocycle: return "not_a_cocycle";
    case errc::not_p_group: return "not_p_group";
    case errc::not_cyclic_p: return "not_cyclic_p";
    case errc::singular: return "singular";
    case errc::trace_zero: return "trace_zero";
    case errc::not_involution: return "not_involution";
    case errc::not_unipotent: return "not_unipotent";
    case errc::pole: return "pole";
    case errc::degenerate: return "degenerate";
    case errc::hypothesis_failed: return "hypothesis_failed";
    case errc::unsupported: return "unsupported";
  }
  return "?";
}

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const { return code_; }
  bool is_guard() const {
    return code_ == errc::closure_bound || code_ == errc::subgroup_bound ||
           code_ == errc::size_guard;
  }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace wlat
