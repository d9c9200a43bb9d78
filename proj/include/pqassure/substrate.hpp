#pragma once

// Seed expansion and the seed/expanded consistency oracle. The built-in
// substrate is structural: it honours the FIPS 203/204 container layouts but
// derives every field from SHAKE256 with fixed ASCII domain labels, so it is
// reproducible and dependency-free. A FIPS-conformant expansion can be plugged
// in through the external bridge executable.

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pqassure/bytes.hpp"
#include "pqassure/digest.hpp"
#include "pqassure/mlkem_codec.hpp"
#include "pqassure/pkix.hpp"

extern char** environ;

namespace pqassure::substrate {

inline constexpr const char* kBridgeEnv = "PQ_ASSURE_BRIDGE";

enum class Verdict { consistent, mismatch, bridge_failure };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::mismatch: return "mismatch";
    case Verdict::bridge_failure: return "bridge-failure";
  }
  return "?";
}

struct SubstrateVerdict {
  Verdict kind = Verdict::bridge_failure;
  std::string detail;  // populated for bridge failures

  static SubstrateVerdict consistent() { return {Verdict::consistent, {}}; }
  static SubstrateVerdict mismatch() { return {Verdict::mismatch, {}}; }
  static SubstrateVerdict failure(std::string why) { return {Verdict::bridge_failure, std::move(why)}; }

  std::string describe() const {
    return detail.empty() ? std::string(to_string(kind)) : std::string(to_string(kind)) + "(" + detail + ")";
  }
};

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

namespace detail {

inline Bytes xof(ByteView seed, std::string_view label, std::size_t len) {
  return shake256(concat(seed, to_bytes(label)), len);
}

// Squeeze k 384-byte blocks and force every 12-bit lane into [0, q).
inline Bytes reduced_vector(ByteView seed, std::string_view label, unsigned k) {
  const Bytes raw = xof(seed, label, mlkem::kBlockBytes * k);
  Bytes out;
  out.reserve(raw.size());
  for (unsigned b = 0; b < k; ++b) {
    auto coeffs = mlkem::byte_decode12(ByteView(raw).subspan(b * mlkem::kBlockBytes, mlkem::kBlockBytes));
    for (auto& c : coeffs) c = static_cast<std::uint16_t>(c % mlkem::kQ);
    const Bytes block = mlkem::byte_encode12(coeffs);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

}  // namespace detail

inline Bytes expand_seed(pkix::ParameterSet ps, ByteView seed) {
  const auto& entry = pkix::entry_for(ps);
  if (seed.size() != entry.expected_seed_len) {
    throw Error("bad-seed-length", std::string(entry.name) + " seed is " + std::to_string(seed.size()) +
                                       " bytes, expected " + std::to_string(entry.expected_seed_len));
  }
  if (entry.family == pkix::Family::ml_dsa) {
    return detail::xof(seed, "mldsa-expanded", entry.expected_expanded_len);
  }
  const unsigned k = pkix::mlkem_rank(ps);
  const Bytes dk_pke = detail::reduced_vector(seed, "dkpke", k);
  const Bytes ek = concat(detail::reduced_vector(seed, "that", k), detail::xof(seed, "rho", 32));
  Bytes dk = concat(dk_pke, ek);
  const Bytes h = sha3_256(ek);
  dk.insert(dk.end(), h.begin(), h.end());
  dk.insert(dk.end(), seed.end() - 32, seed.end());
  return dk;
}

inline SubstrateVerdict check_structural(pkix::ParameterSet ps, ByteView seed, ByteView expanded) {
  const Bytes want = expand_seed(ps, seed);
  return std::equal(want.begin(), want.end(), expanded.begin(), expanded.end()) ? SubstrateVerdict::consistent()
                                                                                 : SubstrateVerdict::mismatch();
}

inline SubstrateVerdict invoke_bridge(const std::string& executable, pkix::ParameterSet ps, ByteView seed,
                                      ByteView expanded) {
  if (::access(executable.c_str(), X_OK) != 0) {
    return SubstrateVerdict::failure("spawn: " + executable + ": " + std::strerror(errno));
  }
  int err_pipe[2];
  if (::pipe(err_pipe) != 0) return SubstrateVerdict::failure(std::string("spawn: pipe: ") + std::strerror(errno));

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, err_pipe[0]);
  posix_spawn_file_actions_addclose(&actions, err_pipe[1]);

  std::string token(pkix::to_string(ps));
  std::string seed_hex = to_hex(seed);
  std::string expanded_hex = to_hex(expanded);
  std::string exe = executable;
  char* argv[] = {exe.data(), token.data(), seed_hex.data(), expanded_hex.data(), nullptr};

  pid_t pid = 0;
  const int rc = posix_spawn(&pid, exe.c_str(), &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(err_pipe[1]);
  if (rc != 0) {
    ::close(err_pipe[0]);
    return SubstrateVerdict::failure("spawn: " + executable + ": " + std::strerror(rc));
  }

  std::string stderr_text;
  char buf[512];
  for (;;) {
    const ssize_t n = ::read(err_pipe[0], buf, sizeof buf);
    if (n > 0) {
      if (stderr_text.size() < 4096) stderr_text.append(buf, static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    break;
  }
  ::close(err_pipe[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) return SubstrateVerdict::failure(std::string("waitpid: ") + std::strerror(errno));
  }
  while (!stderr_text.empty() && (stderr_text.back() == '\n' || stderr_text.back() == '\r')) stderr_text.pop_back();

  if (WIFSIGNALED(status)) {
    return SubstrateVerdict::failure("signal " + std::to_string(WTERMSIG(status)) +
                                     (stderr_text.empty() ? "" : ": " + stderr_text));
  }
  const int code = WEXITSTATUS(status);
  if (code == 0) return SubstrateVerdict::consistent();
  if (code == 1) return SubstrateVerdict::mismatch();
  return SubstrateVerdict::failure("exit " + std::to_string(code) + (stderr_text.empty() ? "" : ": " + stderr_text));
}

// The consistency oracle a detector run uses: structural by default, or an
// external bridge, or deliberately absent.
class Substrate {
 public:
  enum class Kind { structural, bridge, unavailable };

  static Substrate structural() { return Substrate(Kind::structural, {}); }
  static Substrate bridge(std::string path) { return Substrate(Kind::bridge, std::move(path)); }
  static Substrate unavailable() { return Substrate(Kind::unavailable, {}); }

  Kind kind() const { return kind_; }
  bool available() const { return kind_ != Kind::unavailable; }
  const std::string& bridge_path() const { return path_; }

  std::string describe() const {
    switch (kind_) {
      case Kind::structural: return "structural";
      case Kind::bridge: return "bridge:" + path_;
      case Kind::unavailable: return "unavailable";
    }
    return "?";
  }

  SubstrateVerdict check_consistency(pkix::ParameterSet ps, ByteView seed, ByteView expanded) const {
    switch (kind_) {
      case Kind::structural: return check_structural(ps, seed, expanded);
      case Kind::bridge: return invoke_bridge(path_, ps, seed, expanded);
      case Kind::unavailable: return SubstrateVerdict::failure("bridge-unavailable");
    }
    return SubstrateVerdict::failure("bridge-unavailable");
  }

 private:
  Substrate(Kind k, std::string path) : kind_(k), path_(std::move(path)) {}
  Kind kind_;
  std::string path_;
};

// Flag beats environment; neither means the structural substrate.
inline Substrate resolve_substrate(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return Substrate::bridge(*flag);
  if (const char* env = std::getenv(kBridgeEnv); env && *env) return Substrate::bridge(env);
  return Substrate::structural();
}

}  // namespace pqassure::substrate
