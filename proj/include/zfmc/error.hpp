#ifndef ZFMC_ERROR_HPP
#define ZFMC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace zfmc {

// Error codes, grouped by how callers are expected to react:
//   parse/bad_argument        -- malformed input or misuse of an API
//   not_* / horizon / search_bound -- precondition refusals (the request is
//                                 well-formed but provably not serviceable)
//   division / validation / sim_guard -- numerical failures detected mid-run
enum class errc {
    parse,
    bad_argument,
    not_stochastic,
    not_rate,
    not_symmetric,
    not_connected,
    not_forcing,
    horizon,
    search_bound,
    division,
    validation,
    sim_guard,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::parse: return "parse";
        case errc::bad_argument: return "bad-argument";
        case errc::not_stochastic: return "not-stochastic";
        case errc::not_rate: return "not-rate";
        case errc::not_symmetric: return "not-combinatorially-symmetric";
        case errc::not_connected: return "not-connected";
        case errc::not_forcing: return "not-zero-forcing";
        case errc::horizon: return "insufficient-horizon";
        case errc::search_bound: return "search-bound-exceeded";
        case errc::division: return "division-guard";
        case errc::validation: return "validation";
        case errc::sim_guard: return "simulation-guard";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg)
        : std::runtime_error('[' + std::string(errc_name(code)) + "] " + msg),
          code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

// Refusal for an observed set whose forcing process stalls; carries the
// stalled closure so callers can report it.
class NotForcingError : public Error {
public:
    NotForcingError(const std::string& msg, std::vector<int> stalled_closure)
        : Error(errc::not_forcing, msg), stalled(std::move(stalled_closure)) {}

    std::vector<int> stalled;
};

// Refusal for a moment table with too small a power horizon.
class HorizonError : public Error {
public:
    HorizonError(int required_power, int got_power)
        : Error(errc::horizon,
                "insufficient max_power: need N >= " + std::to_string(required_power) +
                    ", got " + std::to_string(got_power)),
          required(required_power), got(got_power) {}

    int required;
    int got;
};

}  // namespace zfmc

#endif  // ZFMC_ERROR_HPP
