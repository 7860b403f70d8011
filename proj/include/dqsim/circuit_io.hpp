#pragma once

#include <stdexcept>
#include <string>

#include "dqsim/sampler.hpp"

namespace dqsim {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Circuit document grammar (JSON):
///   { "qubits": n, "sequence": [ [gate, ...], ... ] }
/// with gate records
///   {"g":"h","t":q}
///   {"g":"hlayer","ts":[q, ...]}
///   {"g":"xor_oracle","table":[v, ...],"in":[q, ...],"out":[q, ...]}
///   {"g":"phase_flip","index":j}
///   {"g":"perm","table":[v, ...]}
///   {"g":"u","targets":[q, ...],"matrix":[[[re,im], ...], ...]}
/// Unknown gate names and malformed fields raise ParseError with the path to
/// the offending record.
CircuitSequence parse_circuit_document(const std::string& text);

/// Inverse of parse_circuit_document; floats carry 17 significant digits so
/// round trips are exact.
std::string serialize_circuit_document(const CircuitSequence& seq);

/// "%.17g" rendering used by every serialized float in the project.
std::string format_g17(double value);

}  // namespace dqsim
