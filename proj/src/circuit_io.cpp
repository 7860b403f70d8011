#include "dqsim/circuit_io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace dqsim {

namespace {

using nlohmann::json;

std::string path_of(std::size_t circuit_index, std::size_t gate_index) {
    return "sequence[" + std::to_string(circuit_index) + "][" + std::to_string(gate_index) + "]";
}

const json& field(const json& record, const char* name, const std::string& path) {
    auto it = record.find(name);
    if (it == record.end()) {
        throw ParseError(path + ": missing field '" + name + "'");
    }
    return *it;
}

int int_field(const json& record, const char* name, const std::string& path) {
    const json& v = field(record, name, path);
    if (!v.is_number_integer()) throw ParseError(path + ": field '" + name + "' must be an integer");
    return v.get<int>();
}

std::vector<int> int_list_field(const json& record, const char* name, const std::string& path) {
    const json& v = field(record, name, path);
    if (!v.is_array()) throw ParseError(path + ": field '" + name + "' must be a list");
    std::vector<int> out;
    for (const json& e : v) {
        if (!e.is_number_integer()) throw ParseError(path + ": field '" + name + "' must hold integers");
        out.push_back(e.get<int>());
    }
    return out;
}

template <typename T>
std::vector<T> uint_list_field(const json& record, const char* name, const std::string& path) {
    const json& v = field(record, name, path);
    if (!v.is_array()) throw ParseError(path + ": field '" + name + "' must be a list");
    std::vector<T> out;
    for (const json& e : v) {
        if (!e.is_number_unsigned() && !e.is_number_integer()) {
            throw ParseError(path + ": field '" + name + "' must hold nonnegative integers");
        }
        const auto raw = e.get<long long>();
        if (raw < 0) throw ParseError(path + ": field '" + name + "' must hold nonnegative integers");
        out.push_back(static_cast<T>(raw));
    }
    return out;
}

GateOp parse_gate(const json& record, const std::string& path) {
    if (!record.is_object()) throw ParseError(path + ": gate record must be an object");
    const json& g = field(record, "g", path);
    if (!g.is_string()) throw ParseError(path + ": field 'g' must be a string");
    const std::string name = g.get<std::string>();

    if (name == "h") {
        return HadamardGate{int_field(record, "t", path)};
    }
    if (name == "hlayer") {
        return HadamardLayerGate{int_list_field(record, "ts", path)};
    }
    if (name == "xor_oracle") {
        return XorOracleGate{uint_list_field<std::uint32_t>(record, "table", path),
                             int_list_field(record, "in", path),
                             int_list_field(record, "out", path)};
    }
    if (name == "phase_flip") {
        const json& v = field(record, "index", path);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ParseError(path + ": field 'index' must be a nonnegative integer");
        }
        return PhaseFlipGate{v.get<std::uint64_t>()};
    }
    if (name == "perm") {
        return PermutationGate{uint_list_field<std::uint64_t>(record, "table", path)};
    }
    if (name == "u") {
        const json& rows = field(record, "matrix", path);
        if (!rows.is_array() || rows.empty()) {
            throw ParseError(path + ": field 'matrix' must be a nonempty list of rows");
        }
        const std::size_t dim = rows.size();
        CMatrix mat(dim, dim);
        for (std::size_t r = 0; r < dim; ++r) {
            const json& row = rows[r];
            if (!row.is_array() || row.size() != dim) {
                throw ParseError(path + ": matrix row " + std::to_string(r) + " has wrong length");
            }
            for (std::size_t c = 0; c < dim; ++c) {
                const json& entry = row[c];
                if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                    !entry[1].is_number()) {
                    throw ParseError(path + ": matrix entry (" + std::to_string(r) + ", " +
                                     std::to_string(c) + ") must be [re, im]");
                }
                mat(r, c) = Complex{entry[0].get<double>(), entry[1].get<double>()};
            }
        }
        return DenseUnitaryGate{int_list_field(record, "targets", path), std::move(mat)};
    }
    throw ParseError(path + ": unknown gate '" + name + "'");
}

}  // namespace

CircuitSequence parse_circuit_document(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("document root must be an object");
    const json& qubits = field(doc, "qubits", "document");
    if (!qubits.is_number_integer() || qubits.get<int>() < 1) {
        throw ParseError("document: field 'qubits' must be a positive integer");
    }
    const json& sequence = field(doc, "sequence", "document");
    if (!sequence.is_array() || sequence.empty()) {
        throw ParseError("document: field 'sequence' must be a nonempty list of circuits");
    }

    CircuitSequence seq;
    seq.n_qubits = qubits.get<int>();
    for (std::size_t ci = 0; ci < sequence.size(); ++ci) {
        const json& gates = sequence[ci];
        if (!gates.is_array()) {
            throw ParseError("sequence[" + std::to_string(ci) + "]: circuit must be a gate list");
        }
        Circuit circuit;
        circuit.n_qubits = seq.n_qubits;
        for (std::size_t gi = 0; gi < gates.size(); ++gi) {
            circuit.gates.push_back(parse_gate(gates[gi], path_of(ci, gi)));
        }
        seq.circuits.push_back(std::move(circuit));
    }
    return seq;
}

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

struct GateSerializer {
    std::ostringstream& out;

    void operator()(const HadamardGate& g) const { out << "{\"g\":\"h\",\"t\":" << g.target << "}"; }

    void operator()(const HadamardLayerGate& g) const {
        out << "{\"g\":\"hlayer\",\"ts\":";
        list(g.targets);
        out << "}";
    }

    void operator()(const XorOracleGate& g) const {
        out << "{\"g\":\"xor_oracle\",\"table\":";
        list(g.table);
        out << ",\"in\":";
        list(g.in);
        out << ",\"out\":";
        list(g.out);
        out << "}";
    }

    void operator()(const PhaseFlipGate& g) const {
        out << "{\"g\":\"phase_flip\",\"index\":" << g.index << "}";
    }

    void operator()(const PermutationGate& g) const {
        out << "{\"g\":\"perm\",\"table\":";
        list(g.table);
        out << "}";
    }

    void operator()(const DenseUnitaryGate& g) const {
        out << "{\"g\":\"u\",\"targets\":";
        list(g.targets);
        out << ",\"matrix\":[";
        for (std::size_t r = 0; r < g.matrix.rows(); ++r) {
            if (r) out << ",";
            out << "[";
            for (std::size_t c = 0; c < g.matrix.cols(); ++c) {
                if (c) out << ",";
                out << "[" << format_g17(g.matrix(r, c).real()) << ","
                    << format_g17(g.matrix(r, c).imag()) << "]";
            }
            out << "]";
        }
        out << "]}";
    }

    template <typename T>
    void list(const std::vector<T>& values) const {
        out << "[";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ",";
            out << values[i];
        }
        out << "]";
    }
};

}  // namespace

std::string serialize_circuit_document(const CircuitSequence& seq) {
    std::ostringstream out;
    out << "{\"qubits\":" << seq.n_qubits << ",\"sequence\":[";
    for (std::size_t ci = 0; ci < seq.circuits.size(); ++ci) {
        if (ci) out << ",";
        out << "[";
        const Circuit& circuit = seq.circuits[ci];
        for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
            if (gi) out << ",";
            std::visit(GateSerializer{out}, circuit.gates[gi]);
        }
        out << "]";
    }
    out << "]}";
    return out.str();
}

}  // namespace dqsim
