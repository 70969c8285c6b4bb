#pragma once

#include <string>

#include "json.hpp"
#include "trotterlab/freefermion.h"
#include "trotterlab/hamiltonian.h"
#include "trotterlab/norms.h"
#include "trotterlab/resources.h"
#include "trotterlab/spectral.h"

namespace trotterlab {

using Json = nlohmann::json;

std::string version();

std::string read_text(const std::string &path);
void write_text(const std::string &path, const std::string &text);

std::string layout_name(SpinLayout l);
SpinLayout parse_layout(const std::string &name);

Json lattice_json(const Lattice &lat);
Json params_json(const PppParams &p);
PppParams params_from_json(const Json &j);

// {"qubits": n, "terms": [["X0 Z1", c], ...]} in canonical order
Json pauli_sum_json(const PauliSum &op);
PauliSum pauli_sum_from_json(const Json &j);

// Molecule, parameters, layout, shift and term counts; operators optional.
Json hamiltonian_json(const MolecularSystem &sys, bool include_terms);
// Rebuilds the system from the molecule/params/layout fields.
MolecularSystem system_from_json(const Json &j);

Json norm_json(const NormEstimate &e);
Json constant_json(const ErrorConstant &c);
Json kinetic_json(const KineticConstant &k);
Json cost_json(const CostReport &r);
Json spectrum_json(const SpectrumReport &r);
Json wrapping_json(const WrappingDiagnosis &w);

// data/reference_values.json
Json load_reference();

}  // namespace trotterlab
