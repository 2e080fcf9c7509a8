// JSON serialization for generators, step functions and matrices, plus file
// loading with line-located parse errors. Doubles are emitted in shortest
// round-trip form, so emit/load cycles reproduce bit-equal objects.
#pragma once

#include <string>

#include "json.hpp"
#include "qstrotter/cocycle_sim.hpp"
#include "qstrotter/ito_algebra.hpp"
#include "qstrotter/numkit.hpp"

namespace qst::jsonio {

using numkit::CMatrix;
using numkit::CVector;

// Matrices are arrays of rows; every entry is a [re, im] pair.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                         Eigen::Index cols, const char* name);

nlohmann::json vector_to_json(const CVector& v);
CVector vector_from_json(const nlohmann::json& j, Eigen::Index size,
                         const char* name);

// { "d_h": int, "d_k": int, "K": ..., "M": ..., "L": ..., "C": ... }
nlohmann::json generator_to_json(const ito::BlockGenerator& f);
ito::BlockGenerator generator_from_json(const nlohmann::json& j);

// { "breaks": [t...], "values": [vector...] }, one more value than breaks.
nlohmann::json step_to_json(const sim::StepFunction& s);
sim::StepFunction step_from_json(const nlohmann::json& j, int dim_k);

// Parse errors are reported as "<where>:<line>: <message>".
nlohmann::json parse_text(const std::string& text, const std::string& where);
nlohmann::json parse_file(const std::string& path);
ito::BlockGenerator load_generator(const std::string& path);

}  // namespace qst::jsonio
