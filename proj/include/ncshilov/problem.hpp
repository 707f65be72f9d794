#pragma once

// JSON problem files and reports for the command-line front end.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "ncshilov/matcore.hpp"
#include "ncshilov/opspace.hpp"

namespace ncshilov {

using json = nlohmann::json;

/// Input that does not match the schema; pointer locates the offending field.
class SchemaError : public InvalidInput {
public:
  SchemaError(std::string pointer, const std::string& what)
      : InvalidInput(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

private:
  std::string pointer_;
};

inline constexpr const char* kProblemVersion = "1";
const std::vector<std::string>& task_names();
const std::vector<std::string>& gallery_names();

struct ProblemFile {
  std::string version = kProblemVersion;
  std::string task;
  json payload;
  Tolerances tol;
  std::uint64_t seed = 42;
  std::optional<std::size_t> level_cap;
};

/// Reads version, task, tolerances and seed; the payload is checked by run().
ProblemFile parse_problem(const json& j);

/// A canonical fixture; throws SchemaError listing the known names.
ProblemFile gallery_problem(const std::string& name);

/// Dispatches on the task.  Reports embed the task, seed, tolerances and tool version.
json run(const ProblemFile& p);

/// Plain-text tables for --human.
std::string human_report(const json& report);

// Serialization helpers; complex numbers are [re, im].
json to_json(cplx z);
json to_json(const CMatrix& m);
json to_json(const CVector& v);
cplx complex_from_json(const json& j, const std::string& pointer);
CMatrix matrix_from_json(const json& j, const std::string& pointer);
CVector vector_from_json(const json& j, const std::string& pointer);
OperatorSpace space_from_json(const json& j, const std::string& pointer);
json space_to_json(const OperatorSpace& X);

}  // namespace ncshilov
