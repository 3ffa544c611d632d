#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sleq/model.hpp"

namespace sleq::cli {

// Problem-file error; field() is a path such as "constraints[0].B[1]".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ProblemFile {
  Index n = 0;
  QuadForm objective;
  std::vector<QuadForm> constraints;
  std::optional<std::pair<double, double>> bounds;
  std::vector<std::string> warnings;
};

ProblemFile parse_problem(const nlohmann::json& j);
ProblemFile load_problem(const std::string& path);

enum ExitCode : int { kComputed = 0, kFailure = 1, kPrecondition = 2, kParse = 3 };

// Entry point behind the sleq binary. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sleq::cli
