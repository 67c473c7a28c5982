#pragma once

#include <stdexcept>
#include <string>

namespace appletaste {

// Learner/adversary broke the apple-tasting protocol (missing or illegal labels).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Instance does not belong to the domain the learner was built for.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exhaustive search or construction hit its explicit size budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace appletaste
