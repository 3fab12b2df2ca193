#pragma once

#include <stdexcept>
#include <string>

namespace torquant {

// Base class for all library errors. The two subtrees map to distinct
// process exit codes in the CLI: validation_error -> 2, numeric_error -> 3.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid inputs: malformed grams, dimension mismatches, out-of-range
// parameters, bad configs, resource guards tripped by the requested sizes.
class validation_error : public error {
public:
  explicit validation_error(const std::string& what) : error(what) {}
};

// A numeric guard fired while the inputs were formally valid: conditioning,
// slope coverage, mass mismatch. These mean "the answer would be garbage",
// not "the request was malformed".
class numeric_error : public error {
public:
  explicit numeric_error(const std::string& what) : error(what) {}
};

// Gram matrix condition number above the trust threshold (1e12).
class ill_conditioned_error : public numeric_error {
public:
  explicit ill_conditioned_error(const std::string& what) : numeric_error(what) {}
};

// A Legendre-side query needed slopes outside the sampled box.
class slope_coverage_error : public numeric_error {
public:
  explicit slope_coverage_error(const std::string& what) : numeric_error(what) {}
};

// A second-derivative measure failed its total-mass cross-check.
class mass_mismatch_error : public numeric_error {
public:
  explicit mass_mismatch_error(const std::string& what) : numeric_error(what) {}
};

// A weight family failed the submultiplicativity screen; the message names
// the witness levels and lattice point.
class submultiplicativity_error : public validation_error {
public:
  explicit submultiplicativity_error(const std::string& what) : validation_error(what) {}
};

} // namespace torquant
