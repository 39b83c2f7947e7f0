// Error types thrown by the library. Every failure mode has a distinct type
// so callers and tests can discriminate without parsing messages.
#pragma once

#include <stdexcept>
#include <string>

namespace pacman {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// prob_core
struct AllZeroWeights : Error {
  AllZeroWeights() : Error("all weights are zero") {}
};
struct NegativeWeight : Error {
  using Error::Error;
};
struct NonFiniteWeight : Error {
  using Error::Error;
};
struct EnumerationCapExceeded : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};

// info_measures
struct SupportMismatch : Error {
  using Error::Error;
};
struct NonPositiveAlpha : Error {
  using Error::Error;
};
struct InvalidAlpha : Error {
  using Error::Error;
};

// classifier
struct DimensionMismatch : Error {
  using Error::Error;
};
struct DegenerateRisk : Error {
  DegenerateRisk() : Error("soft risk is numerically 1") {}
};

// bounds
struct InvalidOrder : Error {
  using Error::Error;
};
struct DegenerateHellinger : Error {
  DegenerateHellinger() : Error("squared Hellinger distance is numerically 2") {}
};
struct NonPositiveT : Error {
  using Error::Error;
};
struct InfiniteMGF : Error {
  using Error::Error;
};
struct InfiniteMGFEverywhere : Error {
  using Error::Error;
};

// cli / config
struct ConfigParse : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace pacman
