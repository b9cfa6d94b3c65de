#pragma once

#include <stdexcept>
#include <string>

namespace twr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficient : Error {
  using Error::Error;
};
struct NotHermitian : Error {
  using Error::Error;
};
struct NotOrthonormal : Error {
  using Error::Error;
};
struct Singular : Error {
  using Error::Error;
};
struct FullSplit : Error {
  using Error::Error;
};
struct OutOfRange : Error {
  using Error::Error;
};
struct EntryRange : Error {
  using Error::Error;
};
struct BudgetRange : Error {
  using Error::Error;
};
struct BadFactor : Error {
  using Error::Error;
};
struct NonUniform : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace twr
