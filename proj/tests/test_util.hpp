#pragma once

#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

#include "ppgbp/error.hpp"

#define CHECK_ERRC(expr, errc)                                       \
  do {                                                               \
    bool thrown_ = false;                                            \
    try {                                                            \
      (void)(expr);                                                  \
    } catch (const ppgbp::Error& e_) {                               \
      thrown_ = true;                                                \
      CHECK_MESSAGE(e_.code() == (errc), "unexpected error: " << e_.what()); \
    }                                                                \
    CHECK_MESSAGE(thrown_, "expected " #errc " from " #expr);        \
  } while (0)

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ppgbp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}
