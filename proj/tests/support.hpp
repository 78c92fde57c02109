#pragma once

#include <string>

#include <doctest.h>

#include "esslab/error.hpp"

namespace esslab::test {

inline std::string scenario_path(const std::string& name) {
  return std::string(ESSLAB_SCENARIO_DIR) + "/" + name + ".json";
}

template <class F>
ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an esslab::Error");
  return ErrorKind::kUsage;
}

}  // namespace esslab::test

#define CHECK_ERROR_KIND(expr, kind) \
  CHECK(::esslab::test::error_kind_of([&] { (void)(expr); }) == (kind))
