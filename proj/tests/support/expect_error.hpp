#pragma once

#include <gtest/gtest.h>

#include "common/error.hpp"

// Expects `stmt` to throw fusiondrive::Error carrying `code`.
#define EXPECT_FD_ERROR(stmt, expected_code)                                              \
  do {                                                                           \
    bool fd_thrown_ = false;                                                     \
    try {                                                                        \
      stmt;                                                                      \
    } catch (const ::fusiondrive::Error& e) {                                    \
      fd_thrown_ = true;                                                         \
      EXPECT_EQ(e.code(), expected_code) << e.what();                                     \
    }                                                                            \
    EXPECT_TRUE(fd_thrown_) << "expected " << ::fusiondrive::error_code_name(expected_code); \
  } while (0)
