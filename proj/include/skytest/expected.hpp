#pragma once

#include <cassert>
#include <optional>
#include <utility>

namespace skytest {

// Minimal value-or-error carrier (std::expected is C++23).
template <typename T, typename E>
class Expected {
  public:
    Expected(T value) : value_(std::move(value)) {}
    Expected(E error) : error_(std::move(error)) {}

    bool ok() const { return value_.has_value(); }
    explicit operator bool() const { return ok(); }

    T& value() { assert(value_); return *value_; }
    const T& value() const { assert(value_); return *value_; }
    const E& error() const { assert(error_); return *error_; }

    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() { return value(); }
    const T& operator*() const { return value(); }

  private:
    std::optional<T> value_;
    std::optional<E> error_;
};

}  // namespace skytest
