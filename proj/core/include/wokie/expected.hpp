#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace wokie {

/// Minimal value-or-error holder used where failures are ordinary data
/// (provider and LLM transport results) rather than exceptional.
template <typename T, typename E>
class Expected {
 public:
  Expected(T value) : state_(std::in_place_index<0>, std::move(value)) {}
  Expected(E error) : state_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return state_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() {
    if (!ok()) throw std::logic_error("Expected: no value");
    return std::get<0>(state_);
  }
  const T& value() const {
    if (!ok()) throw std::logic_error("Expected: no value");
    return std::get<0>(state_);
  }
  E& error() {
    if (ok()) throw std::logic_error("Expected: no error");
    return std::get<1>(state_);
  }
  const E& error() const {
    if (ok()) throw std::logic_error("Expected: no error");
    return std::get<1>(state_);
  }

  T value_or(T fallback) const { return ok() ? std::get<0>(state_) : std::move(fallback); }

 private:
  std::variant<T, E> state_;
};

}  // namespace wokie
