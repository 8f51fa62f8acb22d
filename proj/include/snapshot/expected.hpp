#pragma once

#include <type_traits>
#include <utility>
#include <variant>

namespace snapshot {

template <typename E>
struct Unexpected {
    E error;
};

template <typename E>
Unexpected<std::decay_t<E>> unexpected(E&& error)
{
    return Unexpected<std::decay_t<E>>{std::forward<E>(error)};
}

/// Value-or-status return used by every fallible operation in the library.
/// Minimal stand-in for std::expected, which is not available in C++20.
template <typename T, typename E>
class Expected {
public:
    static_assert(!std::is_same_v<T, E>);

    Expected(T value) : storage_(std::in_place_index<0>, std::move(value)) {}
    Expected(Unexpected<E> err) : storage_(std::in_place_index<1>, std::move(err.error)) {}

    [[nodiscard]] bool has_value() const noexcept { return storage_.index() == 0; }
    explicit operator bool() const noexcept { return has_value(); }

    T& value() & { return std::get<0>(storage_); }
    const T& value() const& { return std::get<0>(storage_); }
    T&& value() && { return std::get<0>(std::move(storage_)); }

    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }
    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }

    const E& error() const { return std::get<1>(storage_); }

private:
    std::variant<T, E> storage_;
};

}  // namespace snapshot
