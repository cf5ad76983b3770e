#pragma once

// Minimal constexpr-capable vector and string. The static gate evaluates the
// policy engine during constant evaluation, and the standard containers of the
// supported toolchains (libstdc++ 11) are not usable there.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace shapegate::cx {

template <class T>
class vector {
 public:
  using value_type = T;
  using iterator = T*;
  using const_iterator = const T*;
  using size_type = std::size_t;

  constexpr vector() noexcept = default;

  constexpr vector(std::initializer_list<T> init) {
    reserve(init.size());
    for (const T& v : init) push_back(v);
  }

  constexpr vector(const vector& other) {
    reserve(other.size_);
    for (const T& v : other) push_back(v);
  }

  constexpr vector(vector&& other) noexcept
      : data_(std::exchange(other.data_, nullptr)),
        size_(std::exchange(other.size_, 0)),
        capacity_(std::exchange(other.capacity_, 0)) {}

  constexpr vector& operator=(const vector& other) {
    if (this != &other) {
      vector copy(other);
      swap(copy);
    }
    return *this;
  }

  constexpr vector& operator=(vector&& other) noexcept {
    if (this != &other) {
      release();
      data_ = std::exchange(other.data_, nullptr);
      size_ = std::exchange(other.size_, 0);
      capacity_ = std::exchange(other.capacity_, 0);
    }
    return *this;
  }

  constexpr ~vector() { release(); }

  constexpr void swap(vector& other) noexcept {
    std::swap(data_, other.data_);
    std::swap(size_, other.size_);
    std::swap(capacity_, other.capacity_);
  }

  constexpr void reserve(size_type wanted) {
    if (wanted <= capacity_) return;
    std::allocator<T> alloc;
    T* fresh = alloc.allocate(wanted);
    for (size_type i = 0; i < size_; ++i) {
      std::construct_at(fresh + i, std::move(data_[i]));
      std::destroy_at(data_ + i);
    }
    if (data_ != nullptr) alloc.deallocate(data_, capacity_);
    data_ = fresh;
    capacity_ = wanted;
  }

  constexpr void push_back(const T& value) { emplace_back(value); }
  constexpr void push_back(T&& value) { emplace_back(std::move(value)); }

  template <class... Args>
  constexpr T& emplace_back(Args&&... args) {
    if (size_ == capacity_) {
      // Construct first: args may alias an element that reserve() moves.
      T tmp(std::forward<Args>(args)...);
      reserve(capacity_ == 0 ? 4 : capacity_ * 2);
      std::construct_at(data_ + size_, std::move(tmp));
    } else {
      std::construct_at(data_ + size_, std::forward<Args>(args)...);
    }
    return data_[size_++];
  }

  constexpr void pop_back() {
    --size_;
    std::destroy_at(data_ + size_);
  }

  constexpr void clear() noexcept {
    for (size_type i = 0; i < size_; ++i) std::destroy_at(data_ + i);
    size_ = 0;
  }

  [[nodiscard]] constexpr size_type size() const noexcept { return size_; }
  [[nodiscard]] constexpr bool empty() const noexcept { return size_ == 0; }

  constexpr T& operator[](size_type i) { return data_[i]; }
  constexpr const T& operator[](size_type i) const { return data_[i]; }
  constexpr T& front() { return data_[0]; }
  constexpr const T& front() const { return data_[0]; }
  constexpr T& back() { return data_[size_ - 1]; }
  constexpr const T& back() const { return data_[size_ - 1]; }

  constexpr iterator begin() noexcept { return data_; }
  constexpr iterator end() noexcept { return data_ + size_; }
  constexpr const_iterator begin() const noexcept { return data_; }
  constexpr const_iterator end() const noexcept { return data_ + size_; }

  friend constexpr bool operator==(const vector& a, const vector& b) {
    if (a.size_ != b.size_) return false;
    for (size_type i = 0; i < a.size_; ++i) {
      if (!(a.data_[i] == b.data_[i])) return false;
    }
    return true;
  }

 private:
  constexpr void release() noexcept {
    clear();
    if (data_ != nullptr) std::allocator<T>{}.deallocate(data_, capacity_);
    data_ = nullptr;
    capacity_ = 0;
  }

  T* data_ = nullptr;
  size_type size_ = 0;
  size_type capacity_ = 0;
};

class string {
 public:
  constexpr string() = default;
  constexpr string(const char* s) : string(std::string_view(s)) {}
  constexpr string(std::string_view s) { append(s); }
  string(const std::string& s) : string(std::string_view(s)) {}

  constexpr string& append(std::string_view s) {
    chars_.reserve(chars_.size() + s.size());
    for (char c : s) chars_.push_back(c);
    return *this;
  }
  constexpr string& operator+=(std::string_view s) { return append(s); }
  constexpr string& operator+=(const string& s) { return append(s.view()); }
  constexpr string& operator+=(const char* s) { return append(std::string_view(s)); }
  constexpr string& operator+=(char c) {
    chars_.push_back(c);
    return *this;
  }

  [[nodiscard]] constexpr std::string_view view() const noexcept {
    return {chars_.begin(), chars_.size()};
  }
  constexpr operator std::string_view() const noexcept { return view(); }
  [[nodiscard]] std::string str() const { return std::string(view()); }

  [[nodiscard]] constexpr std::size_t size() const noexcept { return chars_.size(); }
  [[nodiscard]] constexpr bool empty() const noexcept { return chars_.empty(); }
  constexpr const char* data() const noexcept { return chars_.begin(); }
  constexpr char operator[](std::size_t i) const { return chars_[i]; }
  constexpr const char* begin() const noexcept { return chars_.begin(); }
  constexpr const char* end() const noexcept { return chars_.end(); }

  friend constexpr bool operator==(const string& a, const string& b) { return a.view() == b.view(); }
  friend constexpr bool operator==(const string& a, std::string_view b) { return a.view() == b; }
  friend constexpr auto operator<=>(const string& a, const string& b) { return a.view() <=> b.view(); }

  friend std::ostream& operator<<(std::ostream& os, const string& s) { return os << s.view(); }

 private:
  vector<char> chars_;
};

constexpr string operator+(string a, std::string_view b) {
  a += b;
  return a;
}
constexpr string operator+(string a, const char* b) {
  a += b;
  return a;
}
constexpr string operator+(string a, const string& b) {
  a += b;
  return a;
}

constexpr string to_string(std::size_t value) {
  char buf[24]{};
  std::size_t n = 0;
  do {
    buf[n++] = static_cast<char>('0' + value % 10);
    value /= 10;
  } while (value != 0);
  string out;
  while (n > 0) out += buf[--n];
  return out;
}

}  // namespace shapegate::cx
