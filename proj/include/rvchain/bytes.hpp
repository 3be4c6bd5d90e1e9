// Copyright 2026 The RVChain Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rvchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Hash32 = std::array<std::uint8_t, 32>;

/// Base class of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

/// Immutable byte buffer with cheap copies. Equality short-circuits on
/// shared storage before comparing contents.
class SharedBytes {
public:
    SharedBytes() : data_(std::make_shared<const Bytes>()) {}
    SharedBytes(Bytes bytes) : data_(std::make_shared<const Bytes>(std::move(bytes))) {}  // NOLINT(implicit)

    const Bytes& bytes() const { return *data_; }
    ByteView view() const { return *data_; }
    std::size_t size() const { return data_->size(); }
    bool shares_storage_with(const SharedBytes& other) const { return data_ == other.data_; }

    friend bool operator==(const SharedBytes& a, const SharedBytes& b) {
        return a.data_ == b.data_ || *a.data_ == *b.data_;
    }

private:
    std::shared_ptr<const Bytes> data_;
};

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);  // throws DecodeError

inline std::string to_hex(const Hash32& h) { return to_hex(ByteView(h)); }

/// Appends fixed-width big-endian integers and length-prefixed byte strings.
class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
    // u64 length followed by the bytes
    void blob(ByteView bytes);

    const Bytes& bytes() const& { return out_; }
    Bytes take() && { return std::move(out_); }

private:
    Bytes out_;
};

/// Cursor over an encoded buffer. Every read throws DecodeError on truncation.
class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    ByteView raw(std::size_t n);
    Bytes blob();

    template <std::size_t N>
    std::array<std::uint8_t, N> fixed() {
        std::array<std::uint8_t, N> out{};
        auto v = raw(N);
        std::copy(v.begin(), v.end(), out.begin());
        return out;
    }

    std::size_t remaining() const { return in_.size() - pos_; }
    // Throws DecodeError if unread bytes remain.
    void expect_end() const;

private:
    ByteView in_;
    std::size_t pos_ = 0;
};

}  // namespace rvchain
