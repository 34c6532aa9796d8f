// Copyright 2026 The qshield Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Little-endian byte packing shared by the feature and checkpoint formats.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "qshield/errors.hpp"

namespace qshield::detail {

class ByteWriter {
  public:
    void raw(std::string_view bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int s = 0; s < 32; s += 8) {
            buf_.push_back(static_cast<std::uint8_t>(v >> s));
        }
    }
    void u64(std::uint64_t v) {
        for (int s = 0; s < 64; s += 8) {
            buf_.push_back(static_cast<std::uint8_t>(v >> s));
        }
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    [[nodiscard]] std::vector<std::uint8_t> take() { return std::move(buf_); }

  private:
    std::vector<std::uint8_t> buf_;
};

/// Sequential reader; callers check `remaining()` before reading.
class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }
    [[nodiscard]] std::size_t position() const { return pos_; }

    std::string raw(std::size_t n) {
        std::string out(reinterpret_cast<const char *>(bytes_.data() + pos_), n);
        pos_ += n;
        return out;
    }
    std::uint8_t u8() { return bytes_[pos_++]; }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int s = 0; s < 32; s += 8) {
            v |= static_cast<std::uint32_t>(bytes_[pos_++]) << s;
        }
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int s = 0; s < 64; s += 8) {
            v |= static_cast<std::uint64_t>(bytes_[pos_++]) << s;
        }
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open '" + path.string() + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path &path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot write '" + path.string() + "'");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw FormatError("short write to '" + path.string() + "'");
    }
}

} // namespace qshield::detail
