#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace fth::protocol {

inline constexpr std::uint8_t kMagic0 = 0xFA;
inline constexpr std::uint8_t kMagic1 = 0x57;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::size_t kCrcSize = 2;

enum class MessageType : std::uint8_t {
  IndentationUpdate = 1,
  TempSetpoint = 2,
  Telemetry = 3,
  HoldPressure = 4,
  Ack = 5,
};

struct IndentationUpdate {
  float index_mm = 0.0f;
  float thumb_mm = 0.0f;
};

// NaN turns the heater of that channel off.
struct TempSetpoint {
  float index_c = 0.0f;
  float thumb_c = 0.0f;
};

struct Telemetry {
  std::array<float, 2> temp_c{};        // index, thumb
  std::array<float, 2> pressure_kpa{};
  std::array<float, 2> duty{};
};

struct HoldPressure {
  float kpa = 0.0f;
};

struct Ack {
  std::uint32_t acked_seq = 0;
};

using Payload = std::variant<IndentationUpdate, TempSetpoint, Telemetry, HoldPressure, Ack>;

struct Frame {
  std::uint32_t seq = 0;
  std::uint64_t timestamp_us = 0;
  Payload payload;

  MessageType type() const;
};

// Bitwise comparison of float fields so that NaN setpoints compare equal.
bool operator==(const Frame& a, const Frame& b);

std::size_t payload_size(MessageType type);
std::size_t frame_size(MessageType type);
bool is_known_type(std::uint8_t type);
std::string_view type_name(MessageType type);

std::vector<std::uint8_t> encode(const Frame& frame);

enum class DecodeError {
  ShortBuffer,  // fewer bytes than a header + CRC, or than the type requires
  BadMagic,
  BadVersion,
  UnknownType,
  BadLength,    // longer than the type requires
  BadCrc,
};

std::string_view to_string(DecodeError e);

using DecodeResult = std::variant<Frame, DecodeError>;

DecodeResult decode(std::span<const std::uint8_t> bytes);

}  // namespace fth::protocol
