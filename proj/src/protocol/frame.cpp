#include "fth/protocol/frame.hpp"

#include <bit>

#include "fth/protocol/crc.hpp"

namespace fth::protocol {
namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return in_[pos_++]; }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::uint64_t get(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool same_bits(float a, float b) { return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b); }

bool payload_equal(const Payload& a, const Payload& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      Overloaded{
          [&](const IndentationUpdate& x) {
            const auto& y = std::get<IndentationUpdate>(b);
            return same_bits(x.index_mm, y.index_mm) && same_bits(x.thumb_mm, y.thumb_mm);
          },
          [&](const TempSetpoint& x) {
            const auto& y = std::get<TempSetpoint>(b);
            return same_bits(x.index_c, y.index_c) && same_bits(x.thumb_c, y.thumb_c);
          },
          [&](const Telemetry& x) {
            const auto& y = std::get<Telemetry>(b);
            for (int i = 0; i < 2; ++i)
              if (!same_bits(x.temp_c[i], y.temp_c[i]) || !same_bits(x.pressure_kpa[i], y.pressure_kpa[i]) ||
                  !same_bits(x.duty[i], y.duty[i]))
                return false;
            return true;
          },
          [&](const HoldPressure& x) { return same_bits(x.kpa, std::get<HoldPressure>(b).kpa); },
          [&](const Ack& x) { return x.acked_seq == std::get<Ack>(b).acked_seq; },
      },
      a);
}

}  // namespace

MessageType Frame::type() const {
  return std::visit(Overloaded{
                        [](const IndentationUpdate&) { return MessageType::IndentationUpdate; },
                        [](const TempSetpoint&) { return MessageType::TempSetpoint; },
                        [](const Telemetry&) { return MessageType::Telemetry; },
                        [](const HoldPressure&) { return MessageType::HoldPressure; },
                        [](const Ack&) { return MessageType::Ack; },
                    },
                    payload);
}

bool operator==(const Frame& a, const Frame& b) {
  return a.seq == b.seq && a.timestamp_us == b.timestamp_us && payload_equal(a.payload, b.payload);
}

std::size_t payload_size(MessageType type) {
  switch (type) {
    case MessageType::IndentationUpdate: return 8;
    case MessageType::TempSetpoint: return 8;
    case MessageType::Telemetry: return 24;
    case MessageType::HoldPressure: return 4;
    case MessageType::Ack: return 4;
  }
  return 0;
}

std::size_t frame_size(MessageType type) { return kHeaderSize + payload_size(type) + kCrcSize; }

bool is_known_type(std::uint8_t type) { return type >= 1 && type <= 5; }

std::string_view type_name(MessageType type) {
  switch (type) {
    case MessageType::IndentationUpdate: return "indentation";
    case MessageType::TempSetpoint: return "setpoint";
    case MessageType::Telemetry: return "telemetry";
    case MessageType::HoldPressure: return "hold_pressure";
    case MessageType::Ack: return "ack";
  }
  return "unknown";
}

std::vector<std::uint8_t> encode(const Frame& frame) {
  const MessageType type = frame.type();
  std::vector<std::uint8_t> out;
  out.reserve(frame_size(type));
  Writer w(out);
  w.u8(kMagic0);
  w.u8(kMagic1);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(type));
  w.u32(frame.seq);
  w.u64(frame.timestamp_us);
  std::visit(Overloaded{
                 [&](const IndentationUpdate& p) {
                   w.f32(p.index_mm);
                   w.f32(p.thumb_mm);
                 },
                 [&](const TempSetpoint& p) {
                   w.f32(p.index_c);
                   w.f32(p.thumb_c);
                 },
                 [&](const Telemetry& p) {
                   for (int i = 0; i < 2; ++i) w.f32(p.temp_c[i]);
                   for (int i = 0; i < 2; ++i) w.f32(p.pressure_kpa[i]);
                   for (int i = 0; i < 2; ++i) w.f32(p.duty[i]);
                 },
                 [&](const HoldPressure& p) { w.f32(p.kpa); },
                 [&](const Ack& p) { w.u32(p.acked_seq); },
             },
             frame.payload);
  w.u16(crc16_ccitt_false(out));
  return out;
}

std::string_view to_string(DecodeError e) {
  switch (e) {
    case DecodeError::ShortBuffer: return "short buffer";
    case DecodeError::BadMagic: return "bad magic";
    case DecodeError::BadVersion: return "bad version";
    case DecodeError::UnknownType: return "unknown type";
    case DecodeError::BadLength: return "bad length";
    case DecodeError::BadCrc: return "bad crc";
  }
  return "?";
}

DecodeResult decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize + kCrcSize) return DecodeError::ShortBuffer;
  if (bytes[0] != kMagic0 || bytes[1] != kMagic1) return DecodeError::BadMagic;
  if (bytes[2] != kVersion) return DecodeError::BadVersion;
  if (!is_known_type(bytes[3])) return DecodeError::UnknownType;
  const auto type = static_cast<MessageType>(bytes[3]);
  const std::size_t expected = frame_size(type);
  if (bytes.size() < expected) return DecodeError::ShortBuffer;
  if (bytes.size() > expected) return DecodeError::BadLength;

  Reader crc_reader(bytes.subspan(expected - kCrcSize));
  if (crc16_ccitt_false(bytes.first(expected - kCrcSize)) != crc_reader.u16()) return DecodeError::BadCrc;

  Reader r(bytes.subspan(4));
  Frame f;
  f.seq = r.u32();
  f.timestamp_us = r.u64();
  switch (type) {
    case MessageType::IndentationUpdate: {
      IndentationUpdate p;
      p.index_mm = r.f32();
      p.thumb_mm = r.f32();
      f.payload = p;
      break;
    }
    case MessageType::TempSetpoint: {
      TempSetpoint p;
      p.index_c = r.f32();
      p.thumb_c = r.f32();
      f.payload = p;
      break;
    }
    case MessageType::Telemetry: {
      Telemetry p;
      for (int i = 0; i < 2; ++i) p.temp_c[i] = r.f32();
      for (int i = 0; i < 2; ++i) p.pressure_kpa[i] = r.f32();
      for (int i = 0; i < 2; ++i) p.duty[i] = r.f32();
      f.payload = p;
      break;
    }
    case MessageType::HoldPressure: f.payload = HoldPressure{r.f32()}; break;
    case MessageType::Ack: f.payload = Ack{r.u32()}; break;
  }
  return f;
}

}  // namespace fth::protocol
