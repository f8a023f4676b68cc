#pragma once

// Reference simulators for the keystream generators.
//
// Bit convention (used everywhere in the library): a key is a flat bit
// vector whose element 0 is x_1. Registers are laid out in order, and each
// register's cells are numbered 1..length from the feedback end, so the
// key bits of register r are its cells 1..length in order. Rendered as hex,
// every register is one MSB-first number: cell 1 is the most significant
// bit. For A5/1 this places the three registers at x_1..x_19, x_20..x_41
// and x_42..x_64, and the collision keys 2C1A7:3D35B9:EEAF2 and
// 2C1A7:3E9ADC:EEAF2 produce the same 144-bit keystream.
//
// A register step moves cell i to cell i+1 and loads cell 1 with the XOR of
// the tap cells. Outputs are read from the last cell after the step.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace logcrypt {

/// One bit per element, each 0 or 1.
using Bits = std::vector<std::uint8_t>;

struct LfsrSpec {
  int length = 0;
  /// Cells XORed into cell 1; exponents of the connection polynomial
  /// without the constant term.
  std::vector<int> taps;

  /// Throws InputError unless length >= 2 and 1 <= tap <= length.
  void validate() const;
  friend bool operator==(const LfsrSpec &, const LfsrSpec &) = default;
};

/// Majority-clocked three-register generator (A5/1 and reduced variants).
struct A51Spec {
  std::array<LfsrSpec, 3> registers;
  /// Clocking cell of each register, local 1-based index.
  std::array<int, 3> clock_cells{};

  static A51Spec standard();
  void validate() const;
  [[nodiscard]] std::size_t key_bits() const;
  /// 1-based key-bit positions of the clocking cells (9, 30, 52 for A5/1).
  [[nodiscard]] std::array<std::size_t, 3> global_clock_positions() const;
  /// 1-based key-bit positions of the output cells (19, 41, 64 for A5/1).
  [[nodiscard]] std::array<std::size_t, 3> global_output_positions() const;
  friend bool operator==(const A51Spec &, const A51Spec &) = default;
};

/// Registers clocked together; output is the majority of the register
/// outputs.
struct ThresholdSpec {
  std::vector<LfsrSpec> registers;

  /// The five-register, 80-bit generator.
  static ThresholdSpec standard();
  void validate() const;
  [[nodiscard]] std::size_t key_bits() const;
  friend bool operator==(const ThresholdSpec &, const ThresholdSpec &) = default;
};

/// Registers clocked together feeding an integer adder with a carry
/// register. The key starts with the carry (most significant bit first).
/// For a register count that is not a power of two the carry register can
/// be loaded with values above R-1; the arithmetic still follows
/// S = sum(z) + C, C' = S / 2.
struct SummationSpec {
  std::vector<LfsrSpec> registers;

  /// The four-register, 63-bit generator.
  static SummationSpec standard();
  void validate() const;
  [[nodiscard]] int carry_bits() const;
  [[nodiscard]] std::size_t key_bits() const;
  friend bool operator==(const SummationSpec &, const SummationSpec &) = default;
};

/// The byte-oriented Gifford generator: 8 cells of 8 bits.
struct GiffordSpec {
  [[nodiscard]] static constexpr std::size_t key_bits() { return 64; }
  friend bool operator==(const GiffordSpec &, const GiffordSpec &) = default;
};

using GeneratorSpec =
    std::variant<A51Spec, ThresholdSpec, SummationSpec, GiffordSpec>;

[[nodiscard]] std::size_t key_bits(const GeneratorSpec &gen);
[[nodiscard]] std::string generator_kind(const GeneratorSpec &gen);
/// Width in bits of each hex field of a rendered key.
[[nodiscard]] std::vector<std::size_t> key_field_widths(const GeneratorSpec &gen);
/// Keystream length granularity in bits (8 for Gifford, otherwise 1).
[[nodiscard]] std::size_t keystream_unit(const GeneratorSpec &gen);

// Primitive steps.

[[nodiscard]] Bits lfsr_step(std::span<const std::uint8_t> state,
                             const LfsrSpec &spec);
[[nodiscard]] constexpr bool majority(bool a, bool b, bool c) {
  return (a && b) || (a && c) || (b && c);
}
/// (x1..x8) -> (x1,x1,x2..x7), x1 being the high-order bit.
[[nodiscard]] constexpr std::uint8_t sticky_shift_right(std::uint8_t b) {
  return static_cast<std::uint8_t>((b >> 1) | (b & 0x80u));
}
/// (x1..x8) -> (x2..x8,0).
[[nodiscard]] constexpr std::uint8_t shift_left(std::uint8_t b) {
  return static_cast<std::uint8_t>(b << 1);
}
/// Third byte from the left of (b1|b3) * (b5|b8).
[[nodiscard]] constexpr std::uint8_t gifford_output(std::uint8_t b1,
                                                    std::uint8_t b3,
                                                    std::uint8_t b5,
                                                    std::uint8_t b8) {
  std::uint32_t lhs = (std::uint32_t{b1} << 8) | b3;
  std::uint32_t rhs = (std::uint32_t{b5} << 8) | b8;
  return static_cast<std::uint8_t>(((lhs * rhs) >> 8) & 0xFFu);
}

// Keystream simulators. `key` must have exactly key_bits() elements.

[[nodiscard]] Bits a51_keystream(const A51Spec &spec, const Bits &key,
                                 std::size_t length);
[[nodiscard]] Bits threshold_keystream(const ThresholdSpec &spec,
                                       const Bits &key, std::size_t length);
[[nodiscard]] Bits summation_keystream(const SummationSpec &spec,
                                       const Bits &key, std::size_t length);
/// Carry value after each step (same length as the keystream).
[[nodiscard]] std::vector<int> summation_carries(const SummationSpec &spec,
                                                 const Bits &key,
                                                 std::size_t length);
/// `key` holds B1..B8 in order.
[[nodiscard]] std::vector<std::uint8_t>
gifford_keystream(std::span<const std::uint8_t, 8> key, std::size_t bytes);

/// Dispatches on the generator. `bits` must be a multiple of
/// keystream_unit(gen); Gifford bytes are expanded MSB first.
[[nodiscard]] Bits keystream(const GeneratorSpec &gen, const Bits &key,
                             std::size_t bits);

/// True iff `key` reproduces `observed` as a keystream prefix.
[[nodiscard]] bool verify_key(const GeneratorSpec &gen, const Bits &key,
                              const Bits &observed);

// Text forms.

/// Colon-separated MSB-first hex, one field per register (or one field for
/// the whole key).
[[nodiscard]] Bits parse_key_hex(const GeneratorSpec &gen, std::string_view text);
[[nodiscard]] std::string format_key_hex(const GeneratorSpec &gen,
                                         const Bits &key);
/// ASCII 0/1 string, or `0x`-prefixed hex (MSB first).
[[nodiscard]] Bits parse_bit_string(std::string_view text);
[[nodiscard]] std::string format_bits(const Bits &bits);
/// Whole bytes rendered as uppercase hex; length must be a multiple of 8.
[[nodiscard]] std::string format_hex_bytes(const Bits &bits);

[[nodiscard]] Bits bytes_to_bits(std::span<const std::uint8_t> bytes);
[[nodiscard]] std::vector<std::uint8_t> bits_to_bytes(const Bits &bits);
/// Bits of `value`, MSB first, `width` of them.
[[nodiscard]] Bits uint_to_bits(std::uint64_t value, std::size_t width);
[[nodiscard]] std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits);

} // namespace logcrypt
