#include "logcrypt/generators.hpp"

#include "logcrypt/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>

namespace logcrypt {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_key(const Bits &key, std::size_t expected) {
  if (key.size() != expected)
    throw InputError("key has " + std::to_string(key.size()) +
                     " bits, generator expects " + std::to_string(expected));
  for (auto b : key)
    if (b > 1)
      throw InputError("key bits must be 0 or 1");
}

// Register states as cell vectors; cell i is element i-1.
std::vector<Bits> split_registers(const std::vector<LfsrSpec> &regs,
                                  const Bits &key, std::size_t offset) {
  std::vector<Bits> out;
  for (const auto &r : regs) {
    out.emplace_back(key.begin() + static_cast<std::ptrdiff_t>(offset),
                     key.begin() + static_cast<std::ptrdiff_t>(offset + r.length));
    offset += static_cast<std::size_t>(r.length);
  }
  return out;
}

void step_in_place(Bits &state, const LfsrSpec &spec) {
  std::uint8_t fb = 0;
  for (int t : spec.taps)
    fb ^= state[static_cast<std::size_t>(t - 1)];
  std::copy_backward(state.begin(), state.end() - 1, state.end());
  state[0] = fb;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9')
    return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  return -1;
}

// MSB-first hex field into exactly `width` bits.
Bits hex_field_to_bits(std::string_view field, std::size_t width) {
  if (field.empty())
    throw InputError("empty hex field");
  Bits raw;
  for (char c : field) {
    int d = hex_digit(c);
    if (d < 0)
      throw InputError("invalid hex digit '" + std::string(1, c) + "'");
    for (int i = 3; i >= 0; --i)
      raw.push_back(static_cast<std::uint8_t>((d >> i) & 1));
  }
  if (raw.size() < width)
    raw.insert(raw.begin(), width - raw.size(), 0);
  std::size_t excess = raw.size() - width;
  for (std::size_t i = 0; i < excess; ++i)
    if (raw[i])
      throw InputError("hex field '" + std::string(field) + "' exceeds " +
                       std::to_string(width) + " bits");
  return Bits(raw.begin() + static_cast<std::ptrdiff_t>(excess), raw.end());
}

std::string bits_to_hex_field(std::span<const std::uint8_t> bits) {
  static constexpr char digits[] = "0123456789ABCDEF";
  std::size_t pad = (4 - bits.size() % 4) % 4;
  Bits padded(pad, 0);
  padded.insert(padded.end(), bits.begin(), bits.end());
  std::string out;
  for (std::size_t i = 0; i < padded.size(); i += 4)
    out.push_back(digits[(padded[i] << 3) | (padded[i + 1] << 2) |
                         (padded[i + 2] << 1) | padded[i + 3]]);
  return out;
}

std::size_t sum_lengths(const std::vector<LfsrSpec> &regs) {
  std::size_t n = 0;
  for (const auto &r : regs)
    n += static_cast<std::size_t>(r.length);
  return n;
}

} // namespace

void LfsrSpec::validate() const {
  if (length < 2)
    throw InputError("LFSR length must be at least 2");
  if (taps.empty())
    throw InputError("LFSR needs at least one tap");
  for (int t : taps)
    if (t < 1 || t > length)
      throw InputError("LFSR tap " + std::to_string(t) + " outside 1.." +
                       std::to_string(length));
  auto sorted = taps;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("LFSR taps must be distinct");
}

A51Spec A51Spec::standard() {
  return A51Spec{{LfsrSpec{19, {14, 17, 18, 19}}, LfsrSpec{22, {21, 22}},
                  LfsrSpec{23, {8, 21, 22, 23}}},
                 {9, 11, 11}};
}

void A51Spec::validate() const {
  for (std::size_t r = 0; r < 3; ++r) {
    registers[r].validate();
    if (clock_cells[r] < 1 || clock_cells[r] > registers[r].length)
      throw InputError("clocking cell outside its register");
  }
}

std::size_t A51Spec::key_bits() const {
  return static_cast<std::size_t>(registers[0].length + registers[1].length +
                                  registers[2].length);
}

std::array<std::size_t, 3> A51Spec::global_clock_positions() const {
  std::array<std::size_t, 3> out{};
  std::size_t offset = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    out[r] = offset + static_cast<std::size_t>(clock_cells[r]);
    offset += static_cast<std::size_t>(registers[r].length);
  }
  return out;
}

std::array<std::size_t, 3> A51Spec::global_output_positions() const {
  std::array<std::size_t, 3> out{};
  std::size_t offset = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    offset += static_cast<std::size_t>(registers[r].length);
    out[r] = offset;
  }
  return out;
}

ThresholdSpec ThresholdSpec::standard() {
  return ThresholdSpec{{LfsrSpec{13, {5, 8, 10, 13}},
                        LfsrSpec{15, {1, 3, 13, 15}},
                        LfsrSpec{16, {2, 8, 13, 16}},
                        LfsrSpec{17, {2, 4, 6, 17}},
                        LfsrSpec{19, {14, 17, 18, 19}}}};
}

void ThresholdSpec::validate() const {
  if (registers.size() < 3)
    throw InputError("threshold generator needs at least 3 registers");
  for (const auto &r : registers)
    r.validate();
}

std::size_t ThresholdSpec::key_bits() const { return sum_lengths(registers); }

SummationSpec SummationSpec::standard() {
  return SummationSpec{{LfsrSpec{13, {1, 3, 4, 13}},
                        LfsrSpec{15, {2, 4, 5, 15}},
                        LfsrSpec{16, {1, 4, 6, 16}},
                        LfsrSpec{17, {2, 4, 6, 17}}}};
}

void SummationSpec::validate() const {
  if (registers.size() < 2)
    throw InputError("summation generator needs at least 2 registers");
  if (registers.size() > 64)
    throw InputError("summation generator supports at most 64 registers");
  for (const auto &r : registers)
    r.validate();
}

int SummationSpec::carry_bits() const {
  // ceil(log2 R)
  return static_cast<int>(std::bit_width(registers.size() - 1));
}

std::size_t SummationSpec::key_bits() const {
  return static_cast<std::size_t>(carry_bits()) + sum_lengths(registers);
}

std::size_t key_bits(const GeneratorSpec &gen) {
  return std::visit([](const auto &g) -> std::size_t { return g.key_bits(); },
                    gen);
}

std::string generator_kind(const GeneratorSpec &gen) {
  return std::visit(overloaded{[](const A51Spec &) { return "a51"; },
                               [](const ThresholdSpec &) { return "threshold"; },
                               [](const SummationSpec &) { return "summation"; },
                               [](const GiffordSpec &) { return "gifford"; }},
                    gen);
}

std::vector<std::size_t> key_field_widths(const GeneratorSpec &gen) {
  return std::visit(
      overloaded{
          [](const A51Spec &g) {
            std::vector<std::size_t> w;
            for (const auto &r : g.registers)
              w.push_back(static_cast<std::size_t>(r.length));
            return w;
          },
          [](const ThresholdSpec &g) {
            std::vector<std::size_t> w;
            for (const auto &r : g.registers)
              w.push_back(static_cast<std::size_t>(r.length));
            return w;
          },
          [](const SummationSpec &g) {
            std::vector<std::size_t> w{static_cast<std::size_t>(g.carry_bits())};
            for (const auto &r : g.registers)
              w.push_back(static_cast<std::size_t>(r.length));
            return w;
          },
          [](const GiffordSpec &) { return std::vector<std::size_t>{64}; }},
      gen);
}

std::size_t keystream_unit(const GeneratorSpec &gen) {
  return std::holds_alternative<GiffordSpec>(gen) ? 8 : 1;
}

Bits lfsr_step(std::span<const std::uint8_t> state, const LfsrSpec &spec) {
  if (state.size() != static_cast<std::size_t>(spec.length))
    throw InputError("LFSR state has " + std::to_string(state.size()) +
                     " cells, spec has " + std::to_string(spec.length));
  Bits next(state.begin(), state.end());
  step_in_place(next, spec);
  return next;
}

Bits a51_keystream(const A51Spec &spec, const Bits &key, std::size_t length) {
  spec.validate();
  check_key(key, spec.key_bits());
  std::vector<LfsrSpec> regs(spec.registers.begin(), spec.registers.end());
  auto state = split_registers(regs, key, 0);
  Bits out;
  out.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    std::array<bool, 3> clk{};
    for (std::size_t r = 0; r < 3; ++r)
      clk[r] = state[r][static_cast<std::size_t>(spec.clock_cells[r] - 1)] != 0;
    bool maj = majority(clk[0], clk[1], clk[2]);
    for (std::size_t r = 0; r < 3; ++r)
      if (clk[r] == maj)
        step_in_place(state[r], regs[r]);
    out.push_back(static_cast<std::uint8_t>(state[0].back() ^ state[1].back() ^
                                            state[2].back()));
  }
  return out;
}

Bits threshold_keystream(const ThresholdSpec &spec, const Bits &key,
                         std::size_t length) {
  spec.validate();
  check_key(key, spec.key_bits());
  auto state = split_registers(spec.registers, key, 0);
  std::size_t need = spec.registers.size() / 2 + 1;
  Bits out;
  out.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    std::size_t ones = 0;
    for (std::size_t r = 0; r < state.size(); ++r) {
      step_in_place(state[r], spec.registers[r]);
      ones += state[r].back();
    }
    out.push_back(ones >= need ? 1 : 0);
  }
  return out;
}

std::vector<int> summation_carries(const SummationSpec &spec, const Bits &key,
                                   std::size_t length) {
  spec.validate();
  check_key(key, spec.key_bits());
  auto cb = static_cast<std::size_t>(spec.carry_bits());
  int carry = static_cast<int>(bits_to_uint(std::span(key).first(cb)));
  auto state = split_registers(spec.registers, key, cb);
  std::vector<int> carries;
  carries.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    int sum = carry;
    for (std::size_t r = 0; r < state.size(); ++r) {
      step_in_place(state[r], spec.registers[r]);
      sum += state[r].back();
    }
    carry = sum / 2;
    carries.push_back(carry);
  }
  return carries;
}

Bits summation_keystream(const SummationSpec &spec, const Bits &key,
                         std::size_t length) {
  spec.validate();
  check_key(key, spec.key_bits());
  auto cb = static_cast<std::size_t>(spec.carry_bits());
  int carry = static_cast<int>(bits_to_uint(std::span(key).first(cb)));
  auto state = split_registers(spec.registers, key, cb);
  Bits out;
  out.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    int sum = carry;
    for (std::size_t r = 0; r < state.size(); ++r) {
      step_in_place(state[r], spec.registers[r]);
      sum += state[r].back();
    }
    out.push_back(static_cast<std::uint8_t>(sum % 2));
    carry = sum / 2;
  }
  return out;
}

std::vector<std::uint8_t>
gifford_keystream(std::span<const std::uint8_t, 8> key, std::size_t bytes) {
  std::array<std::uint8_t, 8> b{};
  std::copy(key.begin(), key.end(), b.begin());
  std::vector<std::uint8_t> out;
  out.reserve(bytes);
  for (std::size_t t = 0; t < bytes; ++t) {
    out.push_back(gifford_output(b[0], b[2], b[4], b[7]));
    auto fresh = static_cast<std::uint8_t>(b[0] ^ sticky_shift_right(b[1]) ^
                                           shift_left(b[7]));
    std::copy_backward(b.begin(), b.end() - 1, b.end());
    b[0] = fresh;
  }
  return out;
}

Bits keystream(const GeneratorSpec &gen, const Bits &key, std::size_t bits) {
  return std::visit(
      overloaded{
          [&](const A51Spec &g) { return a51_keystream(g, key, bits); },
          [&](const ThresholdSpec &g) {
            return threshold_keystream(g, key, bits);
          },
          [&](const SummationSpec &g) {
            return summation_keystream(g, key, bits);
          },
          [&](const GiffordSpec &) {
            check_key(key, 64);
            if (bits % 8 != 0)
              throw InputError("Gifford keystream length must be a multiple "
                               "of 8 bits");
            auto kb = bits_to_bytes(key);
            std::array<std::uint8_t, 8> k{};
            std::copy(kb.begin(), kb.end(), k.begin());
            return bytes_to_bits(gifford_keystream(k, bits / 8));
          }},
      gen);
}

bool verify_key(const GeneratorSpec &gen, const Bits &key,
                const Bits &observed) {
  if (key.size() != key_bits(gen))
    return false;
  std::size_t unit = keystream_unit(gen);
  std::size_t len = (observed.size() + unit - 1) / unit * unit;
  Bits sim = keystream(gen, key, len);
  return std::equal(observed.begin(), observed.end(), sim.begin());
}

Bits parse_key_hex(const GeneratorSpec &gen, std::string_view text) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t colon = text.find(':', start);
    fields.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos)
      break;
    start = colon + 1;
  }
  auto widths = key_field_widths(gen);
  if (fields.size() == 1 && widths.size() != 1)
    return hex_field_to_bits(fields[0], key_bits(gen));
  if (fields.size() != widths.size())
    throw InputError("key needs " + std::to_string(widths.size()) +
                     " colon-separated fields, got " +
                     std::to_string(fields.size()));
  Bits out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    Bits part = hex_field_to_bits(fields[i], widths[i]);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::string format_key_hex(const GeneratorSpec &gen, const Bits &key) {
  check_key(key, key_bits(gen));
  std::string out;
  std::size_t offset = 0;
  auto widths = key_field_widths(gen);
  for (std::size_t w : widths) {
    if (!out.empty())
      out.push_back(':');
    std::string field = bits_to_hex_field(std::span(key).subspan(offset, w));
    // register fields are plain numbers; a single whole-key field keeps its
    // byte layout
    if (widths.size() > 1) {
      auto nz = field.find_first_not_of('0');
      field = nz == std::string::npos ? "0" : field.substr(nz);
    }
    out += field;
    offset += w;
  }
  return out;
}

Bits parse_bit_string(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) {
    auto hex = text.substr(2);
    return hex_field_to_bits(hex, hex.size() * 4);
  }
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      throw InputError("bit strings contain only 0 and 1");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

std::string format_bits(const Bits &bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits)
    out.push_back(b ? '1' : '0');
  return out;
}

std::string format_hex_bytes(const Bits &bits) {
  if (bits.size() % 8 != 0)
    throw InputError("hex rendering needs whole bytes");
  return bits_to_hex_field(bits);
}

Bits bytes_to_bits(std::span<const std::uint8_t> bytes) {
  Bits out;
  out.reserve(bytes.size() * 8);
  for (auto byte : bytes)
    for (int i = 7; i >= 0; --i)
      out.push_back(static_cast<std::uint8_t>((byte >> i) & 1));
  return out;
}

std::vector<std::uint8_t> bits_to_bytes(const Bits &bits) {
  if (bits.size() % 8 != 0)
    throw InputError("bit count is not a multiple of 8");
  std::vector<std::uint8_t> out(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | (bits[i] << (7 - i % 8)));
  return out;
}

Bits uint_to_bits(std::uint64_t value, std::size_t width) {
  Bits out(width, 0);
  for (std::size_t i = 0; i < width && i < 64; ++i)
    out[width - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1);
  return out;
}

std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits) {
  std::uint64_t v = 0;
  for (auto b : bits)
    v = (v << 1) | b;
  return v;
}

} // namespace logcrypt
