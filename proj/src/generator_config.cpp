#include "logcrypt/generator_config.hpp"

#include "logcrypt/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace logcrypt {

namespace {

using nlohmann::json;

LfsrSpec register_from_json(const json &j) {
  LfsrSpec r;
  r.length = j.at("length").get<int>();
  r.taps = j.at("taps").get<std::vector<int>>();
  r.validate();
  return r;
}

json register_to_json(const LfsrSpec &r) {
  return json{{"length", r.length}, {"taps", r.taps}};
}

std::vector<LfsrSpec> registers_from_json(const json &j) {
  std::vector<LfsrSpec> out;
  for (const auto &r : j.at("registers"))
    out.push_back(register_from_json(r));
  return out;
}

} // namespace

GeneratorSpec builtin_generator(std::string_view name) {
  if (name == "a51")
    return A51Spec::standard();
  if (name == "threshold5")
    return ThresholdSpec::standard();
  if (name == "summation4")
    return SummationSpec::standard();
  if (name == "gifford")
    return GiffordSpec{};
  throw InputError("unknown generator '" + std::string(name) +
                   "' (known: a51, threshold5, summation4, gifford)");
}

std::vector<std::string> builtin_generator_names() {
  return {"a51", "threshold5", "summation4", "gifford"};
}

GeneratorSpec parse_generator_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("generator spec is not valid JSON: ") +
                     e.what());
  }
  try {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "a51") {
      auto regs = j.at("registers");
      if (regs.size() != 3)
        throw InputError("a51 spec needs exactly 3 registers");
      A51Spec spec;
      for (std::size_t r = 0; r < 3; ++r) {
        spec.registers[r] = register_from_json(regs[r]);
        spec.clock_cells[r] = regs[r].at("clock").get<int>();
      }
      spec.validate();
      return spec;
    }
    if (kind == "threshold") {
      ThresholdSpec spec{registers_from_json(j)};
      spec.validate();
      return spec;
    }
    if (kind == "summation") {
      SummationSpec spec{registers_from_json(j)};
      spec.validate();
      return spec;
    }
    if (kind == "gifford")
      return GiffordSpec{};
    throw InputError("unknown generator kind '" + kind + "'");
  } catch (const json::exception &e) {
    throw InputError(std::string("malformed generator spec: ") + e.what());
  }
}

GeneratorSpec load_generator_spec(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open generator spec " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_generator_spec(buf.str());
}

std::string generator_spec_to_json(const GeneratorSpec &gen) {
  json j;
  j["kind"] = generator_kind(gen);
  if (const auto *a = std::get_if<A51Spec>(&gen)) {
    for (std::size_t r = 0; r < 3; ++r) {
      auto reg = register_to_json(a->registers[r]);
      reg["clock"] = a->clock_cells[r];
      j["registers"].push_back(reg);
    }
  } else if (const auto *t = std::get_if<ThresholdSpec>(&gen)) {
    for (const auto &r : t->registers)
      j["registers"].push_back(register_to_json(r));
  } else if (const auto *s = std::get_if<SummationSpec>(&gen)) {
    for (const auto &r : s->registers)
      j["registers"].push_back(register_to_json(r));
  }
  return j.dump();
}

} // namespace logcrypt
