#include "logcrypt/dimacs.hpp"

#include "logcrypt/error.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

namespace logcrypt {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i)
      out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<std::int64_t> to_int(std::string_view tok) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    return std::nullopt;
  return v;
}

} // namespace

Cnf parse_dimacs(std::istream &in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::int64_t> nvars, nclauses;
  std::vector<InputVar> inputs;
  std::vector<Var> keystream;
  std::vector<Clause> clauses;
  std::vector<Literal> current;
  std::size_t clause_line = 0;

  auto finish_clause = [&](std::size_t at) {
    try {
      clauses.emplace_back(std::move(current));
    } catch (const InputError &e) {
      throw ParseError(at, e.what());
    }
    current.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty())
      continue;
    if (toks[0] == "c" || toks[0][0] == 'c') {
      if (toks.size() == 4 && toks[0] == "c" &&
          (toks[1] == "input" || toks[1] == "keystream")) {
        auto v = to_int(toks[3]);
        if (!v || *v <= 0)
          throw ParseError(lineno, "bad variable in annotation");
        if (toks[1] == "input") {
          inputs.push_back({std::string(toks[2]), static_cast<Var>(*v)});
        } else {
          auto t = to_int(toks[2]);
          if (!t || *t != static_cast<std::int64_t>(keystream.size()) + 1)
            throw ParseError(lineno, "keystream annotations must be numbered "
                                     "consecutively from 1");
          keystream.push_back(static_cast<Var>(*v));
        }
      }
      continue;
    }
    if (toks[0] == "p") {
      if (nvars)
        throw ParseError(lineno, "duplicate header");
      if (toks.size() != 4 || toks[1] != "cnf")
        throw ParseError(lineno, "malformed header, expected 'p cnf V C'");
      nvars = to_int(toks[2]);
      nclauses = to_int(toks[3]);
      if (!nvars || !nclauses || *nvars < 0 || *nclauses < 0 ||
          *nvars > INT32_MAX)
        throw ParseError(lineno, "malformed header counts");
      continue;
    }
    if (toks[0] == "%") // SATLIB trailer
      break;
    if (!nvars)
      throw ParseError(lineno, "clause before 'p cnf' header");
    for (auto tok : toks) {
      auto lit = to_int(tok);
      if (!lit)
        throw ParseError(lineno, "invalid token '" + std::string(tok) + "'");
      if (*lit == 0) {
        finish_clause(clause_line ? clause_line : lineno);
        clause_line = 0;
        continue;
      }
      if (*lit > *nvars || -*lit > *nvars)
        throw ParseError(lineno, "literal " + std::to_string(*lit) +
                                     " out of range");
      if (current.empty())
        clause_line = lineno;
      current.push_back(Literal::from_dimacs(*lit));
    }
  }
  if (!nvars)
    throw ParseError(lineno, "missing 'p cnf' header");
  if (!current.empty())
    throw ParseError(lineno, "missing terminating 0 for last clause");
  if (static_cast<std::int64_t>(clauses.size()) != *nclauses)
    throw ParseError(lineno, "header declares " + std::to_string(*nclauses) +
                                 " clauses, found " +
                                 std::to_string(clauses.size()));
  try {
    return Cnf(static_cast<Var>(*nvars), std::move(clauses), std::move(inputs),
               std::move(keystream));
  } catch (const InputError &e) {
    throw ParseError(lineno, e.what());
  }
}

Cnf parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

Cnf read_dimacs_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path);
  return parse_dimacs(in);
}

void write_dimacs(std::ostream &out, const Cnf &cnf) {
  for (const InputVar &in : cnf.inputs())
    out << "c input " << in.name << ' ' << in.var << '\n';
  const auto &ks = cnf.keystream_vars();
  for (std::size_t t = 0; t < ks.size(); ++t)
    out << "c keystream " << t + 1 << ' ' << ks[t] << '\n';
  out << "p cnf " << cnf.num_vars() << ' ' << cnf.clauses().size() << '\n';
  for (const Clause &c : cnf.clauses()) {
    for (Literal l : c)
      out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

std::string write_dimacs(const Cnf &cnf) {
  std::ostringstream out;
  write_dimacs(out, cnf);
  return out.str();
}

void write_dimacs_file(const std::string &path, const Cnf &cnf) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path);
  write_dimacs(out, cnf);
  if (!out)
    throw IoError("write failed for " + path);
}

} // namespace logcrypt
