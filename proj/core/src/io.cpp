#include "qsd/io.hpp"

#include "qsd/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace qsd {

namespace {

struct Line {
  std::size_t number; // 1-based
  std::string text;   // comment-stripped, may be blank
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++number;
    const std::size_t hash = raw.find('#');
    std::string body(raw.substr(0, hash));
    if (hash != std::string_view::npos) {
      // Versioned formats carry a leading "# format=K" comment.
      std::string comment(raw.substr(hash + 1));
      std::size_t f = comment.find("format=");
      if (f != std::string::npos) {
        const std::string ver = comment.substr(f + 7);
        if (ver.empty() || ver[0] != '1') {
          throw ParseError("line " + std::to_string(number) + ": unsupported format version");
        }
      }
    }
    lines.push_back(Line{number, std::move(body)});
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return lines;
}

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> tokens;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_uint(const std::string& tok, std::uint32_t& out) {
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_int(const std::string& tok, int& out) {
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

// Ladder token: sign followed by digits only. "-25" is an op; "-25.0"
// is a number.
bool is_ladder_token(const std::string& tok) {
  if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-')) return false;
  return std::all_of(tok.begin() + 1, tok.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

std::pair<OpCode, std::uint32_t> parse_op_token(std::size_t line, const std::string& tok) {
  OpCode code;
  std::string index_part;
  if (tok.rfind("P0_", 0) == 0) {
    code = OpCode::P0;
    index_part = tok.substr(3);
  } else if (tok.rfind("P1_", 0) == 0) {
    code = OpCode::P1;
    index_part = tok.substr(3);
  } else if (tok[0] == 'X' || tok[0] == 'Y' || tok[0] == 'Z') {
    code = tok[0] == 'X' ? OpCode::X : (tok[0] == 'Y' ? OpCode::Y : OpCode::Z);
    index_part = tok.substr(1);
  } else if (tok[0] == '+' || tok[0] == '-') {
    code = tok[0] == '+' ? OpCode::Raise : OpCode::Lower;
    index_part = tok.substr(1);
  } else {
    fail(line, "unknown symbol '" + tok + "'");
  }
  std::uint32_t index = 0;
  if (index_part.empty() || !parse_uint(index_part, index)) {
    fail(line, "unknown symbol '" + tok + "'");
  }
  return {code, index};
}

std::string render_coeff(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  if (s.find_first_not_of("-0123456789") == std::string::npos) s += ".0";
  return s;
}

} // namespace

QubitOperator parse_term_list(std::string_view text) {
  const auto lines = split_lines(text);
  std::optional<std::uint32_t> num_qubits;
  std::vector<QubitTerm> terms;

  for (const Line& line : lines) {
    const auto tokens = tokenize(line.text);
    if (tokens.empty()) continue;

    if (!num_qubits.has_value()) {
      std::uint32_t n = 0;
      if (tokens.size() != 2 || tokens[0] != "qubits" || !parse_uint(tokens[1], n)) {
        fail(line.number, "expected header 'qubits N'");
      }
      num_qubits = n;
      continue;
    }

    double re = 0.0;
    if (!parse_double(tokens[0], re)) {
      fail(line.number, "expected a real coefficient, got '" + tokens[0] + "'");
    }
    double im = 0.0;
    std::size_t first_op = 1;
    if (tokens.size() > 1 && !is_ladder_token(tokens[1]) && parse_double(tokens[1], im)) {
      first_op = 2;
    } else {
      im = 0.0;
    }

    std::vector<std::pair<std::uint32_t, OpCode>> ops;
    for (std::size_t k = first_op; k < tokens.size(); ++k) {
      const auto [code, index] = parse_op_token(line.number, tokens[k]);
      if (index >= *num_qubits) {
        fail(line.number, "index " + std::to_string(index) + " out of range (" +
                              std::to_string(*num_qubits) + " qubits)");
      }
      for (const auto& prev : ops) {
        if (prev.first == index) {
          fail(line.number, "duplicate index " + std::to_string(index) + " within a term");
        }
      }
      ops.emplace_back(index, code);
    }
    std::sort(ops.begin(), ops.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    QubitTerm term;
    term.coefficient = Complex(re, im);
    for (const auto& [index, code] : ops) {
      term.indices.push_back(index);
      term.codes.push_back(code);
    }
    terms.push_back(std::move(term));
  }

  if (!num_qubits.has_value()) {
    // An empty body is the zero operator only once a width is declared.
    throw ParseError("missing 'qubits N' header");
  }
  return QubitOperator(std::move(terms), *num_qubits);
}

std::string emit_term_list(const QubitOperator& op) {
  std::string out = "# format=1\n";
  out += "qubits " + std::to_string(op.num_qubits()) + "\n";
  for (const QubitTerm& t : op.terms()) {
    out += render_coeff(t.coefficient.real());
    out += " ";
    out += render_coeff(t.coefficient.imag());
    for (std::size_t k = 0; k < t.indices.size(); ++k) {
      out += " " + opcode_token(t.codes[k], t.indices[k]);
    }
    out += "\n";
  }
  return out;
}

namespace {

using Quad = std::array<std::uint32_t, 4>;

// The eight chemist-notation permutations of a real two-body integral
// (ij|kl).
std::array<Quad, 8> quad_symmetry(Quad q) {
  const auto [i, j, k, l] = std::tuple{q[0], q[1], q[2], q[3]};
  return {Quad{i, j, k, l}, Quad{j, i, k, l}, Quad{i, j, l, k}, Quad{j, i, l, k},
          Quad{k, l, i, j}, Quad{l, k, i, j}, Quad{k, l, j, i}, Quad{l, k, j, i}};
}

} // namespace

FcidumpData parse_fcidump(std::string_view text) {
  const auto lines = split_lines(text);
  FcidumpData out;
  bool have_header = false;
  bool in_namelist = false;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> one_body;
  std::map<Quad, double> two_body;

  auto parse_namelist_fields = [&](const std::string& chunk) {
    auto grab = [&](const char* key, auto& target) {
      const std::size_t at = chunk.find(key);
      if (at == std::string::npos) return;
      std::size_t p = at + std::string(key).size();
      while (p < chunk.size() && (chunk[p] == ' ' || chunk[p] == '=')) ++p;
      std::size_t e = p;
      while (e < chunk.size() && (std::isdigit((unsigned char)chunk[e]) || chunk[e] == '-')) ++e;
      int value = 0;
      if (e > p && parse_int(chunk.substr(p, e - p), value)) {
        target = static_cast<std::remove_reference_t<decltype(target)>>(value);
      }
    };
    grab("NORB", out.norb);
    grab("NELEC", out.nelec);
    grab("MS2", out.ms2);
  };

  for (const Line& line : lines) {
    std::string body = line.text;
    if (!have_header) {
      const auto tokens = tokenize(body);
      if (tokens.empty()) continue;
      if (in_namelist || tokens[0][0] == '&') {
        in_namelist = true;
        parse_namelist_fields(body);
        const bool ends = body.find('/') != std::string::npos ||
                          body.find("&END") != std::string::npos ||
                          body.find("&end") != std::string::npos;
        if (ends) {
          in_namelist = false;
          have_header = true;
          if (out.norb == 0) fail(line.number, "FCIDUMP header is missing NORB");
        }
        continue;
      }
      if (tokens.size() == 3) {
        std::uint32_t norb = 0;
        int nelec = 0;
        int ms2 = 0;
        if (parse_uint(tokens[0], norb) && parse_int(tokens[1], nelec) &&
            parse_int(tokens[2], ms2) && norb >= 1) {
          out.norb = norb;
          out.nelec = nelec;
          out.ms2 = ms2;
          have_header = true;
          continue;
        }
      }
      fail(line.number, "expected FCIDUMP header (&FCI namelist or 'NORB NELEC MS2')");
    }

    const auto tokens = tokenize(body);
    if (tokens.empty()) continue;
    if (tokens.size() != 5) fail(line.number, "expected 'value i j k l'");
    double value = 0.0;
    std::uint32_t i = 0, j = 0, k = 0, l = 0;
    if (!parse_double(tokens[0], value) || !parse_uint(tokens[1], i) ||
        !parse_uint(tokens[2], j) || !parse_uint(tokens[3], k) || !parse_uint(tokens[4], l)) {
      fail(line.number, "malformed integral line");
    }
    for (std::uint32_t idx : {i, j, k, l}) {
      if (idx > out.norb) {
        fail(line.number, "orbital index " + std::to_string(idx) + " out of range (NORB=" +
                              std::to_string(out.norb) + ")");
      }
    }
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      out.core_energy = value;
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0) fail(line.number, "malformed one-body line");
      const std::uint32_t p = std::min(i, j) - 1;
      const std::uint32_t q = std::max(i, j) - 1;
      one_body[{p, q}] = value;
    } else if (i == 0 || j == 0 || k == 0 || l == 0) {
      fail(line.number, "malformed two-body line");
    } else {
      Quad quad{i - 1, j - 1, k - 1, l - 1};
      Quad canon = quad;
      for (const Quad& perm : quad_symmetry(quad)) canon = std::min(canon, perm);
      two_body[canon] = value;
    }
  }
  if (!have_header) throw ParseError("missing FCIDUMP header");

  const std::uint32_t num_modes = 2 * out.norb;
  FermionOperator op(num_modes);
  op.set_constant(out.core_energy);
  auto mode = [](std::uint32_t spatial, std::uint32_t spin) { return 2 * spatial + spin; };

  for (const auto& [pq, h] : one_body) {
    const auto [p, q] = pq;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs{{p, q}};
    if (p != q) pairs.push_back({q, p});
    for (const auto& [a, b] : pairs) {
      for (std::uint32_t spin = 0; spin < 2; ++spin) {
        op.add_term(FermionTerm{Complex(h, 0.0),
                                {mode(a, spin), mode(b, spin)},
                                {true, false}});
      }
    }
  }

  for (const auto& [canon, v] : two_body) {
    std::set<Quad> perms;
    for (const Quad& perm : quad_symmetry(canon)) perms.insert(perm);
    for (const Quad& perm : perms) {
      const auto [p, q, r, s] = std::tuple{perm[0], perm[1], perm[2], perm[3]};
      // (pq|rs) -> 1/2 f+_{p,sigma} f+_{r,tau} f_{s,tau} f_{q,sigma}
      for (std::uint32_t sigma = 0; sigma < 2; ++sigma) {
        for (std::uint32_t tau = 0; tau < 2; ++tau) {
          op.add_term(FermionTerm{
              Complex(0.5 * v, 0.0),
              {mode(p, sigma), mode(r, tau), mode(s, tau), mode(q, sigma)},
              {true, true, false, false}});
        }
      }
    }
  }
  out.op = std::move(op);
  return out;
}

std::vector<BitString> parse_bitstring_lines(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<BitString> strings;
  std::optional<std::size_t> width;
  for (const Line& line : lines) {
    const auto tokens = tokenize(line.text);
    if (tokens.empty()) continue;
    if (tokens.size() > 2) fail(line.number, "expected 'bitstring [count]'");
    BitString b;
    try {
      b = BitString::parse(tokens[0]);
    } catch (const ParseError& e) {
      fail(line.number, e.what());
    }
    if (tokens.size() == 2) {
      double count = 0.0;
      if (!parse_double(tokens[1], count)) {
        fail(line.number, "malformed count column '" + tokens[1] + "'");
      }
    }
    if (width.has_value() && b.width() != *width) {
      fail(line.number, "bit-string width " + std::to_string(b.width()) +
                            " differs from earlier width " + std::to_string(*width));
    }
    width = b.width();
    strings.push_back(std::move(b));
  }
  return strings;
}

std::string emit_bitstring_lines(const std::vector<BitString>& strings) {
  std::string out = "# format=1\n";
  for (const BitString& b : strings) {
    out += b.str();
    out += "\n";
  }
  return out;
}

std::string emit_report(const RunReport& report) {
  nlohmann::ordered_json j;
  j["format"] = 1;
  if (report.eigenvalue) j["eigenvalue"] = *report.eigenvalue;
  if (report.residual) j["residual"] = *report.residual;
  if (report.iterations) j["iterations"] = *report.iterations;
  if (report.converged) j["converged"] = *report.converged;
  j["dim"] = report.dim;
  if (report.nnz) j["nnz"] = *report.nnz;
  if (report.num_groups) j["num_groups"] = *report.num_groups;
  if (report.num_groups_after_trim) j["num_groups_after_trim"] = *report.num_groups_after_trim;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& [name, ms] : report.timings_ms) timings[name] = ms;
  j["timings_ms"] = std::move(timings);
  j["mode"] = report.mode;
  if (report.ramps_subspace_dim) j["ramps_subspace_dim"] = *report.ramps_subspace_dim;
  return j.dump(2) + "\n";
}

} // namespace qsd
