#include "padsolve/document.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace padsolve::doc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

u128 uniform_below(std::mt19937_64& rng, u128 bound) {
  if (bound == 0) throw std::logic_error("uniform_below with zero bound");
  if (bound == 1) return 0;
  // Rejection sampling: accept draws below the largest multiple of bound.
  u128 rem = ((~u128{0}) % bound + 1) % bound;  // 2^128 mod bound
  u128 threshold = rem == 0 ? 0 : (u128{0} - rem);
  while (true) {
    u128 x = (u128{rng()} << 64) | rng();
    if (threshold == 0 || x < threshold) return x % bound;
  }
}

}  // namespace

SystemDocument parse_system(const std::string& text) {
  SystemDocument doc;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t want = 0;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (have_header) throw std::invalid_argument("metadata after the header");
      std::string rest = trim(t.substr(1));
      if (rest.empty()) continue;
      std::size_t sp = rest.find(' ');
      if (sp == std::string::npos)
        doc.metadata.emplace_back(rest, "");
      else
        doc.metadata.emplace_back(rest.substr(0, sp), trim(rest.substr(sp + 1)));
      continue;
    }
    std::istringstream ls(t);
    if (!have_header) {
      std::uint64_t p = 0, tau = 0, k = 0, s = 0;
      std::string extra;
      if (!(ls >> p >> tau >> k >> s) || (ls >> extra))
        throw std::invalid_argument("header must be exactly: p tau K s");
      doc.p = p;
      doc.tau = static_cast<unsigned>(tau);
      doc.precision = static_cast<unsigned>(k);
      want = static_cast<std::size_t>(s);
      have_header = true;
      continue;
    }
    std::string sa, sb, extra;
    if (!(ls >> sa >> sb) || (ls >> extra))
      throw std::invalid_argument("column line must be exactly: a b");
    doc.columns.push_back({u128_from_string(sa), u128_from_string(sb)});
  }
  if (!have_header) throw std::invalid_argument("missing header line: p tau K s");
  if (want == 0) throw std::invalid_argument("header announces an empty system");
  if (doc.precision < doc.tau + 2)
    throw std::invalid_argument("precision K must be at least tau + 2");
  if (doc.columns.size() != want)
    throw std::invalid_argument("header announces " + std::to_string(want) + " columns, found " +
                                std::to_string(doc.columns.size()));
  padic::Ring ring(doc.p, doc.precision);  // validates p and K
  for (std::size_t i = 0; i < doc.columns.size(); ++i)
    if (doc.columns[i].a >= ring.modulus() || doc.columns[i].b >= ring.modulus())
      throw std::invalid_argument("column " + std::to_string(i) + " is not reduced mod p^K");
  return doc;
}

std::string emit_system(const SystemDocument& doc) {
  std::string out;
  for (const auto& [k, v] : doc.metadata) {
    out += "# " + k;
    if (!v.empty()) out += " " + v;
    out += "\n";
  }
  out += std::to_string(doc.p) + " " + std::to_string(doc.tau) + " " +
         std::to_string(doc.precision) + " " + std::to_string(doc.columns.size()) + "\n";
  for (const auto& col : doc.columns)
    out += u128_to_string(col.a) + " " + u128_to_string(col.b) + "\n";
  return out;
}

SystemDocument read_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_system(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_system_file(const std::string& path, const SystemDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << emit_system(doc);
  if (!out) throw std::runtime_error("short write to " + path);
}

model::System to_system(const SystemDocument& doc) {
  return model::System(padic::Ring(doc.p, doc.precision), doc.tau, doc.columns);
}

SystemDocument from_system(const model::System& sys) {
  SystemDocument doc;
  doc.p = sys.ring().prime();
  doc.tau = sys.tau();
  doc.precision = sys.ring().precision();
  doc.columns = sys.columns();
  return doc;
}

std::vector<std::size_t> parse_certificate(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    std::uint64_t v = 0;
    std::string extra;
    if (!(ls >> v) || (ls >> extra))
      throw std::invalid_argument("certificate line must be a single index");
    out.push_back(static_cast<std::size_t>(v));
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1])
      throw std::invalid_argument("certificate indices must be strictly increasing");
  if (out.empty()) throw std::invalid_argument("empty certificate");
  return out;
}

std::string emit_certificate(std::span<const std::size_t> support) {
  std::string out;
  for (std::size_t i : support) out += std::to_string(i) + "\n";
  return out;
}

std::vector<std::size_t> read_certificate_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_certificate(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_certificate_file(const std::string& path, std::span<const std::size_t> support) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << emit_certificate(support);
  if (!out) throw std::runtime_error("short write to " + path);
}

SystemDocument gen_random_system(const GenOptions& opt) {
  if (opt.profile != "normalized" && opt.profile != "raw")
    throw std::invalid_argument("profile must be normalized or raw");
  if (opt.s < 1) throw std::invalid_argument("need s >= 1");
  unsigned K = opt.precision ? opt.precision : opt.tau + 9;
  if (K < opt.tau + 2) throw std::invalid_argument("precision must be at least tau + 2");
  padic::Ring ring(opt.p, K);
  std::mt19937_64 rng(opt.seed);
  u128 m = ring.modulus();
  u128 p = ring.prime();

  SystemDocument doc;
  doc.p = opt.p;
  doc.tau = opt.tau;
  doc.precision = K;
  doc.metadata.emplace_back("generator", "padsolve gen");
  doc.metadata.emplace_back("profile", opt.profile);
  doc.metadata.emplace_back("seed", std::to_string(opt.seed));
  doc.columns.reserve(opt.s);

  if (opt.profile == "normalized") {
    u128 mdivp = ring.pow_p(K - 1);
    for (std::size_t i = 0; i < opt.s; ++i) {
      u128 a = 0;
      do {
        a = uniform_below(rng, m);
      } while (a % p == 0);
      u128 c = i % p;  // round-robin projective class keeps q_0 large
      u128 b = ring.add(ring.mul(c, a), ring.mul(p, uniform_below(rng, mdivp)));
      doc.columns.push_back({a, b});
    }
  } else {
    for (std::size_t i = 0; i < opt.s; ++i) {
      u128 a = 0, b = 0;
      do {
        a = uniform_below(rng, m);
        b = uniform_below(rng, m);
      } while (a == 0 && b == 0);
      doc.columns.push_back({a, b});
    }
  }
  return doc;
}

}  // namespace padsolve::doc
