#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dicode/packing.hpp"
#include "dicode/util.hpp"

namespace dicode {

// File layout: one header line
//   dicodebook <format> <n> <M> <A> <a> <b> <r0> <seed> <stop_K>
// followed by M lines of n coordinates, all doubles printed with 17
// significant digits so that read(write(cb)) is value-exact.
inline constexpr int kCodebookFormatVersion = 1;

inline std::string serialize_codebook(const Codebook& cb) {
  std::ostringstream os;
  os << "dicodebook " << kCodebookFormatVersion << ' ' << cb.n << ' ' << cb.size() << ' '
     << g17(cb.A) << ' ' << g17(cb.a) << ' ' << g17(cb.b) << ' ' << g17(cb.r0) << ' '
     << cb.seed << ' ' << cb.stop_K << '\n';
  for (const auto& c : cb.codewords) {
    for (std::size_t t = 0; t < c.size(); ++t) {
      if (t) os << ' ';
      os << g17(c[t]);
    }
    os << '\n';
  }
  return os.str();
}

inline Codebook parse_codebook(std::istream& in) {
  Codebook cb;
  std::string magic;
  int version = 0;
  std::size_t M = 0;
  if (!(in >> magic >> version >> cb.n >> M >> cb.A >> cb.a >> cb.b >> cb.r0 >> cb.seed >>
        cb.stop_K))
    throw std::runtime_error("codebook: malformed header line");
  if (magic != "dicodebook") throw std::runtime_error("codebook: bad magic '" + magic + "'");
  if (version != kCodebookFormatVersion)
    throw std::runtime_error("codebook: unsupported format version " + std::to_string(version));
  if (cb.n < 1 || M < 1) throw std::runtime_error("codebook: invalid dimensions in header");
  cb.method = "file";
  cb.codewords.assign(M, ReleaseVector(static_cast<std::size_t>(cb.n)));
  for (std::size_t i = 0; i < M; ++i)
    for (int t = 0; t < cb.n; ++t)
      if (!(in >> cb.codewords[i][static_cast<std::size_t>(t)]))
        throw std::runtime_error("codebook: truncated at codeword " + std::to_string(i));
  return cb;
}

inline void write_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("codebook: cannot open for writing: " + path);
  out << serialize_codebook(cb);
  if (!out) throw std::runtime_error("codebook: write failed: " + path);
}

inline Codebook read_codebook(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("codebook: cannot open: " + path);
  return parse_codebook(in);
}

}  // namespace dicode
