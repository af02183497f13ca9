#include "fsp/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <random>
#include <sstream>

#include "fsp/union_find.hpp"

namespace fsp {

namespace {

std::size_t checked_pow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::size_t>::max() / base) {
      return std::numeric_limits<std::size_t>::max();
    }
    r *= base;
  }
  return r;
}

int cell_tag_index(const SelfSimilarStructure& s, const std::string& label) {
  const int z = s.label_index(label);
  if (z < 0) throw Error(ErrorKind::InvalidStructure, "unknown boundary label '" + label + "'");
  return z;
}

}  // namespace

BlowupWord parse_word(std::string_view text) {
  BlowupWord w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view tok = text.substr(pos, end - pos);
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size() || tok.empty()) {
      throw Error(ErrorKind::SchemaError, "malformed word '" + std::string(text) + "'");
    }
    w.letters.push_back(v);
    pos = end + 1;
  }
  return w;
}

std::string format_word(const BlowupWord& w) {
  std::string out;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(w.letters[i]);
  }
  return out;
}

int LatticeLevel::vertex_of(const VertexAddress& a) const { return vertex_of_raw(encode(a)); }

std::size_t LatticeLevel::encode(const VertexAddress& a) const {
  if (static_cast<int>(a.word.size()) != data_->level) {
    throw Error(ErrorKind::LengthMismatch, "address length differs from lattice level");
  }
  std::size_t cell = 0;
  for (int j : a.word) {
    if (j < 1 || j > data_->n_cells) throw Error(ErrorKind::IndexOutOfRange, "cell letter out of range");
    cell = cell * static_cast<std::size_t>(data_->n_cells) + static_cast<std::size_t>(j - 1);
  }
  if (a.label < 0 || static_cast<std::size_t>(a.label) >= data_->labels) {
    throw Error(ErrorKind::IndexOutOfRange, "label index out of range");
  }
  return cell * data_->labels + static_cast<std::size_t>(a.label);
}

VertexAddress LatticeLevel::decode(std::size_t raw) const {
  VertexAddress a;
  a.label = static_cast<int>(raw % data_->labels);
  std::size_t cell = raw / data_->labels;
  a.word.assign(static_cast<std::size_t>(data_->level), 0);
  const auto n = static_cast<std::size_t>(data_->n_cells);
  for (int i = data_->level - 1; i >= 0; --i) {
    a.word[static_cast<std::size_t>(i)] = static_cast<int>(cell % n) + 1;
    cell /= n;
  }
  return a;
}

std::span<const std::size_t> LatticeLevel::labelings(int v) const {
  const auto b = data_->labeling_offsets[static_cast<std::size_t>(v)];
  const auto e = data_->labeling_offsets[static_cast<std::size_t>(v) + 1];
  return {data_->labeling_raws.data() + b, e - b};
}

std::vector<int> LatticeLevel::interior() const {
  std::vector<int> out;
  out.reserve(vertex_count());
  for (std::size_t v = 0; v < vertex_count(); ++v) {
    if (!data_->is_boundary[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

std::size_t predicted_vertex_count(const SelfSimilarStructure& s, int n) {
  const std::size_t k = s.boundary_size();
  const auto big_n = static_cast<std::size_t>(s.n_cells);
  if (n == 0) return k;
  UnionFind uf(big_n * k);
  for (const auto& g : s.gluings) {
    const auto a = static_cast<std::size_t>(g.first.cell - 1) * k +
                   static_cast<std::size_t>(cell_tag_index(s, g.first.label));
    const auto b = static_cast<std::size_t>(g.second.cell - 1) * k +
                   static_cast<std::size_t>(cell_tag_index(s, g.second.label));
    uf.unite(a, b);
  }
  std::size_t roots = 0;
  for (std::size_t i = 0; i < uf.size(); ++i) roots += (uf.find(i) == i);
  const std::size_t merges = big_n * k - roots;
  std::size_t count = k;
  for (int i = 0; i < n; ++i) {
    if (count > std::numeric_limits<std::size_t>::max() / big_n) {
      return std::numeric_limits<std::size_t>::max();
    }
    count = big_n * count - merges;
  }
  return count;
}

LatticeLevel build_level(const SelfSimilarStructure& s, int n, const SizeCaps& caps) {
  if (n < 0) throw Error(ErrorKind::IndexOutOfRange, "level must be >= 0");
  const std::size_t k = s.boundary_size();
  const auto big_n = static_cast<std::size_t>(s.n_cells);

  const std::size_t predicted = predicted_vertex_count(s, n);
  if (predicted > caps.max_vertices) {
    throw Error(ErrorKind::SizeCapExceeded,
                "level " + std::to_string(n) + " needs " + std::to_string(predicted) +
                    " vertices, cap is " + std::to_string(caps.max_vertices));
  }
  if (checked_pow(big_n, n) > caps.max_vertices * big_n * k) {
    throw Error(ErrorKind::SizeCapExceeded, "raw address table exceeds cap");
  }

  // Cell tag m of each label, and the glued pairs as (copy, label) indices.
  std::vector<std::size_t> tag(k);
  for (std::size_t z = 0; z < k; ++z) tag[z] = static_cast<std::size_t>(s.boundary[z].cell - 1);
  struct Glue {
    std::size_t ci, zi, cj, zj;
  };
  std::vector<Glue> glue;
  for (const auto& g : s.gluings) {
    glue.push_back({static_cast<std::size_t>(g.first.cell - 1),
                    static_cast<std::size_t>(cell_tag_index(s, g.first.label)),
                    static_cast<std::size_t>(g.second.cell - 1),
                    static_cast<std::size_t>(cell_tag_index(s, g.second.label))});
  }

  // Level 0.
  std::vector<int> raw(k);
  std::vector<int> bnd(k);
  std::size_t nv = k;
  for (std::size_t z = 0; z < k; ++z) raw[z] = bnd[z] = static_cast<int>(z);

  for (int lev = 1; lev <= n; ++lev) {
    const std::size_t sub_raw = raw.size();
    UnionFind uf(big_n * nv);
    for (const auto& g : glue) {
      uf.unite(g.ci * nv + static_cast<std::size_t>(bnd[g.zi]),
               g.cj * nv + static_cast<std::size_t>(bnd[g.zj]));
    }
    // Scanning raw addresses in increasing order assigns ids by canonical
    // (least) address.
    std::vector<int> id(big_n * nv, -1);
    std::vector<int> next_raw(big_n * sub_raw);
    int next_id = 0;
    for (std::size_t c = 0; c < big_n; ++c) {
      for (std::size_t r = 0; r < sub_raw; ++r) {
        const std::size_t root = uf.find(c * nv + static_cast<std::size_t>(raw[r]));
        if (id[root] < 0) id[root] = next_id++;
        next_raw[c * sub_raw + r] = id[root];
      }
    }
    std::vector<int> next_bnd(k);
    for (std::size_t z = 0; z < k; ++z) {
      next_bnd[z] = id[uf.find(tag[z] * nv + static_cast<std::size_t>(bnd[z]))];
    }
    raw = std::move(next_raw);
    bnd = std::move(next_bnd);
    nv = static_cast<std::size_t>(next_id);
  }

  auto d = std::make_shared<LatticeLevel::Data>();
  d->level = n;
  d->n_cells = s.n_cells;
  d->labels = k;
  d->cell_count = raw.size() / k;
  d->canonical.assign(nv, std::numeric_limits<std::size_t>::max());
  d->labeling_offsets.assign(nv + 1, 0);
  for (std::size_t r = 0; r < raw.size(); ++r) {
    const auto v = static_cast<std::size_t>(raw[r]);
    d->canonical[v] = std::min(d->canonical[v], r);
    ++d->labeling_offsets[v + 1];
  }
  for (std::size_t v = 0; v < nv; ++v) d->labeling_offsets[v + 1] += d->labeling_offsets[v];
  d->labeling_raws.resize(raw.size());
  std::vector<std::size_t> fill(d->labeling_offsets.begin(), d->labeling_offsets.end() - 1);
  for (std::size_t r = 0; r < raw.size(); ++r) {
    d->labeling_raws[fill[static_cast<std::size_t>(raw[r])]++] = r;
  }
  d->raw_to_vertex = std::move(raw);
  d->boundary = std::move(bnd);
  d->is_boundary.assign(nv, 0);
  for (int b : d->boundary) d->is_boundary[static_cast<std::size_t>(b)] = 1;
  return LatticeLevel(std::move(d));
}

std::vector<int> embed_level(const LatticeLevel& outer, const LatticeLevel& inner,
                             const BlowupWord& w) {
  const int n = outer.level();
  const int p = inner.level();
  if (static_cast<int>(w.size()) != n) {
    throw Error(ErrorKind::LengthMismatch, "word length " + std::to_string(w.size()) +
                                               " differs from level " + std::to_string(n));
  }
  if (p > n || inner.n_cells() != outer.n_cells() || inner.label_count() != outer.label_count()) {
    throw Error(ErrorKind::LengthMismatch, "inner lattice does not fit inside outer lattice");
  }
  const auto big_n = static_cast<std::size_t>(outer.n_cells());
  // Prefix cell (w_n, ..., w_{p+1}) as a base-N number.
  std::size_t prefix = 0;
  for (int i = n; i > p; --i) {
    const int letter = w.letters[static_cast<std::size_t>(i - 1)];
    if (letter < 1 || letter > outer.n_cells()) {
      throw Error(ErrorKind::IndexOutOfRange, "word letter out of range");
    }
    prefix = prefix * big_n + static_cast<std::size_t>(letter - 1);
  }
  const std::size_t offset = prefix * inner.cell_count() * inner.label_count();
  std::vector<int> out(inner.vertex_count());
  for (std::size_t v = 0; v < inner.vertex_count(); ++v) {
    out[v] = outer.vertex_of_raw(offset + inner.canonical_raw(static_cast<int>(v)));
  }
  return out;
}

std::vector<int> embed_base(const LatticeLevel& level, const BlowupWord& w) {
  if (static_cast<int>(w.size()) != level.level()) {
    throw Error(ErrorKind::LengthMismatch, "word length " + std::to_string(w.size()) +
                                               " differs from level " +
                                               std::to_string(level.level()));
  }
  const auto big_n = static_cast<std::size_t>(level.n_cells());
  std::size_t cell = 0;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    if (*it < 1 || *it > level.n_cells()) throw Error(ErrorKind::IndexOutOfRange, "word letter out of range");
    cell = cell * big_n + static_cast<std::size_t>(*it - 1);
  }
  std::vector<int> out(level.label_count());
  for (std::size_t z = 0; z < out.size(); ++z) out[z] = level.cell_vertex(cell, static_cast<int>(z));
  return out;
}

std::vector<int> boundary_persistence(const SelfSimilarStructure& s, const BlowupWord& w) {
  std::vector<int> out;
  if (w.letters.empty()) return out;
  const int m = w.letters.front();
  if (!std::all_of(w.letters.begin(), w.letters.end(), [m](int x) { return x == m; })) return out;
  for (std::size_t z = 0; z < s.boundary.size(); ++z) {
    if (s.boundary[z].cell == m) out.push_back(static_cast<int>(z));
  }
  return out;
}

std::vector<BlowupWord> enumerate_words(const SelfSimilarStructure& s, int n, const SizeCaps& caps) {
  const auto big_n = static_cast<std::size_t>(s.n_cells);
  const std::size_t total = checked_pow(big_n, n);
  if (total > caps.max_words) {
    throw Error(ErrorKind::SizeCapExceeded, std::to_string(s.n_cells) + "^" + std::to_string(n) +
                                                " words exceed cap " +
                                                std::to_string(caps.max_words));
  }
  std::vector<BlowupWord> out(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto& letters = out[idx].letters;
    letters.assign(static_cast<std::size_t>(n), 1);
    std::size_t rest = idx;
    for (int i = n - 1; i >= 0; --i) {
      letters[static_cast<std::size_t>(i)] = static_cast<int>(rest % big_n) + 1;
      rest /= big_n;
    }
  }
  return out;
}

std::vector<BlowupWord> sample_words(const SelfSimilarStructure& s, int n, std::size_t count,
                                     std::uint64_t seed) {
  // mt19937_64 output is fully specified; the letter draw uses rejection
  // sampling rather than std::uniform_int_distribution, whose algorithm is
  // library-specific.
  std::mt19937_64 rng(seed);
  const auto big_n = static_cast<std::uint64_t>(s.n_cells);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % big_n;
  std::vector<BlowupWord> out(count);
  for (auto& w : out) {
    w.seed = seed;
    w.letters.resize(static_cast<std::size_t>(n));
    for (auto& letter : w.letters) {
      std::uint64_t x = rng();
      while (x >= limit) x = rng();
      letter = static_cast<int>(x % big_n) + 1;
    }
  }
  return out;
}

}  // namespace fsp
