#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsp/error.hpp"
#include "fsp/structure.hpp"

namespace fsp {

/// A raw vertex name: cell path (j_1..j_n), coarse to fine, 1-based, plus
/// the boundary label index z inside that cell.
struct VertexAddress {
  std::vector<int> word;
  int label = 0;

  auto operator<=>(const VertexAddress&) const = default;
};

/// Finite prefix (w_1..w_n) of a blow-up sequence.
struct BlowupWord {
  std::vector<int> letters;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return letters.size(); }
  bool operator==(const BlowupWord& o) const { return letters == o.letters; }
};

/// Parses "1,2,1" (empty string gives the empty word).
BlowupWord parse_word(std::string_view text);
std::string format_word(const BlowupWord& w);

/// The glued vertex set F_<n>.
///
/// Raw addresses are encoded as `cell * k + z` where `cell` reads the word as
/// a base-N number (coarse letter most significant), so numeric order of raw
/// indices is lexicographic order of addresses. Vertices are numbered in
/// increasing order of their canonical (least) raw address. Copies share the
/// underlying immutable data.
class LatticeLevel {
 public:
  int level() const { return data_->level; }
  int n_cells() const { return data_->n_cells; }
  std::size_t label_count() const { return data_->labels; }
  std::size_t vertex_count() const { return data_->canonical.size(); }
  /// N^n.
  std::size_t cell_count() const { return data_->cell_count; }
  std::size_t raw_count() const { return data_->raw_to_vertex.size(); }

  int vertex_of_raw(std::size_t raw) const { return data_->raw_to_vertex[raw]; }
  int vertex_of(const VertexAddress& a) const;
  /// Vertex of label z in the given cell (cell index in base-N encoding).
  int cell_vertex(std::size_t cell, int z) const {
    return data_->raw_to_vertex[cell * data_->labels + static_cast<std::size_t>(z)];
  }

  std::size_t encode(const VertexAddress& a) const;
  VertexAddress decode(std::size_t raw) const;
  VertexAddress canonical(int v) const { return decode(data_->canonical[v]); }
  std::size_t canonical_raw(int v) const { return data_->canonical[v]; }
  /// All raw addresses identified to v, ascending.
  std::span<const std::size_t> labelings(int v) const;

  /// Boundary vertex per boundary label, in label order.
  const std::vector<int>& boundary() const { return data_->boundary; }
  bool is_boundary(int v) const { return data_->is_boundary[v] != 0; }
  /// Non-boundary vertices, ascending.
  std::vector<int> interior() const;

 private:
  struct Data {
    int level = 0;
    int n_cells = 0;
    std::size_t labels = 0;
    std::size_t cell_count = 1;
    std::vector<int> raw_to_vertex;
    std::vector<std::size_t> canonical;
    std::vector<int> boundary;
    std::vector<char> is_boundary;
    std::vector<std::size_t> labeling_offsets;
    std::vector<std::size_t> labeling_raws;
  };
  explicit LatticeLevel(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;

  friend LatticeLevel build_level(const SelfSimilarStructure&, int, const SizeCaps&);
};

/// |V_n| from the recursion |V_n| = N |V_{n-1}| - g, where g is the number of
/// vertex merges at level 1.
std::size_t predicted_vertex_count(const SelfSimilarStructure& s, int n);

LatticeLevel build_level(const SelfSimilarStructure& s, int n,
                         const SizeCaps& caps = SizeCaps::from_environment());

/// Vertex (in `level`) of each base label z: the address (w_n, ..., w_1, z).
std::vector<int> embed_base(const LatticeLevel& level, const BlowupWord& w);

/// Image of every vertex of `inner` (level p <= n) inside `outer` (level n):
/// F_<p> sits at the cell (w_n, ..., w_{p+1}).
std::vector<int> embed_level(const LatticeLevel& outer, const LatticeLevel& inner,
                             const BlowupWord& w);

/// Label indices q_m that stay on the boundary through every level, i.e.
/// those whose cell m equals every letter of w.
std::vector<int> boundary_persistence(const SelfSimilarStructure& s, const BlowupWord& w);

/// All N^n words, lexicographic.
std::vector<BlowupWord> enumerate_words(const SelfSimilarStructure& s, int n,
                                        const SizeCaps& caps = SizeCaps::from_environment());
/// `count` words with iid uniform letters, reproducible from `seed`.
std::vector<BlowupWord> sample_words(const SelfSimilarStructure& s, int n, std::size_t count,
                                     std::uint64_t seed);

}  // namespace fsp
