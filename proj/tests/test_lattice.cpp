#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "fsp/lattice.hpp"

using namespace fsp;

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

VertexAddress addr(std::vector<int> word, int label) { return {std::move(word), label}; }

}  // namespace

TEST_CASE("interval level 1") {
  const auto s = builtin_structure("interval");
  const LatticeLevel lat = build_level(s, 1);
  CHECK(lat.vertex_count() == 3);
  // (1,q1) ~ (2,q0) is the center.
  CHECK(lat.vertex_of(addr({1}, 1)) == lat.vertex_of(addr({2}, 0)));
  CHECK(lat.canonical(1) == addr({1}, 1));
  CHECK(lat.boundary() == std::vector<int>{lat.vertex_of(addr({1}, 0)), lat.vertex_of(addr({2}, 1))});
  CHECK(lat.boundary() == std::vector<int>{0, 2});
  CHECK(lat.interior() == std::vector<int>{1});
}

TEST_CASE("level 0 is the boundary itself") {
  for (const char* name : {"interval", "sg3"}) {
    const auto s = builtin_structure(name);
    const LatticeLevel lat = build_level(s, 0);
    CHECK(lat.vertex_count() == s.boundary_size());
    CHECK(lat.boundary().size() == s.boundary_size());
    CHECK(lat.interior().empty());
  }
}

TEST_CASE("sg3 level 1") {
  const auto s = builtin_structure("sg3");
  const LatticeLevel lat = build_level(s, 1);
  CHECK(lat.vertex_count() == 6);
  CHECK(lat.boundary().size() == 3);
  CHECK(lat.interior().size() == 3);
  for (int v : lat.interior()) CHECK(lat.labelings(v).size() == 2);
}

TEST_CASE("vertex counts follow the closed forms") {
  const auto interval = builtin_structure("interval");
  for (int n = 0; n <= 6; ++n) {
    CHECK(build_level(interval, n).vertex_count() == ipow(2, n) + 1);
    CHECK(predicted_vertex_count(interval, n) == ipow(2, n) + 1);
  }
  const auto sg = builtin_structure("sg3");
  for (int n = 0; n <= 5; ++n) {
    CHECK(build_level(sg, n).vertex_count() == 3 * (ipow(3, n) + 1) / 2);
    CHECK(predicted_vertex_count(sg, n) == 3 * (ipow(3, n) + 1) / 2);
  }
}

TEST_CASE("labelings partition the raw address space") {
  for (const char* name : {"interval", "sg3"}) {
    const auto s = builtin_structure(name);
    for (int n = 0; n <= 4; ++n) {
      const LatticeLevel lat = build_level(s, n);
      std::set<std::size_t> seen;
      std::size_t total = 0;
      for (std::size_t v = 0; v < lat.vertex_count(); ++v) {
        const auto labs = lat.labelings(static_cast<int>(v));
        total += labs.size();
        // Canonical address is the least raw address of the class.
        CHECK(lat.canonical_raw(static_cast<int>(v)) == *std::min_element(labs.begin(), labs.end()));
        for (std::size_t r : labs) {
          CHECK(seen.insert(r).second);
          CHECK(lat.vertex_of_raw(r) == static_cast<int>(v));
        }
      }
      CHECK(total == ipow(static_cast<std::size_t>(s.n_cells), n) * s.boundary_size());
      CHECK(seen.size() == total);
      // Vertices are numbered by canonical address.
      for (std::size_t v = 1; v < lat.vertex_count(); ++v) {
        CHECK(lat.canonical_raw(static_cast<int>(v - 1)) < lat.canonical_raw(static_cast<int>(v)));
      }
    }
  }
}

TEST_CASE("boundary vertices carry only addresses (m,...,m,q_m)") {
  for (const char* name : {"interval", "sg3"}) {
    const auto s = builtin_structure(name);
    for (int n = 1; n <= 4; ++n) {
      const LatticeLevel lat = build_level(s, n);
      for (std::size_t z = 0; z < s.boundary_size(); ++z) {
        const int v = lat.boundary()[z];
        for (std::size_t r : lat.labelings(v)) {
          const VertexAddress a = lat.decode(r);
          CHECK(a.label == static_cast<int>(z));
          for (int j : a.word) CHECK(j == s.boundary[z].cell);
        }
      }
    }
  }
}

TEST_CASE("build is deterministic") {
  const auto s = builtin_structure("sg3");
  const LatticeLevel a = build_level(s, 3);
  const LatticeLevel b = build_level(s, 3);
  for (std::size_t r = 0; r < a.raw_count(); ++r) CHECK(a.vertex_of_raw(r) == b.vertex_of_raw(r));
}

TEST_CASE("size cap fails fast") {
  const auto s = builtin_structure("sg3");
  SizeCaps caps;
  CHECK_THROWS_AS(build_level(s, 9, caps), Error);
  caps.max_vertices = 10;
  try {
    build_level(s, 2, caps);
    FAIL("expected SizeCapExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeCapExceeded);
  }
}

TEST_CASE("embed_base") {
  const auto interval = builtin_structure("interval");
  const LatticeLevel l2 = build_level(interval, 2);
  const BlowupWord w = parse_word("1,2");
  const auto emb = embed_base(l2, w);
  CHECK(emb[0] == l2.vertex_of(addr({2, 1}, 0)));
  CHECK(emb[1] == l2.vertex_of(addr({2, 1}, 1)));

  const LatticeLevel l0 = build_level(interval, 0);
  CHECK(embed_base(l0, BlowupWord{}) == std::vector<int>{0, 1});

  const auto sg = builtin_structure("sg3");
  const LatticeLevel s1 = build_level(sg, 1);
  const auto e3 = embed_base(s1, parse_word("3"));
  for (int z = 0; z < 3; ++z) CHECK(e3[static_cast<std::size_t>(z)] == s1.vertex_of(addr({3}, z)));

  CHECK_THROWS_AS(embed_base(l2, parse_word("1")), Error);
}

TEST_CASE("embed_base is injective") {
  const auto sg = builtin_structure("sg3");
  const LatticeLevel lat = build_level(sg, 3);
  for (const auto& w : enumerate_words(sg, 3)) {
    const auto emb = embed_base(lat, w);
    CHECK(std::set<int>(emb.begin(), emb.end()).size() == emb.size());
  }
}

TEST_CASE("embed_level maps a sub-lattice into its cell") {
  const auto sg = builtin_structure("sg3");
  const LatticeLevel outer = build_level(sg, 3);
  const LatticeLevel inner = build_level(sg, 1);
  const BlowupWord w = parse_word("2,3,1");
  const auto map = embed_level(outer, inner, w);
  // F_<1> is the cell (w_3, w_2) = (1, 3).
  for (std::size_t v = 0; v < inner.vertex_count(); ++v) {
    VertexAddress a = inner.canonical(static_cast<int>(v));
    a.word.insert(a.word.begin(), {1, 3});
    CHECK(map[v] == outer.vertex_of(a));
  }
  // Level 0 inside level n agrees with embed_base.
  const LatticeLevel base = build_level(sg, 0);
  const auto e = embed_level(outer, base, w);
  CHECK(e == embed_base(outer, w));
}

TEST_CASE("boundary persistence") {
  const auto interval = builtin_structure("interval");
  const auto sg = builtin_structure("sg3");
  CHECK(boundary_persistence(interval, parse_word("1,1,1")) == std::vector<int>{0});
  CHECK(boundary_persistence(interval, parse_word("1,2")).empty());
  CHECK(boundary_persistence(sg, parse_word("2,2")) == std::vector<int>{1});
}

TEST_CASE("word generation") {
  const auto interval = builtin_structure("interval");
  const auto words = enumerate_words(interval, 2);
  REQUIRE(words.size() == 4);
  CHECK(words[0].letters == std::vector<int>{1, 1});
  CHECK(words[1].letters == std::vector<int>{1, 2});
  CHECK(words[2].letters == std::vector<int>{2, 1});
  CHECK(words[3].letters == std::vector<int>{2, 2});

  const auto sg = builtin_structure("sg3");
  const auto w1 = enumerate_words(sg, 1);
  REQUIRE(w1.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(w1[static_cast<std::size_t>(i)].letters == std::vector<int>{i + 1});

  const auto a = sample_words(sg, 4, 5, 7);
  const auto b = sample_words(sg, 4, 5, 7);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    for (int l : a[i].letters) CHECK((l >= 1 && l <= 3));
  }

  SizeCaps caps;
  caps.max_words = 8;
  CHECK_THROWS_AS(enumerate_words(sg, 2, caps), Error);
}

TEST_CASE("sampled letters are roughly uniform") {
  const auto sg = builtin_structure("sg3");
  const auto words = sample_words(sg, 10, 3000, 42);
  std::array<int, 3> counts{};
  for (const auto& w : words) {
    for (int l : w.letters) ++counts[static_cast<std::size_t>(l - 1)];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("word parsing") {
  CHECK(parse_word("1,2,1").letters == std::vector<int>{1, 2, 1});
  CHECK(parse_word("").letters.empty());
  CHECK(format_word(parse_word("3,1")) == "3,1");
  CHECK_THROWS_AS(parse_word("1,,2"), Error);
  CHECK_THROWS_AS(parse_word("a"), Error);
}
