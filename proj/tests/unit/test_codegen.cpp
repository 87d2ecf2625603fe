#include <random>

#include "doctest.h"
#include "executors.hpp"
#include "random_program.hpp"
#include "vigil/codegen/bytecode_a.hpp"
#include "vigil/codegen/bytecode_b.hpp"
#include "vigil/codegen/crc32.hpp"
#include "vigil/codegen/image.hpp"
#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"
#include "vigil/kernel/interpreter.hpp"
#include "vigil/kernel/parser.hpp"
#include "vigil/kernel/validator.hpp"

using namespace vigil;
using namespace vigil::codegen;

namespace {

// Bitwise reflected CRC-32, polynomial 0xEDB88320.
std::uint32_t crc_oracle(const std::vector<std::uint8_t>& bytes) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (auto b : bytes) {
    c ^= b;
    for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
  }
  return ~c;
}

kernel::CyclicProgram load(const std::string& src) { return kernel::prepare(kernel::parse_program(src)); }

std::string fixture(const std::string& rel) { return text::read_file(std::string(VIGIL_FIXTURES) + "/" + rel); }

std::string code(const std::exception& e) {
  auto* err = dynamic_cast<const Error*>(&e);
  return err ? err->code() : "";
}

template <class F>
std::string thrown_code(F f) {
  try {
    f();
  } catch (const std::exception& e) {
    return code(e);
  }
  return "";
}

}  // namespace

TEST_CASE("crc32 check value") {
  CHECK(crc32(std::string_view("123456789")) == 0xCBF43926u);
  CHECK(crc32(std::string_view("")) == 0u);
}

TEST_CASE("crc32 agrees with a bitwise implementation") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::uint8_t> v(rng() % 300);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    REQUIRE(crc32(v) == crc_oracle(v));
    // incremental form
    auto half = v.size() / 2;
    auto st = crc32_update(0xFFFFFFFFu, std::span(v).first(half));
    st = crc32_update(st, std::span(v).subspan(half));
    REQUIRE(crc32_finish(st) == crc_oracle(v));
  }
}

TEST_CASE("the two data layouts never coincide") {
  auto p = load(fixture("ac1/base.ckp"));
  auto a = layout_in_declaration_order(p);
  auto b = layout_by_name(p);
  REQUIRE(a.slots.size() == b.slots.size());
  bool differ = false;
  for (const auto& s : a.slots) {
    const auto* t = b.find(s.name);
    REQUIRE(t);
    differ |= t->offset != s.offset;
  }
  CHECK(differ);
}

TEST_CASE("link rejects renamed variables and overlapping segments") {
  auto p = load(fixture("ac1/base.ckp"));
  auto a = compile_a(p);
  auto renamed = p;
  renamed.decls[static_cast<std::size_t>(renamed.find("count"))].name = "counter";
  for (auto& s : renamed.logic) {
    for (auto& t : s.then_body) {
      if (t.target == "count") {
        t.target = "counter";
        t.value.args[0].name = "counter";
      }
    }
  }
  auto b_renamed = compile_b(kernel::prepare(renamed));
  CHECK(thrown_code([&] { link(a, b_renamed, p.io); }) == "E_NAME_MISMATCH");

  auto layout = parse_layout(fixture("ac1/row11_overlap.layout"));
  CHECK(thrown_code([&] { link(a, compile_b(p), p.io, layout); }) == "E_MEM_OVERLAP");
}

TEST_CASE("image round-trips and checksums guard every byte") {
  auto p = load(fixture("ac1/base.ckp"));
  auto img = link(compile_a(p), compile_b(p), p.io);
  auto bytes = serialize(img);
  auto back = deserialize(bytes);
  CHECK(serialize(back) == bytes);
  check_crcs(back);
  check_disjoint(back);

  for (auto seg : {SegmentKind::CodeA, SegmentKind::DataA, SegmentKind::CodeB, SegmentKind::DataB}) {
    auto bad = img;
    if (bad.segment(seg).bytes.empty()) continue;
    bad.segment(seg).bytes[0] ^= 0x10;
    CHECK(thrown_code([&] { check_crcs(bad); }) == "E_UPLOAD_CRC");
  }
  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  CHECK(thrown_code([&] { deserialize(truncated); }) == "E_IMAGE_FORMAT");
}

TEST_CASE("builds are deterministic") {
  auto src = fixture("ac1/base.ckp");
  auto one = serialize(link(compile_a(load(src)), compile_b(load(src)), {}));
  auto two = serialize(link(compile_a(load(src)), compile_b(load(src)), {}));
  CHECK(one == two);
}

TEST_CASE("intel hex records carry valid checksums") {
  auto p = load(fixture("ac1/base.ckp"));
  auto hex = intel_hex(link(compile_a(p), compile_b(p), p.io));
  auto lines = text::lines(hex);
  REQUIRE_FALSE(lines.empty());
  CHECK(lines.back() == ":00000001FF");
  for (const auto& l : lines) {
    if (l.empty()) continue;
    REQUIRE(l[0] == ':');
    unsigned sum = 0;
    for (std::size_t i = 1; i + 1 < l.size(); i += 2) sum += std::stoul(l.substr(i, 2), nullptr, 16);
    CHECK((sum & 0xFF) == 0);
  }
}

TEST_CASE("deep expressions exceed the stack bound") {
  std::string e = "x";
  for (int i = 0; i < 40; ++i) e = "add_u8(1, " + e + ")";
  auto p = load("STATE\n  x : u8 = 0\nLOGIC\n  x := " + e + "\n");
  CHECK(thrown_code([&] { compile_a(p); }) == "E_STACK_BOUND");
}

TEST_CASE("listings decode every instruction") {
  auto p = load(fixture("ac1/base.ckp"));
  auto a = compile_a(p);
  auto b = compile_b(p);
  auto ia = decode_a(a.code, 0, static_cast<std::uint32_t>(a.code.size()));
  auto ib = decode_b(b.encode());
  CHECK(ia.size() > 0);
  CHECK(ib.size() == b.code.size());
  CHECK(text::lines(listing_a(a)).size() >= ia.size());
}

TEST_CASE("property: both binaries track the interpreter on generated programs") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 60; ++n) {
    auto src = testing::random_program(rng);
    CAPTURE(src);
    auto p = load(src);
    auto a = compile_a(p);
    auto b = compile_b(p);
    CHECK(a.code != b.encode());
    testing::BinaryRunner ra(a), rb(b);
    auto store = kernel::initial_store(p);
    for (std::uint32_t c = 0; c < 50; ++c) {
      kernel::InputVector in(20, kernel::kIoOff);
      for (auto& v : in) v = rng() & 1 ? kernel::kIoOn : kernel::kIoOff;
      std::uint32_t clock = c * 5;
      store = kernel::interpret_cycle(p, store, in, clock).store;
      ra.cycle(in, clock);
      rb.cycle(in, clock);
      for (std::size_t i = 0; i < p.decls.size(); ++i) {
        const auto& d = p.decls[i];
        if (d.kind == kernel::VarKind::Constant || d.kind == kernel::VarKind::Local) continue;
        REQUIRE_MESSAGE(ra.value(d.name) == store[i], d.name << " cycle " << c);
        REQUIRE_MESSAGE(rb.value(d.name) == store[i], d.name << " cycle " << c);
      }
    }
  }
}
