#include "vigil/codegen/image.hpp"

#include <algorithm>
#include <set>

#include "vigil/codegen/crc32.hpp"
#include "vigil/common/error.hpp"
#include "vigil/common/text.hpp"

namespace vigil::codegen {

using text::hex;

namespace {

constexpr std::array<std::string_view, kSegmentCount> kSegmentNames = {"code_a", "data_a", "code_b", "data_b"};

std::uint32_t round_up(std::uint32_t v, std::uint32_t align) { return align ? (v + align - 1) / align * align : v; }

class Writer {
 public:
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  void need(std::size_t n) {
    if (pos_ + n > b_.size()) throw Error("E_IMAGE_FORMAT", "image truncated at byte " + std::to_string(pos_));
  }
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    auto v = static_cast<std::uint16_t>(load_le(b_.data() + pos_, 2));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    auto v = load_le(b_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }
  std::vector<std::uint8_t> bytes(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> v(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> body_bytes(const ProgramImage& im) {
  Writer w;
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("CSPI"), 4));
  w.u16(im.version);
  w.u16(im.endianness);
  w.u16(static_cast<std::uint16_t>(im.io.inputs));
  w.u16(static_cast<std::uint16_t>(im.io.outputs));
  w.u16(im.stack_a);
  w.u16(im.spill_b);
  w.u32(im.entry_a);
  w.u32(im.entry_b);
  for (const auto& s : im.segments) {
    w.u8(static_cast<std::uint8_t>(s.kind));
    w.u8(0);
    w.u8(0);
    w.u8(0);
    w.u32(s.base);
    w.u32(static_cast<std::uint32_t>(s.bytes.size()));
    w.u32(s.crc);
  }
  w.u16(static_cast<std::uint16_t>(im.symbols.size()));
  for (const auto& sym : im.symbols) {
    w.u8(static_cast<std::uint8_t>(sym.name.size()));
    w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(sym.name.data()), sym.name.size()));
    w.u8(static_cast<std::uint8_t>(sym.kind));
    w.u8(static_cast<std::uint8_t>(sym.width));
    w.u8(sym.flags);
    w.u8(sym.pin);
    w.u16(sym.offset_a);
    w.u16(sym.offset_b);
  }
  for (const auto& s : im.segments) w.bytes(s.bytes);
  return w.out;
}

}  // namespace

std::string_view segment_name(SegmentKind k) { return kSegmentNames[static_cast<std::size_t>(k)]; }

std::optional<SegmentKind> parse_segment_name(std::string_view name) {
  for (std::size_t i = 0; i < kSegmentCount; ++i) {
    if (kSegmentNames[i] == name) return static_cast<SegmentKind>(i);
  }
  // short aliases used in scenario files
  if (name == "codeA") return SegmentKind::CodeA;
  if (name == "dataA") return SegmentKind::DataA;
  if (name == "codeB") return SegmentKind::CodeB;
  if (name == "dataB") return SegmentKind::DataB;
  return std::nullopt;
}

const Symbol* ProgramImage::find(std::string_view name) const {
  for (const auto& s : symbols) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

MemoryLayout parse_layout(std::string_view text) {
  MemoryLayout layout;
  int n = 0;
  for (const auto& raw : text::lines(text)) {
    ++n;
    auto line = std::string(text::trim(raw.substr(0, raw.find('#'))));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("E_SYNTAX", "layout line " + std::to_string(n) + ": expected key = address");
    auto key = std::string(text::trim(std::string_view(line).substr(0, eq)));
    auto value = text::parse_uint(text::trim(std::string_view(line).substr(eq + 1)));
    if (!value || *value > 0xFFFFFFFFu) {
      throw Error("E_SYNTAX", "layout line " + std::to_string(n) + ": bad address");
    }
    auto v = static_cast<std::uint32_t>(*value);
    if (key == "origin") {
      layout.origin = v;
    } else if (key == "align") {
      layout.align = v;
    } else if (auto k = parse_segment_name(key)) {
      layout.base[static_cast<std::size_t>(*k)] = v;
    } else {
      throw Error("E_SYNTAX", "layout line " + std::to_string(n) + ": unknown segment '" + key + "'");
    }
  }
  return layout;
}

ProgramImage link(const BytecodeA& a, const BytecodeB& b, kernel::IoConfig io, const MemoryLayout& layout) {
  std::set<std::string> names_a, names_b;
  for (const auto& s : a.layout.slots) names_a.insert(s.name);
  for (const auto& s : b.layout.slots) names_b.insert(s.name);
  if (names_a != names_b) {
    std::string diff;
    for (const auto& n : names_a) {
      if (!names_b.count(n)) diff += " -" + n;
    }
    for (const auto& n : names_b) {
      if (!names_a.count(n)) diff += " +" + n;
    }
    throw Error("E_NAME_MISMATCH", "binaries A and B declare different variables:" + diff);
  }

  ProgramImage im;
  im.io = io;
  im.stack_a = static_cast<std::uint16_t>(a.max_stack);
  im.spill_b = static_cast<std::uint16_t>(b.spill_slots);
  im.entry_a = a.cycle_entry;
  im.entry_b = b.cycle_entry;
  im.segment(SegmentKind::CodeA).bytes = a.code;
  im.segment(SegmentKind::DataA).bytes = a.layout.initial_bytes();
  im.segment(SegmentKind::CodeB).bytes = b.encode();
  im.segment(SegmentKind::DataB).bytes = b.layout.initial_bytes();
  std::uint32_t next = layout.origin;
  for (std::size_t i = 0; i < kSegmentCount; ++i) {
    auto& seg = im.segments[i];
    seg.kind = static_cast<SegmentKind>(i);
    seg.base = layout.base[i].value_or(round_up(next, layout.align));
    next = std::max(next, seg.base + static_cast<std::uint32_t>(seg.bytes.size()));
  }

  for (const auto& sa : a.layout.slots) {
    const DataSlot* sb = b.layout.find(sa.name);
    Symbol sym;
    sym.name = sa.name;
    sym.kind = sa.kind;
    sym.width = sa.type.width;
    sym.flags = sa.type.io ? kSymbolIo : 0;
    sym.pin = static_cast<std::uint8_t>(sa.pin);
    sym.offset_a = static_cast<std::uint16_t>(sa.offset);
    sym.offset_b = static_cast<std::uint16_t>(sb->offset);
    im.symbols.push_back(std::move(sym));
  }
  check_disjoint(im);
  seal(im);
  return im;
}

void seal(ProgramImage& image) {
  for (auto& s : image.segments) s.crc = crc32(s.bytes);
  image.global_crc = crc32(body_bytes(image));
}

void check_disjoint(const ProgramImage& image) {
  for (std::size_t i = 0; i < kSegmentCount; ++i) {
    for (std::size_t j = i + 1; j < kSegmentCount; ++j) {
      const auto& x = image.segments[i];
      const auto& y = image.segments[j];
      if (x.bytes.empty() || y.bytes.empty()) continue;
      std::uint64_t xe = std::uint64_t{x.base} + x.bytes.size();
      std::uint64_t ye = std::uint64_t{y.base} + y.bytes.size();
      if (x.base < ye && y.base < xe) {
        throw Error("E_MEM_OVERLAP", std::string(segment_name(x.kind)) + " [0x" + hex(x.base, 8) + ", 0x" +
                                         hex(xe, 8) + ") overlaps " + std::string(segment_name(y.kind)) + " [0x" +
                                         hex(y.base, 8) + ", 0x" + hex(ye, 8) + ")");
      }
    }
  }
}

void check_crcs(const ProgramImage& image) {
  auto actual = crc32(body_bytes(image));
  if (actual != image.global_crc) {
    throw Error("E_UPLOAD_CRC",
                "image checksum 0x" + hex(actual, 8) + " does not match stored 0x" + hex(image.global_crc, 8));
  }
  for (const auto& s : image.segments) {
    auto c = crc32(s.bytes);
    if (c != s.crc) {
      throw Error("E_UPLOAD_CRC", std::string(segment_name(s.kind)) + " checksum 0x" + hex(c, 8) +
                                      " does not match stored 0x" + hex(s.crc, 8));
    }
  }
}

std::vector<std::uint8_t> serialize(const ProgramImage& image) {
  auto out = body_bytes(image);
  Writer w;
  w.u32(image.global_crc);
  out.insert(out.end(), w.out.begin(), w.out.end());
  return out;
}

ProgramImage deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.bytes(4);
  if (std::string(magic.begin(), magic.end()) != "CSPI") throw Error("E_IMAGE_FORMAT", "bad magic");
  ProgramImage im;
  im.version = r.u16();
  if (im.version != kImageVersion) throw Error("E_IMAGE_FORMAT", "unsupported version " + std::to_string(im.version));
  im.endianness = r.u16();
  im.io.inputs = r.u16();
  im.io.outputs = r.u16();
  im.stack_a = r.u16();
  im.spill_b = r.u16();
  im.entry_a = r.u32();
  im.entry_b = r.u32();
  std::array<std::uint32_t, kSegmentCount> sizes{};
  for (std::size_t i = 0; i < kSegmentCount; ++i) {
    auto kind = r.u8();
    if (kind >= kSegmentCount) throw Error("E_IMAGE_FORMAT", "bad segment kind " + std::to_string(kind));
    im.segments[i].kind = static_cast<SegmentKind>(kind);
    r.bytes(3);
    im.segments[i].base = r.u32();
    sizes[i] = r.u32();
    im.segments[i].crc = r.u32();
  }
  auto count = r.u16();
  for (std::uint16_t i = 0; i < count; ++i) {
    Symbol sym;
    auto len = r.u8();
    auto name = r.bytes(len);
    sym.name.assign(name.begin(), name.end());
    auto kind = r.u8();
    if (kind > static_cast<std::uint8_t>(kernel::VarKind::Constant)) throw Error("E_IMAGE_FORMAT", "bad symbol kind");
    sym.kind = static_cast<kernel::VarKind>(kind);
    auto width = r.u8();
    if (width != 8 && width != 16 && width != 32) throw Error("E_IMAGE_FORMAT", "bad symbol width");
    sym.width = static_cast<kernel::Width>(width);
    sym.flags = r.u8();
    sym.pin = r.u8();
    sym.offset_a = r.u16();
    sym.offset_b = r.u16();
    im.symbols.push_back(std::move(sym));
  }
  for (std::size_t i = 0; i < kSegmentCount; ++i) im.segments[i].bytes = r.bytes(sizes[i]);
  im.global_crc = r.u32();
  if (r.pos() != bytes.size()) throw Error("E_IMAGE_FORMAT", "trailing bytes after image");
  return im;
}

std::string intel_hex(const ProgramImage& image) {
  std::string out;
  auto record = [&](std::uint8_t type, std::uint16_t addr, std::span<const std::uint8_t> data) {
    std::uint32_t sum = static_cast<std::uint32_t>(data.size()) + (addr >> 8) + (addr & 0xFF) + type;
    out += ":" + hex(data.size(), 2) + hex(addr, 4) + hex(type, 2);
    for (auto b : data) {
      out += hex(b, 2);
      sum += b;
    }
    out += hex((0x100 - (sum & 0xFF)) & 0xFF, 2) + "\n";
  };
  std::uint32_t upper = 0xFFFFFFFFu;
  for (const auto& s : image.segments) {
    std::size_t at = 0;
    while (at < s.bytes.size()) {
      std::uint32_t addr = s.base + static_cast<std::uint32_t>(at);
      // records stay inside one 64 KiB page
      std::size_t n = std::min<std::size_t>({16, s.bytes.size() - at, 0x10000 - (addr & 0xFFFF)});
      if ((addr >> 16) != upper) {
        upper = addr >> 16;
        std::array<std::uint8_t, 2> ext = {static_cast<std::uint8_t>(upper >> 8), static_cast<std::uint8_t>(upper)};
        record(0x04, 0, ext);
      }
      record(0x00, static_cast<std::uint16_t>(addr), std::span<const std::uint8_t>(s.bytes.data() + at, n));
      at += n;
    }
  }
  record(0x01, 0, {});
  return out;
}

}  // namespace vigil::codegen
