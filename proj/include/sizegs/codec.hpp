#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "sizegs/error.hpp"
#include "sizegs/model.hpp"
#include "sizegs/parallel.hpp"
#include "sizegs/quantizer.hpp"
#include "sizegs/range_coder.hpp"
#include "sizegs/size_model.hpp"

namespace sizegs {

inline constexpr std::array<char, 4> kContainerMagic = {'S', 'G', 'S', 'C'};
inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kHeaderBytes = 32;
inline constexpr std::size_t kSectionPrefixBytes = 8;
inline constexpr std::size_t kGroupMetadataBytes = 13;  // min f32, s_x f32, z_x i32, bits u8
inline constexpr std::size_t kGroupBlobLenBytes = 4;

// Fixed-size container header; crc32 covers the whole file with this field
// zeroed, so any single corrupted byte is detected on read.
struct ContainerHeader {
  std::array<char, 4> magic = kContainerMagic;
  std::uint16_t version = kContainerVersion;
  std::uint64_t point_count = 0;
  std::uint16_t channels = 0;
  std::uint16_t blocks = 0;
  std::uint8_t coord_bits = 16;
  std::uint8_t norm_id = static_cast<std::uint8_t>(Norm::l2);
  std::uint64_t schema_digest = 0;
  std::uint32_t crc32 = 0;
};

namespace detail {

// --- CRC-32 (IEEE), table driven ---

inline const std::array<std::uint32_t, 256>& crc32_table() {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  return table;
}

inline std::uint32_t crc32_update(std::uint32_t crc, std::span<const std::uint8_t> data) {
  const auto& table = crc32_table();
  for (std::uint8_t b : data) crc = table[(crc ^ b) & 0xFFu] ^ (crc >> 8);
  return crc;
}

inline std::uint32_t crc32_of(std::span<const std::uint8_t> data) {
  return crc32_update(0xFFFFFFFFu, data) ^ 0xFFFFFFFFu;
}

// --- little-endian serialization ---

template <typename T>
void put_raw(std::vector<std::uint8_t>& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  const auto old = out.size();
  out.resize(old + sizeof(T));
  std::memcpy(out.data() + old, &v, sizeof(T));
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) { put_raw(out, v); }
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) { put_raw(out, v); }
inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) { put_raw(out, v); }
inline void put_i32(std::vector<std::uint8_t>& out, std::int32_t v) { put_raw(out, v); }
inline void put_f32(std::vector<std::uint8_t>& out, float v) { put_raw(out, v); }
inline void put_f64(std::vector<std::uint8_t>& out, double v) { put_raw(out, v); }

// Bounds-checked reader carrying a section name for error context.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::string section)
      : data_(data), section_(std::move(section)) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > data_.size())
      fail(ErrorKind::corrupt_container, section_ + " section truncated");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> get_bytes(std::size_t n) {
    if (pos_ + n > data_.size())
      fail(ErrorKind::corrupt_container, section_ + " section truncated");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  const std::string& section() const { return section_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string section_;
};

// --- LEB128 varints for Morton deltas ---

inline void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v) | 0x80u);
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint64_t get_varint(const std::uint8_t* data, std::size_t size,
                                std::size_t& pos, const char* section) {
  std::uint64_t v = 0;
  int shift = 0;
  for (;;) {
    if (pos >= size || shift > 63)
      fail(ErrorKind::corrupt_container, std::string(section) + ": bad varint");
    const std::uint8_t b = data[pos++];
    v |= static_cast<std::uint64_t>(b & 0x7Fu) << shift;
    if ((b & 0x80u) == 0) break;
    shift += 7;
  }
  return v;
}

inline std::array<std::uint32_t, 3> morton_decode(std::uint64_t code, int bits) {
  std::array<std::uint32_t, 3> c{};
  for (int k = 0; k < bits; ++k) {
    c[0] |= static_cast<std::uint32_t>((code >> (3 * k)) & 1u) << k;
    c[1] |= static_cast<std::uint32_t>((code >> (3 * k + 1)) & 1u) << k;
    c[2] |= static_cast<std::uint32_t>((code >> (3 * k + 2)) & 1u) << k;
  }
  return c;
}

}  // namespace detail

// --- bit packing (LSB first within little-endian bytes) ---

inline std::vector<std::uint8_t> pack_bits(std::span<const std::uint16_t> symbols,
                                           int bits) {
  const std::uint32_t cap = (1u << bits) - 1u;
  std::vector<std::uint8_t> out((symbols.size() * static_cast<std::size_t>(bits) + 7) / 8, 0);
  std::size_t bitpos = 0;
  for (std::uint16_t s : symbols) {
    if (s > cap)
      fail(ErrorKind::invalid_input,
           "symbol " + std::to_string(s) + " overflows " + std::to_string(bits) + " bits");
    std::uint32_t v = s;
    int left = bits;
    while (left > 0) {
      const std::size_t byte = bitpos >> 3;
      const int off = static_cast<int>(bitpos & 7);
      const int take = std::min(left, 8 - off);
      out[byte] |= static_cast<std::uint8_t>((v & ((1u << take) - 1u)) << off);
      v >>= take;
      left -= take;
      bitpos += static_cast<std::size_t>(take);
    }
  }
  return out;
}

inline std::vector<std::uint16_t> unpack_bits(std::span<const std::uint8_t> bytes,
                                              std::size_t count, int bits) {
  if (bytes.size() * 8 < count * static_cast<std::size_t>(bits))
    fail(ErrorKind::corrupt_container, "packed symbol stream too short");
  std::vector<std::uint16_t> out(count);
  std::size_t bitpos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t v = 0;
    int got = 0;
    while (got < bits) {
      const std::size_t byte = bitpos >> 3;
      const int off = static_cast<int>(bitpos & 7);
      const int take = std::min(bits - got, 8 - off);
      v |= ((static_cast<std::uint32_t>(bytes[byte]) >> off) & ((1u << take) - 1u)) << got;
      got += take;
      bitpos += static_cast<std::size_t>(take);
    }
    out[i] = static_cast<std::uint16_t>(v);
  }
  return out;
}

// --- geometry stream ---

// Body layout: origin (3 x f64), step (3 x f64), then a range-coded byte
// stream of varint-decomposed Morton code deltas. Requires Morton-sorted
// input so every delta is nonnegative.
inline std::vector<std::uint8_t> encode_geometry(const CoordinateGrid& grid) {
  std::vector<std::uint8_t> body;
  body.reserve(48 + grid.cells.size());
  for (double v : grid.origin) detail::put_f64(body, v);
  for (double v : grid.step) detail::put_f64(body, v);

  std::vector<std::uint8_t> raw;
  raw.reserve(grid.cells.size() * 3);
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& c = grid.cells[i];
    const std::uint64_t code = morton_code(c[0], c[1], c[2], grid.bits);
    if (code < prev)
      fail(ErrorKind::invalid_input, "geometry must be Morton-sorted before encoding");
    detail::put_varint(raw, code - prev);
    prev = code;
  }
  const auto coded = rc_encode_bytes(raw);
  detail::put_u64(body, coded.size());
  body.insert(body.end(), coded.begin(), coded.end());
  return body;
}

inline CoordinateGrid decode_geometry(std::span<const std::uint8_t> body,
                                      std::size_t point_count, int coord_bits) {
  detail::ByteReader r(body, "geometry");
  CoordinateGrid grid;
  grid.bits = coord_bits;
  for (auto& v : grid.origin) v = r.get<double>();
  for (auto& v : grid.step) v = r.get<double>();
  const std::uint64_t coded_len = r.get<std::uint64_t>();
  if (coded_len != r.remaining())
    fail(ErrorKind::corrupt_container, "geometry stream length mismatch");
  const auto coded = r.get_bytes(coded_len);

  // Decode varints lazily: the raw byte count is unknown up front, so decode
  // bytes one at a time through the adaptive model.
  std::vector<std::uint8_t> raw;
  {
    RangeDecoder dec(coded);
    AdaptiveByteModel model;
    raw.reserve(point_count * 2);
    std::size_t points = 0;
    while (points < point_count) {
      const std::uint8_t b = model.decode(dec);
      raw.push_back(b);
      if ((b & 0x80u) == 0) ++points;
      if (raw.size() > point_count * 10 + 16)
        fail(ErrorKind::corrupt_container, "geometry varint stream runaway");
    }
  }

  grid.cells.resize(point_count);
  const std::uint64_t code_limit = (coord_bits >= 22)
                                       ? ~std::uint64_t{0}
                                       : (std::uint64_t{1} << (3 * coord_bits));
  std::size_t pos = 0;
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < point_count; ++i) {
    code += detail::get_varint(raw.data(), raw.size(), pos, "geometry");
    if (code >= code_limit)
      fail(ErrorKind::corrupt_container, "geometry Morton code out of range");
    grid.cells[i] = detail::morton_decode(code, coord_bits);
  }
  return grid;
}

// --- container assembly ---

struct BuiltContainer {
  std::vector<std::uint8_t> bytes;
  ContainerFixedParts fixed_parts;
  std::int64_t attribute_stream_bytes = 0;  // compressed blobs, without framing
};

namespace detail {

inline std::vector<std::uint8_t> schema_block(const std::vector<ChannelSchema>& schema) {
  std::vector<std::uint8_t> out;
  put_u16(out, static_cast<std::uint16_t>(schema.size()));
  for (const auto& g : schema) {
    if (g.name.size() > 255)
      fail(ErrorKind::invalid_input, "channel name longer than 255 bytes");
    out.push_back(static_cast<std::uint8_t>(g.name.size()));
    out.insert(out.end(), g.name.begin(), g.name.end());
    put_u16(out, static_cast<std::uint16_t>(g.width));
    out.push_back(static_cast<std::uint8_t>(g.activation));
  }
  return out;
}

inline std::vector<ChannelSchema> parse_schema_block(ByteReader& r) {
  const std::uint16_t count = r.get<std::uint16_t>();
  if (count == 0) fail(ErrorKind::corrupt_container, "metadata schema block empty");
  std::vector<ChannelSchema> schema(count);
  for (auto& g : schema) {
    const std::uint8_t len = r.get<std::uint8_t>();
    const auto name = r.get_bytes(len);
    g.name.assign(name.begin(), name.end());
    g.width = r.get<std::uint16_t>();
    const std::uint8_t act = r.get<std::uint8_t>();
    if (act > 2) fail(ErrorKind::corrupt_container, "metadata activation id out of range");
    g.activation = static_cast<Activation>(act);
    if (g.width == 0) fail(ErrorKind::corrupt_container, "metadata channel width zero");
  }
  return schema;
}

inline void put_group_metadata(std::vector<std::uint8_t>& out, const GroupQuantParams& p) {
  put_f32(out, p.min);
  put_f32(out, p.scale);
  put_i32(out, p.zero_point);
  out.push_back(static_cast<std::uint8_t>(p.bits) |
                static_cast<std::uint8_t>(p.constant ? 0x80u : 0u));
}

inline GroupQuantParams get_group_metadata(ByteReader& r) {
  GroupQuantParams p;
  p.min = r.get<float>();
  p.scale = r.get<float>();
  p.zero_point = r.get<std::int32_t>();
  const std::uint8_t packed = r.get<std::uint8_t>();
  p.bits = packed & 0x7Fu;
  p.constant = (packed & 0x80u) != 0;
  if (p.bits < 1 || p.bits > kMaxBits)
    fail(ErrorKind::corrupt_container, "metadata bit-width out of range");
  if (p.constant && p.scale != 0.0f)
    fail(ErrorKind::corrupt_container, "constant group with nonzero scale");
  return p;
}

inline std::vector<std::uint8_t> header_bytes(const ContainerHeader& h) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes);
  out.insert(out.end(), h.magic.begin(), h.magic.end());
  put_u16(out, h.version);
  put_u64(out, h.point_count);
  put_u16(out, h.channels);
  put_u16(out, h.blocks);
  out.push_back(h.coord_bits);
  out.push_back(h.norm_id);
  put_u64(out, h.schema_digest);
  put_u32(out, h.crc32);
  return out;
}

}  // namespace detail

// Quantizes every group at its assigned bit-width, entropy-codes the packed
// symbols per group, and assembles the final byte-exact container. The model
// must already be pruned and Morton-sorted, with geometry_body produced from
// the matching grid.
inline BuiltContainer assemble_container(const GaussianModel& model,
                                         const std::vector<std::uint8_t>& geometry_body,
                                         const GroupPartition& partition,
                                         const BitAssignment& bits, Norm norm,
                                         int coord_bits, unsigned threads = 1) {
  const std::size_t n = model.point_count();
  if (partition.channels != model.channel_count() || partition.boundaries.back() != n)
    fail(ErrorKind::invalid_input, "partition does not match the model");
  if (bits.channels != partition.channels || bits.blocks != partition.blocks)
    fail(ErrorKind::invalid_input, "bit assignment shape does not match the partition");

  const std::size_t groups = partition.group_count();
  std::vector<GroupQuantParams> params(groups);
  std::vector<std::vector<std::uint8_t>> blobs(groups);

  parallel_for(groups, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      const std::size_t c = g / partition.blocks;
      const std::size_t j = g % partition.blocks;
      const double* row = model.attributes.data() + c * n;
      const std::span<const double> vals(row + partition.block_begin(j),
                                         partition.block_length(j));
      const auto quantized = quantize_group(vals, bits.at(c, j));
      params[g] = quantized.params;
      if (!quantized.params.constant) {
        const auto packed = pack_bits(quantized.symbols, quantized.params.bits);
        blobs[g] = rc_encode_bytes(packed);
      }
    }
  });

  std::vector<std::uint8_t> metadata = detail::schema_block(model.schema);
  for (std::size_t g = 0; g < groups; ++g) detail::put_group_metadata(metadata, params[g]);

  std::vector<std::uint8_t> attributes;
  std::int64_t blob_total = 0;
  std::size_t nonconstant = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    if (params[g].constant) continue;
    ++nonconstant;
    blob_total += static_cast<std::int64_t>(blobs[g].size());
    detail::put_u32(attributes, static_cast<std::uint32_t>(blobs[g].size()));
    attributes.insert(attributes.end(), blobs[g].begin(), blobs[g].end());
  }

  ContainerHeader header;
  header.point_count = n;
  header.channels = static_cast<std::uint16_t>(partition.channels);
  header.blocks = static_cast<std::uint16_t>(partition.blocks);
  header.coord_bits = static_cast<std::uint8_t>(coord_bits);
  header.norm_id = static_cast<std::uint8_t>(norm);
  header.schema_digest = schema_digest(model.schema);
  header.crc32 = 0;

  BuiltContainer built;
  built.bytes = detail::header_bytes(header);
  detail::put_u64(built.bytes, geometry_body.size());
  built.bytes.insert(built.bytes.end(), geometry_body.begin(), geometry_body.end());
  detail::put_u64(built.bytes, metadata.size());
  built.bytes.insert(built.bytes.end(), metadata.begin(), metadata.end());
  detail::put_u64(built.bytes, attributes.size());
  built.bytes.insert(built.bytes.end(), attributes.begin(), attributes.end());

  const std::uint32_t crc = detail::crc32_of(built.bytes);
  std::memcpy(built.bytes.data() + kHeaderBytes - 4, &crc, 4);

  built.fixed_parts.header_bytes = static_cast<std::int64_t>(kHeaderBytes);
  built.fixed_parts.framing_bytes = 3 * static_cast<std::int64_t>(kSectionPrefixBytes);
  built.fixed_parts.geometry_bytes = static_cast<std::int64_t>(geometry_body.size());
  built.fixed_parts.metadata_bytes = static_cast<std::int64_t>(metadata.size());
  built.fixed_parts.attribute_overhead_bytes =
      static_cast<std::int64_t>(nonconstant * kGroupBlobLenBytes);
  built.attribute_stream_bytes = blob_total;
  return built;
}

inline std::int64_t write_container(std::span<const std::uint8_t> bytes,
                                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
  return static_cast<std::int64_t>(bytes.size());
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

struct DecodeDiagnostics {
  std::size_t geometry_section_bytes = 0;   // including length prefix
  std::size_t metadata_section_bytes = 0;
  std::size_t attribute_section_bytes = 0;
  std::size_t constant_groups = 0;
  std::vector<std::size_t> group_symbol_counts;  // C x B
};

struct DecodedContainer {
  ContainerHeader header;
  GaussianModel model;  // lossy reconstruction, Morton order
  BitAssignment assignment;
  CoordinateGrid grid;
  DecodeDiagnostics diagnostics;
};

inline ContainerHeader parse_header(std::span<const std::uint8_t> file) {
  if (file.size() < kHeaderBytes)
    fail(ErrorKind::corrupt_container, "file shorter than the fixed header");
  detail::ByteReader r(file.subspan(0, kHeaderBytes), "header");
  ContainerHeader h;
  const auto magic = r.get_bytes(4);
  std::copy(magic.begin(), magic.end(), h.magic.begin());
  if (!std::equal(h.magic.begin(), h.magic.end(), kContainerMagic.begin()))
    fail(ErrorKind::corrupt_container, "bad magic (not an SGSC container)");
  h.version = r.get<std::uint16_t>();
  if (h.version != kContainerVersion)
    fail(ErrorKind::corrupt_container,
         "unsupported container version " + std::to_string(h.version));
  h.point_count = r.get<std::uint64_t>();
  h.channels = r.get<std::uint16_t>();
  h.blocks = r.get<std::uint16_t>();
  h.coord_bits = r.get<std::uint8_t>();
  h.norm_id = r.get<std::uint8_t>();
  h.schema_digest = r.get<std::uint64_t>();
  h.crc32 = r.get<std::uint32_t>();
  if (h.point_count == 0 || h.channels == 0 || h.blocks == 0)
    fail(ErrorKind::corrupt_container, "header counts must be positive");
  if (h.coord_bits < 1 || h.coord_bits > 21)
    fail(ErrorKind::corrupt_container, "header coordinate bits out of range");
  if (h.norm_id > 2) fail(ErrorKind::corrupt_container, "header norm id out of range");
  return h;
}

inline DecodedContainer decode_container(std::span<const std::uint8_t> file) {
  DecodedContainer out;
  out.header = parse_header(file);

  // Whole-file checksum gate with the stored crc field zeroed.
  {
    std::uint32_t crc = 0xFFFFFFFFu;
    crc = detail::crc32_update(crc, file.subspan(0, kHeaderBytes - 4));
    const std::array<std::uint8_t, 4> zeros{};
    crc = detail::crc32_update(crc, zeros);
    crc = detail::crc32_update(crc, file.subspan(kHeaderBytes));
    crc ^= 0xFFFFFFFFu;
    if (crc != out.header.crc32)
      fail(ErrorKind::corrupt_container, "checksum mismatch");
  }

  detail::ByteReader top(file.subspan(kHeaderBytes), "sections");
  auto read_section = [&top](const char* name) {
    const std::uint64_t len = top.get<std::uint64_t>();
    if (len > top.remaining())
      fail(ErrorKind::corrupt_container, std::string(name) + " section truncated");
    return top.get_bytes(len);
  };
  const auto geometry_body = read_section("geometry");
  const auto metadata_body = read_section("metadata");
  const auto attribute_body = read_section("attributes");
  if (top.remaining() != 0)
    fail(ErrorKind::corrupt_container, "trailing bytes after the attribute section");

  const std::size_t n = static_cast<std::size_t>(out.header.point_count);
  const std::size_t channels = out.header.channels;
  const std::size_t blocks = out.header.blocks;

  out.grid = decode_geometry(geometry_body, n, out.header.coord_bits);

  detail::ByteReader meta(metadata_body, "metadata");
  auto schema = detail::parse_schema_block(meta);
  if (schema_digest(schema) != out.header.schema_digest)
    fail(ErrorKind::corrupt_container, "schema digest mismatch");
  if (schema_channel_count(schema) != channels)
    fail(ErrorKind::corrupt_container, "schema width disagrees with header channels");

  const GroupPartition partition = [&] {
    if (n < blocks)
      fail(ErrorKind::corrupt_container, "fewer points than blocks");
    return make_partition(channels, n, blocks);
  }();

  std::vector<GroupQuantParams> params(channels * blocks);
  for (auto& p : params) p = detail::get_group_metadata(meta);
  if (meta.remaining() != 0)
    fail(ErrorKind::corrupt_container, "trailing bytes in the metadata section");

  out.model.schema = std::move(schema);
  out.model.positions.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d)
      out.model.positions[i][d] =
          out.grid.origin[d] + static_cast<double>(out.grid.cells[i][d]) * out.grid.step[d];

  out.model.attributes.resize(channels * n);
  out.assignment.channels = channels;
  out.assignment.blocks = blocks;
  out.assignment.bits.resize(channels * blocks);
  out.diagnostics.group_symbol_counts.assign(channels * blocks, 0);

  detail::ByteReader attr(attribute_body, "attributes");
  for (std::size_t g = 0; g < channels * blocks; ++g) {
    const std::size_t c = g / blocks;
    const std::size_t j = g % blocks;
    const auto& p = params[g];
    out.assignment.bits[g] = p.bits;
    const std::size_t len = partition.block_length(j);
    double* dst = out.model.attributes.data() + c * n + partition.block_begin(j);
    if (p.constant) {
      ++out.diagnostics.constant_groups;
      for (std::size_t i = 0; i < len; ++i) dst[i] = static_cast<double>(p.min);
      continue;
    }
    const std::uint32_t blob_len = attr.get<std::uint32_t>();
    const auto blob = attr.get_bytes(blob_len);
    const std::size_t packed_len = (len * p.bits + 7) / 8;
    const auto packed = rc_decode_bytes(blob, packed_len);
    const auto symbols = unpack_bits(packed, len, p.bits);
    out.diagnostics.group_symbol_counts[g] = symbols.size();
    const auto values = dequantize_group(symbols, p);
    std::copy(values.begin(), values.end(), dst);
  }
  if (attr.remaining() != 0)
    fail(ErrorKind::corrupt_container, "trailing bytes in the attribute section");

  out.diagnostics.geometry_section_bytes = kSectionPrefixBytes + geometry_body.size();
  out.diagnostics.metadata_section_bytes = kSectionPrefixBytes + metadata_body.size();
  out.diagnostics.attribute_section_bytes = kSectionPrefixBytes + attribute_body.size();
  return out;
}

inline DecodedContainer decode_container_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_container(bytes);
}

}  // namespace sizegs
