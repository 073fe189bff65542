#include "torusns/field_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "torusns/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are unsupported");

namespace torusns {

namespace {

constexpr char kMagic[8] = {'T', 'O', 'R', 'U', 'S', 'F', 'L', 'D'};
constexpr char kStageMagic[8] = {'T', 'O', 'R', 'U', 'S', 'C', 'K', 'P'};

template <typename T>
void put(std::string& out, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  out.append(p, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& off) {
  if (off + sizeof(T) > in.size()) throw IoError("field file truncated");
  T v;
  std::memcpy(&v, in.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_all(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

std::uint32_t rank_code(Rank r) {
  switch (r) {
    case Rank::Scalar: return 0;
    case Rank::Vector: return 1;
    case Rank::Matrix: return 2;
    default: throw IoError("field file: unsupported rank");
  }
}

Rank code_rank(std::uint32_t c) {
  switch (c) {
    case 0: return Rank::Scalar;
    case 1: return Rank::Vector;
    case 2: return Rank::Matrix;
    default: throw IoError("field file: bad rank code");
  }
}

std::string encode_field(const TorusField& field, double time, double delta) {
  std::string bytes;
  bytes.append(kMagic, sizeof kMagic);
  put(bytes, kFieldFileVersion);
  put(bytes, static_cast<std::uint32_t>(field.grid().d));
  put(bytes, static_cast<std::uint32_t>(field.grid().n));
  put(bytes, rank_code(field.rank()));
  put(bytes, time);
  put(bytes, delta);
  for (int c = 0; c < field.ncomp(); ++c) {
    auto vals = field.values(c);
    bytes.append(reinterpret_cast<const char*>(vals.data()), vals.size() * sizeof(double));
  }
  put(bytes, fnv1a(bytes.data(), bytes.size()));
  return bytes;
}

LoadedField decode_field(const std::string& bytes, std::size_t& off) {
  if (off + sizeof kMagic > bytes.size()) throw IoError("field file truncated");
  if (std::memcmp(bytes.data() + off, kMagic, sizeof kMagic) != 0)
    throw IoError("field file: bad magic");
  const std::size_t start = off;
  off += sizeof kMagic;
  const auto version = take<std::uint32_t>(bytes, off);
  if (version != kFieldFileVersion)
    throw IoError("field file: version mismatch (got " + std::to_string(version) + ")");
  TorusGrid g;
  g.d = static_cast<int>(take<std::uint32_t>(bytes, off));
  g.n = static_cast<int>(take<std::uint32_t>(bytes, off));
  const Rank rank = code_rank(take<std::uint32_t>(bytes, off));
  LoadedField out;
  out.time = take<double>(bytes, off);
  out.delta = take<double>(bytes, off);
  g.validate();
  out.field = TorusField(g, rank);
  for (int c = 0; c < out.field.ncomp(); ++c) {
    auto vals = out.field.values_mut(c);
    if (off + vals.size() * sizeof(double) > bytes.size())
      throw IoError("field file truncated (payload)");
    std::memcpy(vals.data(), bytes.data() + off, vals.size() * sizeof(double));
    off += vals.size() * sizeof(double);
  }
  const std::uint64_t expect = fnv1a(bytes.data() + start, off - start);
  const auto stored = take<std::uint64_t>(bytes, off);
  if (stored != expect) throw IoError("field file: checksum mismatch");
  return out;
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_field(const std::string& path, const TorusField& field, double time, double delta) {
  write_all(path, encode_field(field, time, delta));
}

LoadedField load_field(const std::string& path) {
  const std::string bytes = read_all(path);
  std::size_t off = 0;
  LoadedField out = decode_field(bytes, off);
  if (off != bytes.size()) throw IoError("field file: trailing bytes");
  return out;
}

FileStageCache::FileStageCache(std::string directory, std::uint64_t config_hash)
    : dir_(std::move(directory)), config_hash_(config_hash) {
  std::filesystem::create_directories(dir_);
}

std::string FileStageCache::path_for(int delta_index, int k) const {
  return dir_ + "/stage_d" + std::to_string(delta_index) + "_k" + std::to_string(k) + ".ckp";
}

void FileStageCache::store(int delta_index, int k, const StagePair& stage) {
  std::string bytes;
  bytes.append(kStageMagic, sizeof kStageMagic);
  put(bytes, kFieldFileVersion);
  put(bytes, config_hash_);
  put(bytes, stage.rho.t0());
  put(bytes, stage.rho.step());
  put(bytes, static_cast<std::uint64_t>(stage.rho.size()));
  put(bytes, stage.u.t0());
  put(bytes, stage.u.step());
  put(bytes, static_cast<std::uint64_t>(stage.u.size()));
  for (std::size_t i = 0; i < stage.rho.size(); ++i)
    bytes += encode_field(stage.rho[i], stage.rho.t0() + i * stage.rho.step(), 0.0);
  for (std::size_t i = 0; i < stage.u.size(); ++i)
    bytes += encode_field(stage.u[i], stage.u.t0() + i * stage.u.step(), 0.0);
  put(bytes, fnv1a(bytes.data(), bytes.size()));
  write_all(path_for(delta_index, k), bytes);
}

std::optional<StagePair> FileStageCache::load(int delta_index, int k) {
  const std::string path = path_for(delta_index, k);
  if (!std::filesystem::exists(path)) return std::nullopt;
  const std::string bytes = read_all(path);
  std::size_t off = 0;
  if (bytes.size() < sizeof kStageMagic ||
      std::memcmp(bytes.data(), kStageMagic, sizeof kStageMagic) != 0)
    throw IoError("stage checkpoint: bad magic in '" + path + "'");
  off += sizeof kStageMagic;
  if (take<std::uint32_t>(bytes, off) != kFieldFileVersion)
    throw IoError("stage checkpoint: version mismatch");
  if (take<std::uint64_t>(bytes, off) != config_hash_) return std::nullopt;  // different run
  const double rho_t0 = take<double>(bytes, off);
  const double rho_step = take<double>(bytes, off);
  const auto rho_count = take<std::uint64_t>(bytes, off);
  const double u_t0 = take<double>(bytes, off);
  const double u_step = take<double>(bytes, off);
  const auto u_count = take<std::uint64_t>(bytes, off);

  StagePair stage;
  stage.rho = FieldSeries(rho_t0, rho_step);
  stage.u = FieldSeries(u_t0, u_step);
  for (std::uint64_t i = 0; i < rho_count; ++i) stage.rho.push(decode_field(bytes, off).field);
  for (std::uint64_t i = 0; i < u_count; ++i) stage.u.push(decode_field(bytes, off).field);
  const std::uint64_t expect = fnv1a(bytes.data(), off);
  if (take<std::uint64_t>(bytes, off) != expect)
    throw IoError("stage checkpoint: checksum mismatch in '" + path + "'");
  return stage;
}

}  // namespace torusns
