#include "scslab/cli/cache.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace scslab::cli {
namespace {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(const std::string& bytes, std::size_t len) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(bytes[i]);
    h *= kFnvPrime;
  }
  return h;
}

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_string(std::string& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  Reader(const std::string& data, std::size_t end, std::string path) : data_(data), end_(end), path_(std::move(path)) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void read_doubles(std::vector<double>& dst, std::size_t n) {
    if (n > (end_ - pos_) / sizeof(double)) fail("truncated");
    dst.resize(n);
    std::memcpy(dst.data(), data_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
  }

  std::size_t position() const { return pos_; }
  [[noreturn]] void fail(const std::string& why) const { throw CacheError("cache file '" + path_ + "': " + why); }

 private:
  void need(std::size_t n) const {
    if (n > end_ - pos_) fail("truncated");
  }

  const std::string& data_;
  std::size_t end_;
  std::size_t pos_ = 0;
  std::string path_;
};

}  // namespace

std::string cache_path(const std::string& dir, int k, std::size_t N) {
  return (std::filesystem::path(dir) / ("eig_k" + std::to_string(k) + "_n" + std::to_string(N) + ".bin")).string();
}

void cache_store(const std::string& path, const std::vector<qarith::HeckeEigenform>& forms) {
  if (forms.empty()) throw CacheError("cache_store: no forms to store");
  const int k = forms.front().k;
  const std::size_t N = forms.front().table_length();
  std::string out;
  put_string(out, kCacheTag);
  put<std::int32_t>(out, k);
  put<std::uint64_t>(out, N);
  put_string(out, kOrderingKey);
  put<std::uint64_t>(out, forms.size());
  for (const auto& f : forms) {
    if (f.k != k || f.table_length() != N) throw CacheError("cache_store: forms differ in weight or table length");
    const std::uint8_t flags = (f.petersson_norm ? 1 : 0) | (f.sym2_l1 ? 2 : 0);
    put<std::uint8_t>(out, flags);
    put<double>(out, f.petersson_norm.value_or(0.0));
    put<double>(out, f.sym2_l1.value_or(0.0));
    out.append(reinterpret_cast<const char*>(f.lambda.data()), f.lambda.size() * sizeof(double));
  }
  put<std::uint64_t>(out, fnv1a(out, out.size()));

  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CacheError("cannot write '" + tmp.string() + "'");
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    os.flush();
    if (!os) {
      os.close();
      fs::remove(tmp);
      throw CacheError("write failed for '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target);
}

std::vector<qarith::HeckeEigenform> cache_load(const std::string& path, int k, std::size_t N) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CacheError("cache file '" + path + "': cannot open");
  const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof(std::uint64_t)) throw CacheError("cache file '" + path + "': truncated");
  const std::size_t body = data.size() - sizeof(std::uint64_t);
  Reader r(data, body, path);

  if (r.get_string() != kCacheTag) r.fail(std::string("format tag mismatch, expected ") + kCacheTag);
  const auto file_k = r.get<std::int32_t>();
  const auto file_n = r.get<std::uint64_t>();
  if (file_k != k || file_n != N)
    r.fail("header describes k=" + std::to_string(file_k) + " N=" + std::to_string(file_n) + ", expected k=" +
           std::to_string(k) + " N=" + std::to_string(N));
  if (r.get_string() != kOrderingKey) r.fail(std::string("ordering key mismatch, expected ") + kOrderingKey);
  const auto count = r.get<std::uint64_t>();
  if (count == 0 || count > 1000) r.fail("implausible form count");

  std::vector<qarith::HeckeEigenform> forms(count);
  for (auto& f : forms) {
    f.k = k;
    const auto flags = r.get<std::uint8_t>();
    const double norm = r.get<double>();
    const double l1 = r.get<double>();
    if (flags & 1) f.petersson_norm = norm;
    if (flags & 2) f.sym2_l1 = l1;
    r.read_doubles(f.lambda, N + 1);
  }
  if (r.position() != body) r.fail("trailing bytes");
  std::uint64_t stored;
  std::memcpy(&stored, data.data() + body, sizeof stored);
  if (stored != fnv1a(data, body)) r.fail("checksum mismatch");
  return forms;
}

}  // namespace scslab::cli
