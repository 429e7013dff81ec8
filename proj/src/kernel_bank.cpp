#include "unispec/kernel_bank.hpp"

#include "unispec/errors.hpp"
#include "unispec/parallel_ops.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace unispec {

// KernelSpec ------------------------------------------------------------------

KernelSpec KernelSpec::gaussian(double t) {
  KernelSpec s;
  s.kind = Kind::gaussian;
  s.t = t;
  s.validate();
  return s;
}

KernelSpec KernelSpec::linear() { return KernelSpec{}; }

KernelSpec KernelSpec::polynomial(double a, int b) {
  KernelSpec s;
  s.kind = Kind::polynomial;
  s.a = a;
  s.b = b;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  switch (kind) {
    case Kind::gaussian:
      if (!(std::isfinite(t) && t > 0.0))
        throw InvalidArgument(fmt::format("gaussian kernel requires t > 0, got {}", t));
      break;
    case Kind::polynomial:
      if (!std::isfinite(a)) throw InvalidArgument("polynomial kernel offset must be finite");
      if (b < 1) throw InvalidArgument(fmt::format("polynomial kernel requires b >= 1, got {}", b));
      break;
    case Kind::linear:
      break;
    default:
      throw InvalidArgument("unknown kernel kind");
  }
}

std::string KernelSpec::to_string() const {
  switch (kind) {
    case Kind::gaussian:
      return fmt::format("gaussian:{}", t);
    case Kind::polynomial:
      return fmt::format("poly:{}:{}", a, b);
    case Kind::linear:
    default:
      return "linear";
  }
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_real(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(fmt::format("kernel spec '{}': '{}' is not a number", context, s));
  }
}

}  // namespace

KernelSpec KernelSpec::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw InvalidArgument("empty kernel spec");
  const std::string& name = parts[0];
  if (name == "linear" && parts.size() == 1) return linear();
  if ((name == "gaussian" || name == "gauss") && parts.size() == 2)
    return gaussian(parse_real(parts[1], text));
  if ((name == "poly" || name == "polynomial") && parts.size() == 3) {
    const double b = parse_real(parts[2], text);
    if (b != std::floor(b) || b < 1 || b > 64)
      throw InvalidArgument(fmt::format("kernel spec '{}': degree must be an integer >= 1", text));
    return polynomial(parse_real(parts[1], text), static_cast<int>(b));
  }
  throw InvalidArgument(fmt::format(
      "unrecognized kernel spec '{}' (expected linear, gaussian:<t> or poly:<a>:<b>)", text));
}

// Bank types --------------------------------------------------------------------

void KernelBank::validate() const {
  if (kernels.empty()) throw InvalidArgument("kernel bank is empty");
  for (const auto& k : kernels) {
    if (k.n() != n() || k.K.cols() != n())
      throw InvalidArgument("kernel bank members disagree on sample count");
  }
}

double WeightVector::sqrt_sum() const {
  double s = 0.0;
  for (double v : w) s += std::sqrt(v);
  return s;
}

bool WeightVector::feasible(double tol) const {
  if (w.empty()) return false;
  for (double v : w)
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
  return std::abs(sqrt_sum() - 1.0) <= tol;
}

// Construction -------------------------------------------------------------------

KernelMatrix build_kernel(const Matrix& X, const KernelSpec& spec) {
  spec.validate();
  require_finite(X, "build_kernel");
  if (X.cols() < 2)
    throw InvalidArgument(fmt::format("build_kernel: need at least 2 samples, got {}", X.cols()));

  KernelMatrix out;
  out.spec = spec;
  switch (spec.kind) {
    case KernelSpec::Kind::gaussian: {
      Matrix D = par::column_squared_distances(X);
      const double dmax2 = D.maxCoeff();
      if (!(dmax2 > 0.0))
        throw DataError(
            "build_kernel: all samples are identical (maximal pairwise distance is 0); "
            "the gaussian kernel is undefined");
      const double scale = 1.0 / (spec.t * dmax2);
      out.K = (-scale * D.array()).exp().matrix();
      break;
    }
    case KernelSpec::Kind::linear:
      out.K = par::column_gram(X);
      break;
    case KernelSpec::Kind::polynomial: {
      Matrix G = par::column_gram(X);
      const double a = spec.a;
      const double b = spec.b;
      out.K = G.unaryExpr([a, b](double g) { return std::pow(a + g, b); });
      break;
    }
  }
  require_finite(out.K, "build_kernel (overflow in kernel evaluation)");
  return out;
}

KernelMatrix normalize_kernel(const KernelMatrix& K) {
  require_finite(K.K, "normalize_kernel");
  const double top = K.K.maxCoeff();
  if (!(top > 0.0)) {
    throw DataError(fmt::format(
        "normalize_kernel: largest entry is {} (zero or non-positive kernel cannot be rescaled)",
        top));
  }
  KernelMatrix out = K;
  out.K /= top;
  out.normalized = true;
  return out;
}

KernelMatrix repair_psd(const KernelMatrix& K) {
  const Matrix S = symmetrized(K.K, "repair_psd");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw SolverError("repair_psd: eigensolver failed");
  const double smallest = eig.eigenvalues()(0);
  if (smallest >= 0.0) return K;

  const double floor = -kPsdRepairTolerance * inf_norm(S);
  if (smallest < floor) {
    throw DataError(fmt::format(
        "repair_psd: smallest eigenvalue {:.6e} is below -1e-8*||K||_inf = {:.6e}; "
        "the kernel is not positive semi-definite",
        smallest, floor));
  }
  const Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  const Matrix& V = eig.eigenvectors();
  Matrix R = V * clipped.asDiagonal() * V.transpose();
  KernelMatrix out = K;
  out.K = symmetrized(R, "repair_psd");
  return out;
}

KernelMatrix prepared_kernel(const Matrix& X, const KernelSpec& spec) {
  return normalize_kernel(repair_psd(build_kernel(X, spec)));
}

std::vector<KernelSpec> standard_specs() {
  std::vector<KernelSpec> specs;
  for (double t : {0.01, 0.05, 0.1, 1.0, 10.0, 50.0, 100.0}) specs.push_back(KernelSpec::gaussian(t));
  specs.push_back(KernelSpec::linear());
  specs.push_back(KernelSpec::polynomial(0.0, 2));
  specs.push_back(KernelSpec::polynomial(0.0, 4));
  specs.push_back(KernelSpec::polynomial(1.0, 2));
  specs.push_back(KernelSpec::polynomial(1.0, 4));
  return specs;
}

KernelBank make_bank(const Matrix& X, std::span<const KernelSpec> specs) {
  if (specs.empty()) throw InvalidArgument("make_bank: no kernel specs given");
  KernelBank bank;
  bank.kernels.reserve(specs.size());
  for (const auto& spec : specs) bank.kernels.push_back(prepared_kernel(X, spec));
  return bank;
}

KernelBank standard_bank(const Matrix& X) {
  const auto specs = standard_specs();
  return make_bank(X, specs);
}

KernelMatrix combine_raw(const KernelBank& bank, std::span<const double> coefficients) {
  bank.validate();
  if (coefficients.size() != bank.size()) {
    throw InvalidArgument(fmt::format("combine: {} weights for a bank of {} kernels",
                                      coefficients.size(), bank.size()));
  }
  KernelMatrix out;
  out.K = Matrix::Zero(bank.n(), bank.n());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const double c = coefficients[i];
    if (!std::isfinite(c)) throw InvalidArgument("combine: non-finite weight");
    out.K += c * bank.kernels[i].K;
  }
  return out;
}

KernelMatrix combine(const KernelBank& bank, const WeightVector& w) {
  if (w.size() != bank.size()) {
    throw InvalidArgument(
        fmt::format("combine: {} weights for a bank of {} kernels", w.size(), bank.size()));
  }
  if (!w.feasible()) {
    throw InvalidArgument(fmt::format(
        "combine: weights must be nonnegative with sum of square roots 1 (got {:.12g})",
        w.sqrt_sum()));
  }
  return combine_raw(bank, w.w);
}

// Cache I/O ---------------------------------------------------------------------

namespace {

constexpr std::array<char, 4> kMagic{'U', 'K', 'R', 'N'};

template <typename T>
void put_le(std::string& buf, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  buf.append(bytes.data(), bytes.size());
}

template <typename T>
T get_le(const std::string& buf, std::size_t offset) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), buf.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

using CacheKind = CacheFormatError::Kind;

void need(const std::string& buf, std::size_t end, const std::filesystem::path& path,
          const char* what) {
  if (buf.size() < end) {
    throw CacheFormatError(
        CacheKind::truncated,
        fmt::format("kernel cache {}: truncated while reading {} (expected at least {} bytes, "
                    "file has {})",
                    path.string(), what, end, buf.size()));
  }
}

}  // namespace

void cache_write(const KernelMatrix& K, const std::filesystem::path& path) {
  if (!K.spec) throw InvalidArgument("cache_write: combined kernels have no spec tag to store");
  require_finite(K.K, "cache_write");
  const Index n = K.n();
  if (n < 1 || K.K.cols() != n) throw InvalidArgument("cache_write: kernel must be square");

  std::string buf;
  buf.reserve(64 + static_cast<std::size_t>(n * n) * 8);
  buf.append(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(buf, kCacheVersion);
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(n));
  put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(K.spec->kind));
  switch (K.spec->kind) {
    case KernelSpec::Kind::gaussian:
      put_le<double>(buf, K.spec->t);
      break;
    case KernelSpec::Kind::polynomial:
      put_le<double>(buf, K.spec->a);
      put_le<double>(buf, static_cast<double>(K.spec->b));
      break;
    case KernelSpec::Kind::linear:
      break;
  }
  put_le<std::uint8_t>(buf, K.normalized ? 1 : 0);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) put_le<double>(buf, K.K(i, j));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CacheFormatError(CacheKind::io, "cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw CacheFormatError(CacheKind::io, "write failed for " + path.string());
}

KernelMatrix cache_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheFormatError(CacheKind::io, "cannot open kernel cache " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  need(buf, kMagic.size(), path, "magic bytes");
  if (!std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw CacheFormatError(CacheKind::bad_magic,
                           fmt::format("kernel cache {}: bad magic bytes (not a UKRN file)",
                                       path.string()));
  }
  std::size_t off = kMagic.size();
  need(buf, off + 4, path, "version");
  const auto version = get_le<std::uint32_t>(buf, off);
  off += 4;
  if (version != kCacheVersion) {
    throw CacheFormatError(CacheKind::bad_version,
                           fmt::format("kernel cache {}: unsupported format version {} (expected {})",
                                       path.string(), version, kCacheVersion));
  }
  need(buf, off + 8 + 1, path, "dimension and spec tag");
  const auto n64 = get_le<std::uint64_t>(buf, off);
  off += 8;
  const auto tag = get_le<std::uint8_t>(buf, off);
  off += 1;

  KernelSpec spec;
  try {
    switch (tag) {
      case 0:
        need(buf, off + 8, path, "gaussian parameter");
        spec = KernelSpec::gaussian(get_le<double>(buf, off));
        off += 8;
        break;
      case 1:
        spec = KernelSpec::linear();
        break;
      case 2: {
        need(buf, off + 16, path, "polynomial parameters");
        const double a = get_le<double>(buf, off);
        const double b = get_le<double>(buf, off + 8);
        off += 16;
        if (!(b >= 1.0 && b <= 64.0 && b == std::floor(b)))
          throw InvalidArgument("polynomial degree is not a positive integer");
        spec = KernelSpec::polynomial(a, static_cast<int>(b));
        break;
      }
      default:
        throw CacheFormatError(CacheKind::bad_header,
                               fmt::format("kernel cache {}: unknown spec tag {}", path.string(),
                                           static_cast<int>(tag)));
    }
  } catch (const InvalidArgument& e) {
    throw CacheFormatError(CacheKind::bad_header,
                           fmt::format("kernel cache {}: invalid kernel parameters ({})",
                                       path.string(), e.what()));
  }
  need(buf, off + 1, path, "normalized flag");
  const auto flag = get_le<std::uint8_t>(buf, off);
  off += 1;
  if (flag > 1) {
    throw CacheFormatError(CacheKind::bad_header,
                           fmt::format("kernel cache {}: normalized flag byte is {}",
                                       path.string(), static_cast<int>(flag)));
  }

  // Guard n*n*8 against overflow before comparing sizes.
  constexpr std::uint64_t kMaxN = 1ull << 26;
  if (n64 == 0 || n64 > kMaxN) {
    throw CacheFormatError(CacheKind::dimension_mismatch,
                           fmt::format("kernel cache {}: implausible dimension n = {}",
                                       path.string(), n64));
  }
  const std::uint64_t expected = off + n64 * n64 * 8;
  if (buf.size() < expected) {
    throw CacheFormatError(
        CacheKind::truncated,
        fmt::format("kernel cache {}: truncated payload (expected {} bytes for n = {}, file has {})",
                    path.string(), expected, n64, buf.size()));
  }
  if (buf.size() > expected) {
    throw CacheFormatError(
        CacheKind::dimension_mismatch,
        fmt::format("kernel cache {}: dimension mismatch (header n = {} implies {} bytes, file "
                    "has {})",
                    path.string(), n64, expected, buf.size()));
  }

  const auto n = static_cast<Index>(n64);
  KernelMatrix out;
  out.spec = spec;
  out.normalized = flag == 1;
  out.K.resize(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      out.K(i, j) = get_le<double>(buf, off);
      off += 8;
    }
  require_finite(out.K, "kernel cache " + path.string());
  return out;
}

}  // namespace unispec
