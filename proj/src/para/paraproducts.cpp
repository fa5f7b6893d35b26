#include "dyadic/paraproducts.hpp"

#include <algorithm>
#include <cmath>

#include "dyadic/haar.hpp"

namespace dyadic {

namespace {

void check_channels(const Shape& shape, std::span<const AxisChannel> channels) {
  if (channels.size() != shape.n_params()) throw ShapeError("one channel per axis required");
}

std::vector<double> paired(const HaarExpansion& e, std::span<const AxisChannel> channels, bool symbol_side) {
  const Shape& shape = e.shape();
  const auto sig = haar_inverse(e);
  std::vector<double> data(sig.values().begin(), sig.values().end());
  for (std::size_t a = 0; a < shape.n_params(); ++a) {
    const Pairing p = symbol_side ? channels[a].symbol : channels[a].argument;
    data = transform_axis(shape, data, a, shape.extent(a), p == Pairing::Haar ? line::analyze : line::average);
  }
  return data;
}

GridSignal combine(const Shape& shape, std::span<const AxisChannel> channels, std::span<const double> sym,
                   std::span<const double> arg) {
  std::vector<double> w(shape.size(), 0.0);
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    std::size_t fs = f;
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (channels[a].mean_only)
        fs -= static_cast<std::size_t>(s[a]) * shape.stride(a);  // symbol constant along this axis
      else if (s[a] == 0)
        return;
    }
    w[f] = sym[fs] * arg[f];
  });
  for (std::size_t a = 0; a < shape.n_params(); ++a)
    w = transform_axis(shape, w, a, shape.extent(a), channels[a].output == Emit::Haar ? line::synthesize : line::spread);
  return GridSignal(shape, std::move(w));
}

/// The component of phi with Mean on the scalar axes and Haar detail on all others.
HaarExpansion symbol_component(const HaarExpansion& phi, std::span<const AxisChannel> channels) {
  return filter_coefficients(phi, [&](std::span<const std::int64_t> s) {
    for (std::size_t a = 0; a < s.size(); ++a)
      if ((s[a] == 0) != channels[a].mean_only) return false;
    return true;
  });
}

void check_binary(std::span<const int> v, std::size_t n, const char* what) {
  if (v.size() != n) throw ShapeError(std::string(what) + " vector length does not match parameter count");
  for (int x : v)
    if (x != 0 && x != 1) throw DomainError(std::string(what) + " entries must be 0 or 1");
}

std::string channel_name(const AxisChannel& c) {
  if (c == AxisChannel::pi()) return "Pi";
  if (c == AxisChannel::delta()) return "Delta";
  if (c == AxisChannel::r()) return "R";
  if (c == AxisChannel::mean()) return "M";
  return "?";
}

std::vector<BilinearOperator> channel_products(const HaarExpansion& phi, const std::vector<AxisChannel>& alphabet,
                                               bool need_mean) {
  const std::size_t N = phi.n_params();
  std::vector<BilinearOperator> out;
  std::vector<std::size_t> pick(N, 0);
  while (true) {
    std::vector<AxisChannel> ch;
    std::string name;
    bool has_mean = false;
    for (std::size_t a = 0; a < N; ++a) {
      ch.push_back(alphabet[pick[a]]);
      has_mean = has_mean || ch.back().mean_only;
      name += (a ? "_" : "") + channel_name(ch.back());
    }
    if (!need_mean || has_mean) out.emplace_back(name, symbol_component(phi, ch), ch);
    std::size_t a = N;
    while (a-- > 0) {
      if (++pick[a] < alphabet.size()) break;
      pick[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

}  // namespace

bool SignSpec::admissible() const {
  for (std::size_t j = 0; j < beta.size(); ++j)
    if (eps.at(j) != 0 || delta.at(j) != 1 - beta[j]) return false;
  return eps.size() == beta.size() && delta.size() == beta.size();
}

std::vector<AxisChannel> SignSpec::channels() const {
  if (eps.size() != delta.size() || eps.size() != beta.size()) throw ShapeError("sign vectors differ in length");
  check_binary(eps, eps.size(), "eps");
  check_binary(delta, eps.size(), "delta");
  check_binary(beta, eps.size(), "beta");
  std::vector<AxisChannel> ch(eps.size());
  for (std::size_t j = 0; j < eps.size(); ++j)
    ch[j] = {eps[j] ? Pairing::Average : Pairing::Haar, delta[j] ? Pairing::Average : Pairing::Haar,
             beta[j] ? Emit::Box : Emit::Haar, false};
  return ch;
}

SignSpec SignSpec::paraproduct(std::vector<int> beta) {
  SignSpec s;
  s.eps.assign(beta.size(), 0);
  for (int b : beta) s.delta.push_back(1 - b);
  s.beta = std::move(beta);
  return s;
}

GridSignal bilinear_signal(std::span<const AxisChannel> channels, const HaarExpansion& phi, const HaarExpansion& f) {
  if (!(phi.shape() == f.shape())) throw ShapeError("symbol and argument live on different grids");
  check_channels(phi.shape(), channels);
  return combine(phi.shape(), channels, paired(phi, channels, true), paired(f, channels, false));
}

HaarExpansion bilinear_channels(std::span<const AxisChannel> channels, const HaarExpansion& phi, const HaarExpansion& f) {
  return haar_forward(bilinear_signal(channels, phi, f));
}

HaarExpansion bilinear_apply(const SignSpec& spec, const HaarExpansion& phi, const HaarExpansion& f) {
  if (spec.eps.size() != phi.n_params()) throw ShapeError("sign vectors do not match parameter count");
  const auto ch = spec.channels();
  return bilinear_channels(ch, phi, f);
}

HaarExpansion pi_main(const HaarExpansion& phi, const HaarExpansion& f) {
  const std::vector<AxisChannel> ch(phi.n_params(), AxisChannel::pi());
  return bilinear_channels(ch, phi, f);
}

HaarExpansion delta_form(const HaarExpansion& phi, const HaarExpansion& f) {
  const std::vector<AxisChannel> ch(phi.n_params(), AxisChannel::delta());
  return bilinear_channels(ch, phi, f);
}

HaarExpansion pi_beta(const HaarExpansion& phi, const HaarExpansion& f, std::span<const int> beta) {
  check_binary(beta, phi.n_params(), "beta");
  if (std::all_of(beta.begin(), beta.end(), [](int b) { return b == 0; }))
    throw DomainError("pi_beta needs beta != 0; use pi_main");
  return bilinear_apply(SignSpec::paraproduct({beta.begin(), beta.end()}), phi, f);
}

HaarExpansion sigma_op(const HaarExpansion& b, int k, std::size_t axis) {
  const Shape& shape = b.shape();
  if (axis >= shape.n_params()) throw DomainError("bad axis " + std::to_string(axis));
  if (k < 0 || k >= shape.depth(axis)) throw DomainError("sigma level out of range: " + std::to_string(k));
  HaarExpansion out(shape);
  std::vector<std::int64_t> t(shape.n_params());
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    const int lvl = slot_level(s[axis]);
    if (lvl < k) {
      out[f] = b[f];
    } else {
      // Accumulate |b|^2 at the level-k ancestor; square roots taken below.
      std::copy(s.begin(), s.end(), t.begin());
      t[axis] = DyadicInterval::from_heap(s[axis]).ancestor(k).heap_index();
      out[shape.flat(t)] += b[f] * b[f];
    }
  });
  for_each_index(shape, [&](std::span<const std::int64_t> s, std::size_t f) {
    if (slot_level(s[axis]) == k) out[f] = std::sqrt(out[f]);
  });
  return out;
}

BilinearOperator::BilinearOperator(std::string name, HaarExpansion symbol, std::vector<AxisChannel> channels)
    : name_(std::move(name)), symbol_(std::move(symbol)), channels_(std::move(channels)) {
  check_channels(symbol_.shape(), channels_);
  paired_symbol_ = paired(symbol_, channels_, true);
}

GridSignal BilinearOperator::apply_signal(const HaarExpansion& f) const {
  if (!(f.shape() == symbol_.shape())) throw ShapeError("argument lives on a different grid than the symbol");
  return combine(symbol_.shape(), channels_, paired_symbol_, paired(f, channels_, false));
}

HaarExpansion BilinearOperator::apply(const HaarExpansion& f) const { return haar_forward(apply_signal(f)); }

std::vector<BilinearOperator> nine_terms(const HaarExpansion& phi) {
  if (phi.n_params() != 2) throw ShapeError("the nine-term decomposition is two-parameter");
  const auto P = AxisChannel::pi(), D = AxisChannel::delta(), R = AxisChannel::r();
  const std::vector<int> zero{0, 0};
  const auto pure = q_tail(phi, zero);
  std::vector<BilinearOperator> out;
  out.emplace_back("Pi", pure, std::vector{P, P});
  out.emplace_back("Delta", pure, std::vector{D, D});
  out.emplace_back("Pi^(0,1)", pure, std::vector{P, D});
  out.emplace_back("Pi^(1,0)", pure, std::vector{D, P});
  out.emplace_back("R_Delta", pure, std::vector{R, D});
  out.emplace_back("R_Pi", pure, std::vector{R, P});
  out.emplace_back("Delta_R", pure, std::vector{D, R});
  out.emplace_back("Pi_R", pure, std::vector{P, R});
  out.emplace_back("R_R", pure, std::vector{R, R});
  return out;
}

std::vector<BilinearOperator> mean_channel_terms(const HaarExpansion& phi) {
  return channel_products(phi, {AxisChannel::mean(), AxisChannel::pi(), AxisChannel::delta(), AxisChannel::r()}, true);
}

std::vector<BilinearOperator> product_channels(const HaarExpansion& phi) {
  return channel_products(phi, {AxisChannel::mean(), AxisChannel::pi(), AxisChannel::delta(), AxisChannel::r()}, false);
}

std::pair<int, int> cotlar_band(int M, int depth) {
  if (M < 0 || M > 30) throw DomainError("band index out of range");
  const int lo = (1 << M) - 1;
  const int hi = std::min((1 << (M + 1)) - 2, depth - 1);
  return {lo, hi};
}

int cotlar_band_count(int depth) {
  int M = 0;
  while (cotlar_band(M, depth).first <= depth - 1) ++M;
  return M;
}

HaarExpansion band_projection(const HaarExpansion& f, int M, std::size_t axis) {
  if (axis >= f.n_params()) throw DomainError("bad axis " + std::to_string(axis));
  const auto [lo, hi] = cotlar_band(M, f.shape().depth(axis));
  return filter_coefficients(f, [&](std::span<const std::int64_t> s) {
    const int l = slot_level(s[axis]);
    return is_pure(s) && l >= lo && l <= hi;
  });
}

void PartitionSpec::validate(std::size_t n_params) const {
  if (j1.empty() || j2.empty() || j3.empty()) throw DomainError("partition needs J1, J2 and J3 nonempty");
  std::vector<int> seen(n_params, 0);
  for (const auto* part : {&j1, &j2, &j3})
    for (auto a : *part) {
      if (a >= n_params) throw DomainError("partition axis out of range: " + std::to_string(a));
      if (seen[a]++) throw DomainError("partition sets overlap at axis " + std::to_string(a));
    }
  for (std::size_t a = 0; a < n_params; ++a)
    if (!seen[a]) throw DomainError("partition does not cover axis " + std::to_string(a));
}

std::vector<AxisChannel> PartitionSpec::channels(std::size_t n_params) const {
  validate(n_params);
  std::vector<AxisChannel> ch(n_params);
  for (auto a : j1) ch[a] = AxisChannel::pi();
  for (auto a : j2) ch[a] = AxisChannel::delta();
  for (auto a : j3) ch[a] = AxisChannel::r();
  return ch;
}

HaarExpansion pi_partition(const HaarExpansion& phi, const HaarExpansion& b, const PartitionSpec& spec) {
  const auto ch = spec.channels(phi.n_params());
  return bilinear_channels(ch, phi, b);
}

}  // namespace dyadic
