#include "wavegrad/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace wavegrad {

namespace {

using SparseEntries = std::vector<std::pair<std::size_t, double>>;

void check_length(std::size_t got, std::size_t want, const char* who) {
    if (got != want) {
        throw std::invalid_argument(std::string(who) + ": expected length " + std::to_string(want) +
                                    ", got " + std::to_string(got));
    }
}

// Sort by index and merge duplicates; drops exact zeros.
SparseEntries canonicalize(SparseEntries entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseEntries out;
    out.reserve(entries.size());
    for (const auto& [idx, val] : entries) {
        if (!out.empty() && out.back().first == idx) {
            out.back().second += val;
        } else {
            out.emplace_back(idx, val);
        }
    }
    std::erase_if(out, [](const auto& e) { return e.second == 0.0; });
    return out;
}

// One synthesis step through the given filter: x of length m -> y of length 2m.
SparseEntries upsample_filter(const SparseEntries& x, std::size_t m, std::span<const double> filter) {
    const std::size_t len = 2 * m;
    SparseEntries y;
    y.reserve(x.size() * filter.size());
    for (const auto& [k, v] : x) {
        for (std::size_t j = 0; j < filter.size(); ++j) {
            y.emplace_back((2 * k + j) % len, filter[j] * v);
        }
    }
    return canonicalize(std::move(y));
}

}  // namespace

FilterPair daubechies_filters(int order) {
    auto taps = daubechies_lowpass_table(order);
    FilterPair f;
    f.order = order;
    f.lowpass.assign(taps.begin(), taps.end());
    const std::size_t len = f.lowpass.size();
    f.highpass.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        f.highpass[i] = sign * f.lowpass[len - 1 - i];
    }
    return f;
}

std::vector<double> SparseColumn::dense(std::size_t size) const {
    std::vector<double> out(size, 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) out.at(indices[k]) = values[k];
    return out;
}

int WaveletBasis::max_levels(std::size_t n) { return log2_exact(n); }

WaveletBasis::WaveletBasis(Grid grid, FilterPair filters, int levels)
    : grid_(grid), filters_(std::move(filters)), levels_(levels) {
    if (filters_.length() < 2 || filters_.length() % 2 != 0 ||
        filters_.highpass.size() != filters_.length()) {
        throw std::invalid_argument("WaveletBasis: malformed filter pair");
    }
    const int full = max_levels(grid_.n());
    if (levels_ == 0) levels_ = full;
    if (levels_ < 1 || levels_ > full) {
        throw std::invalid_argument("WaveletBasis: levels must be in [1, " + std::to_string(full) +
                                    "], got " + std::to_string(levels));
    }
    const std::size_t n = grid_.n();
    const std::size_t coarse = n >> levels_;
    segments_.push_back({0, coarse, levels_, true});
    std::size_t offset = coarse;
    for (int l = levels_; l >= 1; --l) {
        const std::size_t len = n >> l;
        segments_.push_back({offset, len, l, false});
        offset += len;
    }
}

const LevelSegment& WaveletBasis::segment_of(std::size_t i) const {
    if (i >= grid_.n()) throw std::out_of_range("WaveletBasis: 1D index out of range");
    for (const auto& seg : segments_) {
        if (i < seg.offset + seg.length) return seg;
    }
    throw std::logic_error("WaveletBasis: layout does not cover index");
}

bool WaveletBasis::has_constant_column() const { return segments_.front().length == 1; }

void WaveletBasis::forward_line(std::span<double> work, std::vector<double>& scratch) const {
    const auto& h = filters_.lowpass;
    const auto& g = filters_.highpass;
    const std::size_t taps = h.size();
    std::size_t len = work.size();
    scratch.resize(len);
    for (int l = 1; l <= levels_; ++l, len /= 2) {
        const std::size_t half = len / 2;
        for (std::size_t k = 0; k < half; ++k) {
            double a = 0.0;
            double d = 0.0;
            for (std::size_t j = 0; j < taps; ++j) {
                const double x = work[(2 * k + j) % len];
                a += h[j] * x;
                d += g[j] * x;
            }
            scratch[k] = a;
            scratch[half + k] = d;
        }
        std::copy_n(scratch.begin(), len, work.begin());
    }
}

void WaveletBasis::inverse_line(std::span<double> work, std::vector<double>& scratch) const {
    const auto& h = filters_.lowpass;
    const auto& g = filters_.highpass;
    const std::size_t taps = h.size();
    const std::size_t n = work.size();
    scratch.resize(n);
    for (int l = levels_; l >= 1; --l) {
        const std::size_t len = n >> (l - 1);
        const std::size_t half = len / 2;
        std::fill_n(scratch.begin(), len, 0.0);
        for (std::size_t k = 0; k < half; ++k) {
            const double a = work[k];
            const double d = work[half + k];
            for (std::size_t j = 0; j < taps; ++j) {
                scratch[(2 * k + j) % len] += h[j] * a + g[j] * d;
            }
        }
        std::copy_n(scratch.begin(), len, work.begin());
    }
}

std::vector<double> WaveletBasis::forward(std::span<const double> v) const {
    check_length(v.size(), size(), "WaveletBasis::forward");
    std::vector<double> out(v.begin(), v.end());
    std::vector<double> scratch;
    const std::size_t n = grid_.n();
    if (grid_.dim() == 1) {
        forward_line(out, scratch);
        return out;
    }
    for (std::size_t r = 0; r < n; ++r) {
        forward_line(std::span<double>(out).subspan(r * n, n), scratch);
    }
    std::vector<double> col(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = out[r * n + c];
        forward_line(col, scratch);
        for (std::size_t r = 0; r < n; ++r) out[r * n + c] = col[r];
    }
    return out;
}

std::vector<double> WaveletBasis::inverse(std::span<const double> c) const {
    check_length(c.size(), size(), "WaveletBasis::inverse");
    std::vector<double> out(c.begin(), c.end());
    std::vector<double> scratch;
    const std::size_t n = grid_.n();
    if (grid_.dim() == 1) {
        inverse_line(out, scratch);
        return out;
    }
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t r = 0; r < n; ++r) col[r] = out[r * n + j];
        inverse_line(col, scratch);
        for (std::size_t r = 0; r < n; ++r) out[r * n + j] = col[r];
    }
    for (std::size_t r = 0; r < n; ++r) {
        inverse_line(std::span<double>(out).subspan(r * n, n), scratch);
    }
    return out;
}

SparseColumn WaveletBasis::column_1d(std::size_t i) const {
    const auto& seg = segment_of(i);
    const std::size_t n = grid_.n();
    const std::size_t pos = i - seg.offset;
    SparseColumn col;

    if (seg.scaling && seg.length == 1) {
        // Full decomposition: the coarsest scaling function is exactly constant.
        const double value = 1.0 / std::sqrt(static_cast<double>(n));
        col.indices.resize(n);
        col.values.assign(n, value);
        for (std::size_t s = 0; s < n; ++s) col.indices[s] = s;
        return col;
    }

    SparseEntries state;
    std::size_t len = seg.length;
    int level = seg.level;
    if (seg.scaling) {
        state = {{pos, 1.0}};
    } else {
        state = upsample_filter({{pos, 1.0}}, len, filters_.highpass);
        len *= 2;
        --level;
    }
    for (; level > 0; --level, len *= 2) {
        state = upsample_filter(state, len, filters_.lowpass);
    }
    col.indices.reserve(state.size());
    col.values.reserve(state.size());
    for (const auto& [idx, val] : state) {
        col.indices.push_back(idx);
        col.values.push_back(val);
    }
    return col;
}

SparseColumn WaveletBasis::column(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("WaveletBasis::column: index out of range");
    if (grid_.dim() == 1) return column_1d(i);
    const std::size_t n = grid_.n();
    const SparseColumn a = column_1d(i / n);
    const SparseColumn b = column_1d(i % n);
    SparseColumn col;
    col.indices.reserve(a.nnz() * b.nnz());
    col.values.reserve(a.nnz() * b.nnz());
    for (std::size_t p = 0; p < a.nnz(); ++p) {
        for (std::size_t q = 0; q < b.nnz(); ++q) {
            col.indices.push_back(a.indices[p] * n + b.indices[q]);
            col.values.push_back(a.values[p] * b.values[q]);
        }
    }
    return col;
}

std::vector<double> dwt_forward(std::span<const double> v, const WaveletBasis& basis) {
    if (basis.grid().dim() != 1) throw std::invalid_argument("dwt_forward: basis is not 1D");
    return basis.forward(v);
}

std::vector<double> dwt_inverse(std::span<const double> c, const WaveletBasis& basis) {
    if (basis.grid().dim() != 1) throw std::invalid_argument("dwt_inverse: basis is not 1D");
    return basis.inverse(c);
}

std::vector<double> dwt2_forward(std::span<const double> v, const WaveletBasis& basis) {
    if (basis.grid().dim() != 2) throw std::invalid_argument("dwt2_forward: basis is not 2D");
    return basis.forward(v);
}

std::vector<double> dwt2_inverse(std::span<const double> c, const WaveletBasis& basis) {
    if (basis.grid().dim() != 2) throw std::invalid_argument("dwt2_inverse: basis is not 2D");
    return basis.inverse(c);
}

SparseColumn basis_column(const WaveletBasis& basis, std::size_t i) { return basis.column(i); }

}  // namespace wavegrad
