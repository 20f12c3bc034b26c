#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/hypervector.hpp"

namespace hdtac {

/// Straightforward n-gram encoding:
///   sum_j  prod_{i=0}^{n-1} permute(symbols[j + i], n - 1 - i)
/// The first symbol of each gram is rotated furthest, the last not at all.
template <typename T>
Hypervector<bundle_t<T>> encode_ngram(std::span<const Hypervector<T>> symbols, std::size_t n) {
    if (n == 0) throw InvalidConfig("encode_ngram: n must be >= 1");
    if (symbols.size() < n) throw InvalidValue("encode_ngram: sequence shorter than n");
    using Acc = bundle_t<T>;
    const std::size_t d = symbols.front().dim();
    Hypervector<Acc> out(d);
    for (std::size_t j = 0; j + n <= symbols.size(); ++j) {
        Hypervector<Acc> gram(d, Acc{1});
        for (std::size_t i = 0; i < n; ++i) {
            detail::require_same_dim(d, symbols[j + i].dim(), "encode_ngram");
            const auto rotated = permute(symbols[j + i], static_cast<long long>(n - 1 - i));
            for (std::size_t k = 0; k < d; ++k) gram[k] *= static_cast<Acc>(rotated[k]);
        }
        bundle_into(out, gram);
    }
    return out;
}

template <typename T>
Hypervector<bundle_t<T>> encode_ngram(const std::vector<Hypervector<T>>& symbols, std::size_t n) {
    return encode_ngram(std::span<const Hypervector<T>>(symbols), n);
}

}  // namespace hdtac
