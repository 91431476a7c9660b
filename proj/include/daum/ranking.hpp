#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace daum {

/// ceil(ratio * n) clamped to [0, n], with a 1e-9 guard so that products such
/// as 0.2 * 20000 are not pushed up by representation error.
std::size_t ratio_count(double ratio, std::size_t n);

/// Indices ordered by descending score; equal scores keep ascending index.
std::vector<std::size_t> rank_descending(std::span<const double> scores);

/// First `k` entries of rank_descending(scores).
std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k);

/// Membership mask of top_k(scores, k).
std::vector<bool> top_k_mask(std::span<const double> scores, std::size_t k);

}  // namespace daum
