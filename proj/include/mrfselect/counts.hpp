#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "mrfselect/types.hpp"

namespace mrfselect {

/// Configuration counts N(a_W) for one margin W. Zero counts are absent.
struct CountTable {
  std::vector<int> margin;  // sorted ascending
  std::uint64_t n = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
};

namespace detail {

/// Restriction code of row i to the sorted margin w.
inline std::uint64_t row_code(const Sample& sample, std::size_t i, const std::vector<int>& w) {
  std::uint64_t code = 0, radix = 1;
  const std::uint8_t* row = sample.row(i);
  for (int v : w) {
    code += radix * row[v];
    radix *= static_cast<std::uint64_t>(sample.dims().alphabet_size);
  }
  return code;
}

}  // namespace detail

inline CountTable count_margin(const Sample& sample, const std::vector<int>& w_in) {
  if (w_in.empty()) throw InvalidMargin("count_margin: empty margin");
  CountTable table;
  table.margin = sorted_margin(w_in, sample.dims());
  table.n = sample.n();
  for (std::size_t i = 0; i < sample.n(); ++i)
    ++table.counts[detail::row_code(sample, i, table.margin)];
  return table;
}

/// N(a_W)/n; 0 for configurations never observed.
inline double empirical_marginal(const CountTable& table, const ConfigKey& key) {
  if (key.margin != table.margin) throw MarginMismatch("empirical_marginal: wrong margin");
  auto it = table.counts.find(key.code);
  return it == table.counts.end() ? 0.0 : static_cast<double>(it->second) / table.n;
}

/// Empirical conditionals of a_W given a_W': one distribution over A^|W| per
/// observed conditioning configuration. W' empty means the plain marginal,
/// keyed by code 0.
inline std::map<std::uint64_t, DiscreteDistribution> empirical_conditional(
    const Sample& sample, const std::vector<int>& target_in, const std::vector<int>& given_in) {
  if (target_in.empty()) throw InvalidMargin("empirical_conditional: empty target");
  const auto target = sorted_margin(target_in, sample.dims());
  const auto given = given_in.empty() ? std::vector<int>{} : sorted_margin(given_in, sample.dims());
  for (int v : target)
    if (std::binary_search(given.begin(), given.end(), v))
      throw InvalidMargin("empirical_conditional: overlapping margins");

  const std::uint64_t target_card =
      checked_pow(sample.dims().alphabet_size, static_cast<int>(target.size()));

  // Joint counts keyed by (given code, target code).
  std::unordered_map<std::uint64_t, std::uint64_t> joint, cond;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const std::uint64_t gc = given.empty() ? 0 : detail::row_code(sample, i, given);
    const std::uint64_t tc = detail::row_code(sample, i, target);
    ++joint[gc * target_card + tc];
    ++cond[gc];
  }

  std::map<std::uint64_t, DiscreteDistribution> out;
  for (const auto& [gc, ngiven] : cond) {
    std::vector<double> probs(target_card, 0.0);
    for (std::uint64_t tc = 0; tc < target_card; ++tc) {
      auto it = joint.find(gc * target_card + tc);
      if (it != joint.end()) probs[tc] = static_cast<double>(it->second) / ngiven;
    }
    out.emplace(gc, DiscreteDistribution(std::move(probs)));
  }
  return out;
}

/// The counts the per-vertex score needs: joint N(a_v, a_nb) keyed by
/// nb_code * |A| + a_v, and the margin counts N(a_nb) keyed by nb_code.
/// nb empty means a single margin key 0 with count n.
struct NodeCounts {
  std::unordered_map<std::uint64_t, std::uint64_t> joint;
  std::unordered_map<std::uint64_t, std::uint64_t> margin;
};

inline NodeCounts node_statistics(const Sample& sample, int v, const std::vector<int>& nb_in) {
  const auto nb = nb_in.empty() ? std::vector<int>{} : sorted_margin(nb_in, sample.dims());
  if (std::binary_search(nb.begin(), nb.end(), v))
    throw InvalidMargin("node_statistics: v in its own neighborhood");
  if (v < 0 || v >= sample.dims().d) throw InvalidMargin("node_statistics: bad vertex");

  const std::uint64_t radix = sample.dims().alphabet_size;
  NodeCounts nc;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const std::uint64_t nb_code = nb.empty() ? 0 : detail::row_code(sample, i, nb);
    ++nc.joint[nb_code * radix + sample.at(i, v)];
    ++nc.margin[nb_code];
  }
  return nc;
}

/// Memo of CountTables keyed by margin bitmask, shared across one estimation
/// run. Concurrent reads; duplicated computation of the same margin is
/// harmless (results identical).
class CountCache {
 public:
  std::shared_ptr<const CountTable> get_or_compute(const Sample& sample,
                                                   const std::vector<int>& w) {
    const auto sorted = sorted_margin(w, sample.dims());
    std::uint64_t mask = 0;
    for (int v : sorted) mask |= 1ull << v;
    {
      std::shared_lock lock(mutex_);
      auto it = cache_.find(mask);
      if (it != cache_.end()) return it->second;
    }
    auto table = std::make_shared<const CountTable>(count_margin(sample, sorted));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = cache_.try_emplace(mask, table);
    if (!inserted) it->second = table;
    return it->second;
  }

 private:
  std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const CountTable>> cache_;
};

}  // namespace mrfselect
