// Modular-addition task instances: bag-of-tokens encoding, labels,
// i.i.d. sampling, exhaustive enumeration, and the exact label
// distribution. Datasets round-trip through JSONL.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modadd/numerics.hpp"

namespace modadd {

struct TaskSpec {
  int p = 2;  // modulus / vocabulary size
  int m = 2;  // sequence length

  void validate() const;
};

// Count vector over [p]; sums to m.
using BagVector = std::vector<int>;

struct Provenance {
  bool exhaustive = false;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t n = 0;
};

struct LabeledItem {
  BagVector x;
  int y = 0;
};

struct LabeledSet {
  TaskSpec spec;
  std::vector<LabeledItem> items;
  Provenance provenance;
};

// counts[k] = multiplicity of token k. Tokens must lie in [p] and the
// sequence must have length spec.m.
BagVector encode(const std::vector<int>& seq, const TaskSpec& spec);

// (sum_k k * counts[k]) mod p
int label_of(const BagVector& x, const TaskSpec& spec);

// n i.i.d. length-m sequences with uniform tokens, encoded and labeled.
LabeledSet sample_set(const TaskSpec& spec, std::size_t n, RngStream& rng);

// Number of distinct bags, C(m+p-1, p-1), or nullopt on overflow.
std::optional<std::uint64_t> domain_size(const TaskSpec& spec);

// Every distinct bag exactly once, lexicographic on counts.
LabeledSet enumerate_domain(const TaskSpec& spec,
                            std::uint64_t cap = 10'000'000);

// Exact distribution of the label under uniform token draws, via m-fold
// convolution over residues with integer counts. Always uniform.
std::vector<double> exact_label_distribution(const TaskSpec& spec);

// Multinomial weight of a bag: (# sequences realizing it) / p^m.
double multinomial_weight(const BagVector& x, const TaskSpec& spec);

// JSONL export/import: header record with spec + provenance, then one
// record per item.
void save_jsonl(const LabeledSet& set, const std::string& path);
LabeledSet load_jsonl(const std::string& path);

}  // namespace modadd
