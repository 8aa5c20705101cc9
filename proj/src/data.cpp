#include "modadd/data.hpp"

#include <fstream>
#include <numeric>

#include <json.hpp>

namespace modadd {

using nlohmann::json;

void TaskSpec::validate() const {
  if (p < 2) throw std::invalid_argument("TaskSpec: p must be >= 2");
  if (m < 2) throw std::invalid_argument("TaskSpec: m must be >= 2");
}

BagVector encode(const std::vector<int>& seq, const TaskSpec& spec) {
  spec.validate();
  if (static_cast<int>(seq.size()) != spec.m)
    throw std::invalid_argument("encode: sequence length != m");
  BagVector counts(spec.p, 0);
  for (int s : seq) {
    if (s < 0 || s >= spec.p)
      throw std::invalid_argument("encode: token outside [p]");
    ++counts[s];
  }
  return counts;
}

int label_of(const BagVector& x, const TaskSpec& spec) {
  long long sum = 0;
  for (int k = 0; k < spec.p; ++k) sum += static_cast<long long>(k) * x[k];
  return static_cast<int>(sum % spec.p);
}

LabeledSet sample_set(const TaskSpec& spec, std::size_t n, RngStream& rng) {
  spec.validate();
  if (n == 0) throw std::invalid_argument("sample_set: n must be >= 1");
  LabeledSet set;
  set.spec = spec;
  set.provenance = {false, rng.seed(), rng.stream_id(), n};
  set.items.reserve(n);
  std::vector<int> seq(spec.m);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < spec.m; ++j)
      seq[j] = static_cast<int>(rng.uniform_int(spec.p));
    LabeledItem item;
    item.x = encode(seq, spec);
    item.y = label_of(item.x, spec);
    set.items.push_back(std::move(item));
  }
  return set;
}

std::optional<std::uint64_t> domain_size(const TaskSpec& spec) {
  // C(m+p-1, p-1) with overflow detection.
  const std::uint64_t n = static_cast<std::uint64_t>(spec.m) + spec.p - 1;
  const std::uint64_t k =
      std::min<std::uint64_t>(spec.p - 1, static_cast<std::uint64_t>(spec.m));
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > ~std::uint64_t{0}) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

LabeledSet enumerate_domain(const TaskSpec& spec, std::uint64_t cap) {
  spec.validate();
  const auto count = domain_size(spec);
  if (!count || *count > cap)
    throw std::runtime_error(
        "enumerate_domain: domain size " +
        (count ? std::to_string(*count) : std::string("(overflow)")) +
        " exceeds cap " + std::to_string(cap));

  LabeledSet set;
  set.spec = spec;
  set.provenance.exhaustive = true;
  set.items.reserve(*count);

  // Lexicographic enumeration of compositions of m into p parts.
  BagVector x(spec.p, 0);
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == spec.p - 1) {
      x[pos] = remaining;
      set.items.push_back({x, label_of(x, spec)});
      x[pos] = 0;
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      x[pos] = c;
      self(self, pos + 1, remaining - c);
    }
    x[pos] = 0;
  };
  emit(emit, 0, spec.m);
  return set;
}

std::vector<double> exact_label_distribution(const TaskSpec& spec) {
  spec.validate();
  // Integer counts of sequences per residue; p^m fits u64 for p,m <= 12
  // and far beyond.
  std::vector<std::uint64_t> counts(spec.p, 0);
  counts[0] = 1;
  for (int step = 0; step < spec.m; ++step) {
    std::vector<std::uint64_t> next(spec.p, 0);
    for (int r = 0; r < spec.p; ++r) {
      if (counts[r] == 0) continue;
      for (int t = 0; t < spec.p; ++t) next[(r + t) % spec.p] += counts[r];
    }
    counts = std::move(next);
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> dist(spec.p);
  for (int r = 0; r < spec.p; ++r) dist[r] = counts[r] / total;
  return dist;
}

double multinomial_weight(const BagVector& x, const TaskSpec& spec) {
  // m! / prod(c_k!) / p^m, exact integers before the final division.
  unsigned __int128 mult = 1;
  int placed = 0;
  for (int c : x) {
    for (int i = 1; i <= c; ++i) {
      ++placed;
      mult = mult * placed / i;  // running product of binomials stays integral
    }
  }
  double denom = 1.0;
  for (int i = 0; i < spec.m; ++i) denom *= spec.p;
  return static_cast<double>(static_cast<std::uint64_t>(mult)) / denom;
}

void save_jsonl(const LabeledSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_jsonl: cannot open " + path);
  json header = {{"schema", "modadd-dataset-v1"},
                 {"p", set.spec.p},
                 {"m", set.spec.m}};
  if (set.provenance.exhaustive) {
    header["provenance"] = {{"exhaustive", true}};
  } else {
    header["provenance"] = {{"seed", set.provenance.seed},
                            {"stream_id", set.provenance.stream_id},
                            {"n", set.provenance.n}};
  }
  out << header.dump() << "\n";
  for (const auto& item : set.items) {
    json rec = {{"counts", item.x}, {"label", item.y}};
    out << rec.dump() << "\n";
  }
}

LabeledSet load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_jsonl: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_jsonl: missing header");
  json header = json::parse(line);
  if (header.value("schema", "") != "modadd-dataset-v1")
    throw std::runtime_error("load_jsonl: unknown schema");
  LabeledSet set;
  set.spec.p = header.at("p").get<int>();
  set.spec.m = header.at("m").get<int>();
  const json& prov = header.at("provenance");
  if (prov.value("exhaustive", false)) {
    set.provenance.exhaustive = true;
  } else {
    set.provenance.seed = prov.at("seed").get<std::uint64_t>();
    set.provenance.stream_id = prov.at("stream_id").get<std::uint64_t>();
    set.provenance.n = prov.at("n").get<std::size_t>();
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    LabeledItem item;
    item.x = rec.at("counts").get<BagVector>();
    item.y = rec.at("label").get<int>();
    if (static_cast<int>(item.x.size()) != set.spec.p)
      throw std::runtime_error("load_jsonl: counts length != p");
    if (item.y != label_of(item.x, set.spec))
      throw std::runtime_error("load_jsonl: label does not match counts");
    set.items.push_back(std::move(item));
  }
  return set;
}

}  // namespace modadd
