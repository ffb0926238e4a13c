#include "disttack/stealth/homophily.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <iomanip>
#include <string>

namespace disttack {

DistanceMeasure parse_distance_measure(std::string_view name) {
  if (name == "wasserstein1") return DistanceMeasure::wasserstein1;
  if (name == "ks") return DistanceMeasure::ks;
  throw InvalidArgument("unknown distance measure '" + std::string(name) + "'");
}

std::string_view to_string(DistanceMeasure m) { return m == DistanceMeasure::ks ? "ks" : "wasserstein1"; }

HomophilyWeighting parse_homophily_weighting(std::string_view name) {
  if (name == "degree_ratio") return HomophilyWeighting::degree_ratio;
  if (name == "symmetric") return HomophilyWeighting::symmetric;
  throw InvalidArgument("unknown homophily weighting '" + std::string(name) + "'");
}

std::string_view to_string(HomophilyWeighting w) {
  return w == HomophilyWeighting::symmetric ? "symmetric" : "degree_ratio";
}

double node_homophily(const Graph& g, NodeId i, HomophilyWeighting weighting) {
  g.check_node(i);
  const auto xi = g.features().row(i);
  const double di = static_cast<double>(g.degree(i));
  Eigen::RowVectorXd agg = Eigen::RowVectorXd::Zero(xi.size());
  g.for_each_neighbor(i, [&](NodeId j) {
    const double dj = static_cast<double>(g.degree(j));
    const double w = weighting == HomophilyWeighting::degree_ratio ? std::sqrt(dj) / std::sqrt(di)
                                                                   : 1.0 / std::sqrt(di * dj);
    agg.noalias() += w * g.features().row(j);
  });
  return std::sqrt(agg.squaredNorm() + xi.squaredNorm());
}

HomophilyDistribution homophily_distribution(const Graph& g, HomophilyWeighting weighting) {
  HomophilyDistribution h;
  h.values.resize(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) h.values[i] = node_homophily(g, i, weighting);
  return h;
}

double sorted_distance(std::span<const double> p, std::span<const double> q, DistanceMeasure measure) {
  if (p.empty() || q.empty()) throw InvalidArgument("distribution_distance: empty distribution");
  if (measure == DistanceMeasure::wasserstein1 && p.size() == q.size()) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) sum += std::abs(p[k] - q[k]);
    return sum / static_cast<double>(p.size());
  }

  // Sweep the merged support; between consecutive breakpoints both CDFs are flat.
  const double np = static_cast<double>(p.size());
  const double nq = static_cast<double>(q.size());
  std::size_t a = 0, b = 0;
  double result = 0.0;
  double prev = std::min(p.front(), q.front());
  while (a < p.size() || b < q.size()) {
    const double t = b == q.size() || (a < p.size() && p[a] <= q[b]) ? p[a] : q[b];
    const double gap = std::abs(static_cast<double>(a) / np - static_cast<double>(b) / nq);
    if (measure == DistanceMeasure::wasserstein1) result += gap * (t - prev);
    while (a < p.size() && p[a] == t) ++a;
    while (b < q.size() && q[b] == t) ++b;
    if (measure == DistanceMeasure::ks) {
      result = std::max(result, std::abs(static_cast<double>(a) / np - static_cast<double>(b) / nq));
    }
    prev = t;
  }
  return result;
}

double distribution_distance(std::span<const double> p, std::span<const double> q, DistanceMeasure measure) {
  std::vector<double> sp(p.begin(), p.end());
  std::vector<double> sq(q.begin(), q.end());
  std::sort(sp.begin(), sp.end());
  std::sort(sq.begin(), sq.end());
  return sorted_distance(sp, sq, measure);
}

double distribution_distance(const HomophilyDistribution& p, const HomophilyDistribution& q,
                             DistanceMeasure measure) {
  return distribution_distance(p.values, q.values, measure);
}

double stealth_penalty(const Graph& g, const Graph& g_perturbed, double lambda_homo, DistanceMeasure measure,
                       HomophilyWeighting weighting) {
  if (g.num_nodes() != g_perturbed.num_nodes()) throw InvalidArgument("stealth_penalty: node count mismatch");
  if (!(lambda_homo >= 0.0)) throw InvalidArgument("lambda_homo must be non-negative");
  if (lambda_homo == 0.0) return 0.0;
  return lambda_homo * distribution_distance(homophily_distribution(g, weighting),
                                             homophily_distribution(g_perturbed, weighting), measure);
}

std::vector<HistogramBin> paired_histogram(const HomophilyDistribution& clean, const HomophilyDistribution& perturbed,
                                           std::size_t bins) {
  if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
  if (clean.values.empty() && perturbed.values.empty()) return {};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* d : {&clean, &perturbed}) {
    for (double v : d->values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  auto bin_of = [&](double v) {
    const auto b = static_cast<std::size_t>((v - lo) / width);
    return std::min(b, bins - 1);
  };
  for (double v : clean.values) ++out[bin_of(v)].count_clean;
  for (double v : perturbed.values) ++out[bin_of(v)].count_perturbed;
  return out;
}

void write_histogram_csv(std::span<const HistogramBin> bins, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17) << "bin_lo,bin_hi,count_clean,count_perturbed\n";
  for (const auto& b : bins) out << b.lo << ',' << b.hi << ',' << b.count_clean << ',' << b.count_perturbed << '\n';
}

std::vector<NodeId> nodes_affected_by_edge(const Graph& g, NodeId u, NodeId v) {
  std::vector<NodeId> out{u, v};
  g.for_each_neighbor(u, [&](NodeId j) { out.push_back(j); });
  g.for_each_neighbor(v, [&](NodeId j) { out.push_back(j); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NodeId> nodes_affected_by_feature(const Graph& g, NodeId i) {
  std::vector<NodeId> out{i};
  g.for_each_neighbor(i, [&](NodeId j) { out.push_back(j); });
  std::sort(out.begin(), out.end());
  return out;
}

HomophilyTracker::HomophilyTracker(const Graph& clean, HomophilyWeighting weighting, DistanceMeasure measure)
    : weighting_(weighting), measure_(measure) {
  values_ = homophily_distribution(clean, weighting).values;
  reference_sorted_ = values_;
  std::sort(reference_sorted_.begin(), reference_sorted_.end());
  sorted_ = reference_sorted_;
  current_distance_ = 0.0;
}

std::vector<double> HomophilyTracker::replaced_sorted(std::span<const HomophilyChange> changes) const {
  std::vector<double> s = sorted_;
  for (const auto& [node, h] : changes) {
    const double old = values_.at(node);
    s.erase(std::lower_bound(s.begin(), s.end(), old));
    s.insert(std::upper_bound(s.begin(), s.end(), h), h);
  }
  return s;
}

double HomophilyTracker::distance_with(std::span<const HomophilyChange> changes) const {
  if (changes.empty()) return current_distance_;
  // Apply sequentially against a scratch copy so repeated nodes chain correctly.
  std::vector<double> s = sorted_;
  std::vector<std::pair<NodeId, double>> applied;
  for (const auto& [node, h] : changes) {
    double old = values_.at(node);
    for (const auto& [n2, h2] : applied) {
      if (n2 == node) old = h2;
    }
    s.erase(std::lower_bound(s.begin(), s.end(), old));
    s.insert(std::upper_bound(s.begin(), s.end(), h), h);
    applied.emplace_back(node, h);
  }
  return sorted_distance(reference_sorted_, s, measure_);
}

void HomophilyTracker::commit(std::span<const HomophilyChange> changes) {
  for (const auto& [node, h] : changes) {
    const HomophilyChange one[] = {{node, h}};
    sorted_ = replaced_sorted(one);
    values_.at(node) = h;
  }
  current_distance_ = sorted_distance(reference_sorted_, sorted_, measure_);
}

std::vector<HomophilyChange> HomophilyTracker::evaluate(const Graph& g, std::span<const NodeId> nodes) const {
  std::vector<HomophilyChange> out;
  out.reserve(nodes.size());
  for (NodeId i : nodes) out.emplace_back(i, node_homophily(g, i, weighting_));
  return out;
}

}  // namespace disttack
