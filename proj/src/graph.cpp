#include "gdcsma/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace gdcsma {

namespace {

LinkMask bit(int link) { return LinkMask{1} << link; }

LinkMask all_links(int n) {
  return n == kMaxLinks ? ~LinkMask{0} : (LinkMask{1} << n) - 1U;
}

void enumerate_from(const InterferenceGraph& g, int link, LinkMask chosen, LinkMask blocked,
                    std::vector<Schedule>& out, std::size_t limit) {
  if (link == g.size()) {
    if (out.size() >= limit) {
      throw std::length_error("schedule space exceeds " + std::to_string(limit) +
                              " independent sets; graph too large for exhaustive enumeration");
    }
    out.push_back(Schedule{chosen});
    return;
  }
  enumerate_from(g, link + 1, chosen, blocked, out, limit);
  if ((blocked & bit(link)) == 0U) {
    enumerate_from(g, link + 1, chosen | bit(link), blocked | g.neighbors(link), out, limit);
  }
}

// Branch on the highest-degree vertex; vertices of degree <= 1 are always taken.
int mis_of(const InterferenceGraph& g, LinkMask candidates) {
  if (candidates == 0U) return 0;
  int pick_low = -1;
  int pick_high = -1;
  int high_deg = -1;
  for (LinkMask rest = candidates; rest != 0U; rest &= rest - 1U) {
    const int v = std::countr_zero(rest);
    const int d = std::popcount(g.neighbors(v) & candidates);
    if (d <= 1) {
      pick_low = v;
      break;
    }
    if (d > high_deg) {
      high_deg = d;
      pick_high = v;
    }
  }
  if (pick_low >= 0) {
    return 1 + mis_of(g, candidates & ~bit(pick_low) & ~g.neighbors(pick_low));
  }
  const int with = 1 + mis_of(g, candidates & ~bit(pick_high) & ~g.neighbors(pick_high));
  const int without = mis_of(g, candidates & ~bit(pick_high));
  return std::max(with, without);
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

}  // namespace

std::string to_string(Schedule x) {
  std::string out;
  for (LinkMask rest = x.bits; rest != 0U; rest &= rest - 1U) {
    if (!out.empty()) out += ' ';
    out += std::to_string(std::countr_zero(rest));
  }
  return out;
}

InterferenceGraph::InterferenceGraph(int n, std::span<const Edge> edges) : n_(n) {
  if (n < 1 || n > kMaxLinks) {
    throw std::invalid_argument("link count must be in [1, 32], got " + std::to_string(n));
  }
  neighbors_.assign(static_cast<std::size_t>(n), 0U);
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw std::invalid_argument("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                  ") references a link outside [0, " + std::to_string(n) + ")");
    }
    if (a == b) {
      throw std::invalid_argument("self-edge on link " + std::to_string(a));
    }
    neighbors_[static_cast<std::size_t>(a)] |= bit(b);
    neighbors_[static_cast<std::size_t>(b)] |= bit(a);
  }
  degrees_.reserve(neighbors_.size());
  for (const LinkMask m : neighbors_) degrees_.push_back(std::popcount(m));
}

int InterferenceGraph::max_degree() const {
  return *std::max_element(degrees_.begin(), degrees_.end());
}

std::size_t InterferenceGraph::edge_count() const {
  std::size_t twice = 0;
  for (const int d : degrees_) twice += static_cast<std::size_t>(d);
  return twice / 2;
}

std::vector<Edge> InterferenceGraph::edges() const {
  std::vector<Edge> out;
  for (int a = 0; a < n_; ++a) {
    for (int b = a + 1; b < n_; ++b) {
      if (adjacent(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

bool InterferenceGraph::is_independent(Schedule x) const {
  if ((x.bits & ~all_links(n_)) != 0U) return false;
  for (LinkMask rest = x.bits; rest != 0U; rest &= rest - 1U) {
    if ((neighbors(std::countr_zero(rest)) & x.bits) != 0U) return false;
  }
  return true;
}

std::string_view to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::kStar: return "star";
    case GraphFamily::kCycle: return "cycle";
    case GraphFamily::kCirculant: return "circulant";
    case GraphFamily::kComplete: return "complete";
    case GraphFamily::kExplicit: return "explicit";
  }
  return "unknown";
}

GraphFamily parse_family(std::string_view name) {
  for (const auto f : {GraphFamily::kStar, GraphFamily::kCycle, GraphFamily::kCirculant,
                       GraphFamily::kComplete, GraphFamily::kExplicit}) {
    if (name == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown graph family '" + std::string(name) +
                              "' (expected star, cycle, circulant, complete or explicit)");
}

std::string GraphSpec::label() const {
  std::string out(to_string(family));
  if (family == GraphFamily::kCirculant) out += "-k" + std::to_string(k);
  out += "-n" + std::to_string(n);
  return out;
}

InterferenceGraph build_graph(const GraphSpec& spec) {
  const int n = spec.n;
  if (n < 1 || n > kMaxLinks) {
    throw std::invalid_argument("link count must be in [1, 32], got " + std::to_string(n));
  }
  std::vector<Edge> edges;
  switch (spec.family) {
    case GraphFamily::kStar:
      if (n < 2) throw std::invalid_argument("star needs n >= 2");
      for (int leaf = 1; leaf < n; ++leaf) edges.emplace_back(0, leaf);
      break;
    case GraphFamily::kCycle:
      if (n < 3) throw std::invalid_argument("cycle needs n >= 3, got " + std::to_string(n));
      for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
      break;
    case GraphFamily::kCirculant:
      if (spec.k % 2 != 0) {
        throw std::invalid_argument("circulant degree k must be even, got " +
                                    std::to_string(spec.k));
      }
      if (spec.k < 2 || spec.k > n - 2) {
        throw std::invalid_argument("circulant degree k must satisfy 2 <= k <= n - 2 (n = " +
                                    std::to_string(n) + ", k = " + std::to_string(spec.k) + ")");
      }
      for (int i = 0; i < n; ++i) {
        for (int offset = 1; offset <= spec.k / 2; ++offset) edges.emplace_back(i, (i + offset) % n);
      }
      break;
    case GraphFamily::kComplete:
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) edges.emplace_back(a, b);
      }
      break;
    case GraphFamily::kExplicit:
      edges = spec.edges;
      break;
  }
  return InterferenceGraph(n, edges);
}

InterferenceGraph parse_edge_list(std::istream& in) {
  std::string line;
  std::optional<int> n;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(strip_comment(line));
    std::vector<long long> values;
    long long v = 0;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected integers");
    }
    if (values.empty()) continue;
    if (!n) {
      if (values.size() != 1) {
        throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                    ": first entry must be the link count alone");
      }
      if (values[0] < 1 || values[0] > kMaxLinks) {
        throw std::invalid_argument("edge list: link count must be in [1, 32]");
      }
      n = static_cast<int>(values[0]);
      continue;
    }
    if (values.size() != 2) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected `i j`");
    }
    if (values[0] < 0 || values[0] >= *n || values[1] < 0 || values[1] >= *n) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": link id out of range");
    }
    edges.emplace_back(static_cast<int>(values[0]), static_cast<int>(values[1]));
  }
  if (!n) throw std::invalid_argument("edge list is empty");
  return InterferenceGraph(*n, edges);
}

InterferenceGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open edge list '" + path + "'");
  return parse_edge_list(in);
}

std::optional<std::size_t> ScheduleSpace::index_of(Schedule x) const {
  const auto it = std::lower_bound(schedules_.begin(), schedules_.end(), x);
  if (it == schedules_.end() || *it != x) return std::nullopt;
  return static_cast<std::size_t>(it - schedules_.begin());
}

ScheduleSpace enumerate_schedules(const InterferenceGraph& g, std::size_t limit) {
  ScheduleSpace space;
  space.links_ = g.size();
  enumerate_from(g, 0, 0U, 0U, space.schedules_, limit);
  std::sort(space.schedules_.begin(), space.schedules_.end());
  return space;
}

int max_independent_set_size(const InterferenceGraph& g) {
  return mis_of(g, all_links(g.size()));
}

int min_vertex_cover_size(const InterferenceGraph& g) {
  return g.size() - max_independent_set_size(g);
}

int jensen_constant(const InterferenceGraph& g) { return 1 + min_vertex_cover_size(g); }

}  // namespace gdcsma
