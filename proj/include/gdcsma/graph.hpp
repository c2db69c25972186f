#ifndef GDCSMA_GRAPH_HPP
#define GDCSMA_GRAPH_HPP

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gdcsma {

/// Links are packed into a 32-bit word, so graphs hold at most 32 links.
inline constexpr int kMaxLinks = 32;

/// Default ceiling on the number of schedules an enumeration may produce.
inline constexpr std::size_t kDefaultScheduleLimit = std::size_t{1} << 22;

using LinkMask = std::uint32_t;

using Edge = std::pair<int, int>;

/// A set of simultaneously transmitting links, bit i set when link i is on.
struct Schedule {
  LinkMask bits = 0;

  constexpr bool transmits(int link) const { return ((bits >> link) & 1U) != 0U; }
  constexpr int size() const { return std::popcount(bits); }
  constexpr Schedule with(int link, bool on) const {
    return on ? Schedule{bits | (LinkMask{1} << link)}
              : Schedule{bits & ~(LinkMask{1} << link)};
  }
  constexpr Schedule flipped(int link) const { return Schedule{bits ^ (LinkMask{1} << link)}; }

  friend constexpr auto operator<=>(const Schedule&, const Schedule&) = default;
};

/// Space-separated link ids, e.g. "0 3 7"; empty for the silent schedule.
std::string to_string(Schedule x);

/// Conflict graph over wireless links. Immutable once built.
class InterferenceGraph {
 public:
  /// Throws std::invalid_argument on n outside [1, 32], self-edges, or out-of-range ids.
  /// Duplicate edges are merged.
  InterferenceGraph(int n, std::span<const Edge> edges);

  int size() const { return n_; }
  LinkMask neighbors(int link) const { return neighbors_[static_cast<std::size_t>(link)]; }
  int degree(int link) const { return degrees_[static_cast<std::size_t>(link)]; }
  const std::vector<int>& degrees() const { return degrees_; }
  int max_degree() const;
  std::size_t edge_count() const;
  bool adjacent(int a, int b) const { return ((neighbors(a) >> b) & 1U) != 0U; }

  /// Edges as (a, b) with a < b, sorted.
  std::vector<Edge> edges() const;

  bool neighbors_silent(int link, Schedule x) const { return (neighbors(link) & x.bits) == 0U; }
  bool is_independent(Schedule x) const;

  friend bool operator==(const InterferenceGraph&, const InterferenceGraph&) = default;

 private:
  int n_;
  std::vector<LinkMask> neighbors_;
  std::vector<int> degrees_;
};

enum class GraphFamily { kStar, kCycle, kCirculant, kComplete, kExplicit };

std::string_view to_string(GraphFamily family);
/// Accepts "star", "cycle", "circulant", "complete", "explicit".
GraphFamily parse_family(std::string_view name);

struct GraphSpec {
  GraphFamily family = GraphFamily::kStar;
  int n = 16;
  int k = 0;                ///< circulant only: even, 2 <= k <= n - 2
  std::vector<Edge> edges;  ///< explicit only

  /// Short tag used for file names and cell keys, e.g. "circulant-k6-n16".
  std::string label() const;
};

/// Star: link 0 is the hub. Cycle: ring 0-1-...-(n-1)-0. Circulant(n, k): each
/// link joined to the k/2 nearest links on either side of the ring.
InterferenceGraph build_graph(const GraphSpec& spec);

/// Edge-list text: first data line is `n`, then one `i j` pair per line.
/// Blank lines and anything after `#` are ignored.
InterferenceGraph parse_edge_list(std::istream& in);
InterferenceGraph load_edge_list(const std::string& path);

/// All independent sets of a graph, in ascending packed-word order.
class ScheduleSpace {
 public:
  ScheduleSpace() = default;

  int links() const { return links_; }
  std::size_t size() const { return schedules_.size(); }
  const Schedule& operator[](std::size_t i) const { return schedules_[i]; }
  auto begin() const { return schedules_.begin(); }
  auto end() const { return schedules_.end(); }
  std::span<const Schedule> schedules() const { return schedules_; }

  std::optional<std::size_t> index_of(Schedule x) const;
  bool contains(Schedule x) const { return index_of(x).has_value(); }

 private:
  friend ScheduleSpace enumerate_schedules(const InterferenceGraph&, std::size_t);
  int links_ = 0;
  std::vector<Schedule> schedules_;
};

/// Throws std::length_error when the graph has more than `limit` independent sets.
ScheduleSpace enumerate_schedules(const InterferenceGraph& g,
                                  std::size_t limit = kDefaultScheduleLimit);

/// Exact, by branching; does not materialize the schedule space.
int max_independent_set_size(const InterferenceGraph& g);

/// n minus the maximum independent set size.
int min_vertex_cover_size(const InterferenceGraph& g);

/// 1 + minimum vertex cover.
int jensen_constant(const InterferenceGraph& g);

}  // namespace gdcsma

#endif  // GDCSMA_GRAPH_HPP
